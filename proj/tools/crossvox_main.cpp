// crossvox command line: articulatory featurization, embedding-function
// training, meta-training over synthetic multi-language tasks, low-resource
// fine-tuning, duration extraction and zero-shot analysis.
//
// Exit codes: 0 success, 1 environment/IO error, 2 domain error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossvox/crossvox.hpp"
#include "crossvox/detail/format.hpp"
#include "crossvox/detail/sha256.hpp"

namespace fs = std::filesystem;
using namespace crossvox;

namespace {

// Resolved settings of a run, echoed into the output directory so every
// result ships with the exact configuration that produced it.
class OutputDir {
 public:
  OutputDir() = default;

  void open(const std::string& path, const std::string& command) {
    if (path.empty()) return;
    dir_ = path;
    command_ = command;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + path + "'");
  }

  bool active() const { return !dir_.empty(); }
  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void echo(const std::string& key, const std::string& value) { settings_.emplace_back(key, value); }
  void echo(const std::string& key, double value) { echo(key, detail::format_double(value)); }
  void echo_int(const std::string& key, std::int64_t value) { echo(key, std::to_string(value)); }

  void note_file(const std::string& name) { files_.push_back(name); }

  void write_text(const std::string& name, const std::string& content) {
    if (!active()) return;
    std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path(name) + "' for writing");
    out << content;
    if (!out) throw IoError("short write to '" + path(name) + "'");
    note_file(name);
  }

  // Writes the config echo plus a manifest with one sha256 per output file.
  void finalize() {
    if (!active()) return;
    std::string echo_text = "command=" + command_ + "\n";
    for (const auto& [k, v] : settings_) echo_text += k + "=" + v + "\n";
    write_text("config.echo", echo_text);

    std::vector<std::string> names = files_;
    std::sort(names.begin(), names.end());
    std::string manifest;
    for (const auto& name : names) {
      std::ifstream in(path(name), std::ios::binary);
      if (!in) throw IoError("manifest: cannot reopen '" + name + "'");
      const std::string bytes{std::istreambuf_iterator<char>(in), {}};
      manifest += detail::sha256_hex(bytes) + "\t" + name + "\n";
    }
    std::ofstream out(path("manifest.tsv"), std::ios::binary | std::ios::trunc);
    out << manifest;
  }

 private:
  std::string dir_;
  std::string command_;
  std::vector<std::pair<std::string, std::string>> settings_;
  std::vector<std::string> files_;
};

ArticBlock parse_block(const std::string& name) {
  if (name == "ternary" || name == "panphon") return ArticBlock::Ternary;
  if (name == "onehot" || name == "papercup") return ArticBlock::OneHot;
  if (name == "combined") return ArticBlock::Combined;
  throw ParseError("unknown feature block '" + name + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string durations_to_string(const DurationSequence& durations) {
  std::string out;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(durations[i]);
  }
  return out;
}

std::string loss_log_tsv(const Vec& log) {
  std::string out = "step\tloss\n";
  for (std::size_t i = 0; i < log.size(); ++i)
    out += std::to_string(i) + "\t" + detail::format_double(log[i]) + "\n";
  return out;
}

// --- featurize --------------------------------------------------------------

struct FeaturizeArgs {
  std::string table_path;
  std::string text;
  std::string input_path;
  std::string out_dir;
  std::string delimiters;
  bool map_boundaries = false;
  std::string boundary_symbol = "_";
};

int cmd_featurize(const FeaturizeArgs& args) {
  const auto table = load_feature_table(args.table_path);
  std::string text = args.text;
  if (!args.input_path.empty()) {
    std::ifstream in(args.input_path, std::ios::binary);
    if (!in) throw FileNotFoundError(args.input_path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  FrontendOptions opts;
  opts.extra_delimiters = args.delimiters;
  opts.map_word_boundaries = args.map_boundaries;
  opts.boundary_symbol = args.boundary_symbol;

  const auto vectors = featurize_utterance(text, table, opts);
  std::string tsv;
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < kArticDim; ++i) {
      if (i) tsv += '\t';
      tsv += detail::format_double(v.values[i]);
    }
    tsv += '\n';
  }
  std::cout << tsv;

  OutputDir out;
  out.open(args.out_dir, "featurize");
  if (out.active()) {
    out.echo("table", args.table_path);
    out.echo("text", text);
    out.echo_int("map_boundaries", args.map_boundaries ? 1 : 0);
    out.write_text("featurized.tsv", tsv);
    out.finalize();
  }
  return 0;
}

// --- embed-train -------------------------------------------------------------

struct EmbedTrainArgs {
  std::string table_path;
  std::string gold_path;
  std::string out_dir;
  std::string arch = "nonlinear";
  std::string block = "combined";
  std::size_t hidden = 100;
  std::size_t epochs = 3000;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  AdamConfig adam;
};

int cmd_embed_train(const EmbedTrainArgs& args) {
  const auto table = load_feature_table(args.table_path);
  const auto block = parse_block(args.block);
  const auto gold = load_gold_set(args.gold_path, table, block);

  EmbeddingConfig config;
  config.arch = args.arch == "linear" ? EmbeddingArch::Linear : EmbeddingArch::NonLinear;
  config.input_dim = artic_block_dim(block);
  config.hidden_dim = args.hidden;
  config.output_dim = gold.pairs.front().gold.size();
  config.seed = args.seed;

  const auto result = train_embedding(config, gold, args.epochs, args.batch, args.adam);
  std::cout << "final_avg_distance\t" << detail::format_double(result.final_avg_distance) << "\n";
  if (result.aborted_epoch)
    std::cerr << "warning: non-finite loss at epoch " << *result.aborted_epoch
              << ", kept last finite parameters\n";

  OutputDir out;
  out.open(args.out_dir, "embed-train");
  if (out.active()) {
    out.echo("table", args.table_path);
    out.echo("gold", args.gold_path);
    out.echo("arch", args.arch);
    out.echo("block", args.block);
    out.echo_int("hidden", static_cast<std::int64_t>(args.hidden));
    out.echo_int("epochs", static_cast<std::int64_t>(args.epochs));
    out.echo_int("batch", static_cast<std::int64_t>(args.batch));
    out.echo_int("seed", static_cast<std::int64_t>(args.seed));
    out.echo("lr", args.adam.lr);
    embedding_to_checkpoint(result.params).save(out.path("embedding.ck"));
    out.note_file("embedding.ck");
    out.write_text("stats.tsv", "final_avg_distance\t" +
                                    detail::format_double(result.final_avg_distance) + "\n");
    out.write_text("epoch_log.tsv", loss_log_tsv(result.epoch_avg_distance));
    out.finalize();
  }
  return 0;
}

// --- meta-train ---------------------------------------------------------------

struct MetaTrainArgs {
  std::string table_path;
  std::string out_dir;
  std::string procedure = "laml";
  std::size_t n_tasks = 4;
  std::size_t inventory_size = 24;
  double noise = 0.01;
  std::size_t steps = 1000;
  std::size_t batch = 16;
  std::size_t hidden = 32;
  std::size_t frame_dim = 8;
  int inner_steps = 1;
  double inner_lr = 0.01;
  double outer_lr = 1e-3;
  double base_scale = 1.0;
  double offset_scale = 0.5;
  std::uint64_t seed = 0;
  std::string heldout;
  std::string unseen_corpus;  // file name under --out
  std::size_t unseen_lines = 32;
  std::size_t unseen_symbols = 12;
};

MetaProcedure parse_procedure(const std::string& name) {
  if (name == "laml") return MetaProcedure::LAML;
  if (name == "maml") return MetaProcedure::MAML;
  if (name == "fomaml") return MetaProcedure::FOMAML;
  throw ParseError("unknown procedure '" + name + "'");
}

int cmd_meta_train(const MetaTrainArgs& args) {
  const auto table = load_feature_table(args.table_path);
  const auto heldout = split_commas(args.heldout);

  MetaTrainConfig config;
  config.model.hidden_dim = args.hidden;
  config.model.frame_dim = args.frame_dim;
  config.model.seed = args.seed;
  config.family.base_seed = derive_seed(args.seed, 0xFA);
  config.family.frame_dim = args.frame_dim;
  config.family.base_scale = args.base_scale;
  config.family.offset_scale = args.offset_scale;
  config.steps = args.steps;
  config.batch_size = args.batch;
  config.outer.lr = args.outer_lr;
  config.inner_steps = args.inner_steps;
  config.inner_lr = args.inner_lr;
  config.seed = args.seed;

  const auto tasks = make_synthetic_tasks(table, args.n_tasks, args.inventory_size, args.noise,
                                          args.seed, heldout);
  const auto result = meta_train(config, table, tasks, parse_procedure(args.procedure));
  if (!result.loss_log.empty())
    std::cout << "final_summed_loss\t" << detail::format_double(result.loss_log.back()) << "\n";

  OutputDir out;
  out.open(args.out_dir, "meta-train");
  if (!out.active()) return 0;
  out.echo("table", args.table_path);
  out.echo("procedure", args.procedure);
  out.echo_int("tasks", static_cast<std::int64_t>(args.n_tasks));
  out.echo_int("inventory_size", static_cast<std::int64_t>(args.inventory_size));
  out.echo("noise", args.noise);
  out.echo_int("steps", static_cast<std::int64_t>(args.steps));
  out.echo_int("batch", static_cast<std::int64_t>(args.batch));
  out.echo_int("hidden", static_cast<std::int64_t>(args.hidden));
  out.echo_int("frame_dim", static_cast<std::int64_t>(args.frame_dim));
  out.echo_int("inner_steps", args.inner_steps);
  out.echo("inner_lr", args.inner_lr);
  out.echo("outer_lr", args.outer_lr);
  out.echo_int("seed", static_cast<std::int64_t>(args.seed));
  if (!heldout.empty()) out.echo("heldout", args.heldout);

  meta_to_checkpoint(result.state).save(out.path("meta.ck"));
  out.note_file("meta.ck");
  out.write_text("loss_log.tsv", loss_log_tsv(result.loss_log));

  std::string tasks_tsv = "task_id\tseed\tnoise\tinventory\n";
  for (const auto& t : tasks) {
    std::string inv;
    for (const auto& s : t.inventory) inv += s;
    tasks_tsv += std::to_string(t.task_id) + "\t" + std::to_string(t.seed) + "\t" +
                 detail::format_double(t.noise_level) + "\t" + inv + "\n";
  }
  out.write_text("tasks.tsv", tasks_tsv);

  if (!args.unseen_corpus.empty()) {
    // An extra task from the same family, never trained on, for later
    // fine-tuning runs. Held-out symbols are forced into its inventory so
    // zero-shot probes have data.
    TaskSpec unseen;
    unseen.task_id = static_cast<int>(args.n_tasks);
    unseen.seed = derive_seed(args.seed, 0x200 + args.n_tasks);
    unseen.noise_level = args.noise;
    Rng inv_rng(derive_seed(unseen.seed, 0x1B));
    std::vector<std::string> pool;
    for (const auto& e : table.entries()) pool.push_back(e.symbol);
    inv_rng.shuffle(pool);
    pool.resize(std::min(pool.size(), args.inventory_size));
    for (const auto& h : heldout) {
      const std::string key = nfd_utf8(h);
      if (std::find(pool.begin(), pool.end(), key) == pool.end()) pool.push_back(key);
    }
    unseen.inventory = pool;

    const TaskGenerator gen(config.family, unseen);
    Rng corpus_rng(derive_seed(unseen.seed, 0xC0));
    const auto lines =
        make_corpus(gen, unseen, table, args.unseen_lines, args.unseen_symbols, corpus_rng);
    save_corpus(lines, out.path(args.unseen_corpus));
    out.note_file(args.unseen_corpus);
  }
  out.finalize();
  return 0;
}

// --- finetune -----------------------------------------------------------------

struct FinetuneArgs {
  std::string table_path;
  std::string meta_path;
  std::string corpus_path;
  std::string out_dir;
  std::size_t steps = 200;
  double lr = 1e-3;
  std::size_t snapshot_every = 10;
};

int cmd_finetune(const FinetuneArgs& args) {
  const auto table = load_feature_table(args.table_path);
  const auto meta = meta_from_checkpoint(Checkpoint::load(args.meta_path));
  const auto lines = load_corpus(args.corpus_path, meta.params.config.frame_dim);

  std::vector<TaskBatch> corpus;
  corpus.reserve(lines.size());
  for (const auto& line : lines) corpus.push_back(corpus_line_to_batch(line, table));

  AdamConfig adam;
  adam.lr = args.lr;
  const auto result = finetune(meta, corpus, args.steps, adam, args.snapshot_every);

  // Speaker proxy: mean model output over the corpus inputs; reference is
  // the mean target frame, the "voice print" of the unseen speaker.
  Vec reference(meta.params.config.frame_dim, 0.0);
  std::size_t n_frames = 0;
  for (const auto& batch : corpus)
    for (const auto& t : batch.targets) {
      for (std::size_t k = 0; k < reference.size(); ++k) reference[k] += t[k];
      ++n_frames;
    }
  for (auto& x : reference) x /= static_cast<double>(n_frames);

  const auto probe = [&](const AcousticParams& params) {
    Vec mean(params.config.frame_dim, 0.0);
    std::size_t count = 0;
    for (const auto& batch : corpus) {
      const auto outputs = acoustic_forward(params, batch.inputs);
      for (const auto& o : outputs) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += o[k];
        ++count;
      }
    }
    for (auto& x : mean) x /= static_cast<double>(count);
    return mean;
  };
  const auto curve = similarity_curve(result.snapshots, probe, reference);

  if (!result.loss_log.empty())
    std::cout << "final_loss\t" << detail::format_double(result.loss_log.back()) << "\n";
  std::cout << "final_similarity\t" << detail::format_double(curve.back().similarity) << "\n";

  OutputDir out;
  out.open(args.out_dir, "finetune");
  if (out.active()) {
    out.echo("table", args.table_path);
    out.echo("meta", args.meta_path);
    out.echo("corpus", args.corpus_path);
    out.echo_int("steps", static_cast<std::int64_t>(args.steps));
    out.echo("lr", args.lr);
    out.echo_int("snapshot_every", static_cast<std::int64_t>(args.snapshot_every));
    acoustic_to_checkpoint(result.params).save(out.path("adapted.ck"));
    out.note_file("adapted.ck");
    out.write_text("loss_log.tsv", loss_log_tsv(result.loss_log));
    save_similarity_curve(curve, out.path("similarity_curve.tsv"));
    out.note_file("similarity_curve.tsv");
    out.finalize();
  }
  return 0;
}

// --- align --------------------------------------------------------------------

struct AlignArgs {
  std::string attention_path;
  std::string format = "auto";
  std::string out_dir;
};

int cmd_align(const AlignArgs& args) {
  std::string format = args.format;
  if (format == "auto")
    format = args.attention_path.ends_with(".ck") ? "checkpoint" : "tsv";
  AttentionMap map = format == "checkpoint"
                         ? attention_from_checkpoint(Checkpoint::load(args.attention_path))
                         : load_attention_tsv(args.attention_path);
  const auto durations = monotonic_viterbi(map);
  const std::string text = durations_to_string(durations) + "\n";
  std::cout << text;

  OutputDir out;
  out.open(args.out_dir, "align");
  if (out.active()) {
    out.echo("attention", args.attention_path);
    out.echo("format", format);
    out.write_text("durations.txt", text);
    out.finalize();
  }
  return 0;
}

// --- analyze ------------------------------------------------------------------

struct AnalyzeArgs {
  std::string table_path;
  std::string model_path;
  std::string out_dir;
  std::string heldout;
  std::size_t k = 5;
  double collapse_tol = kDefaultCollapseTolerance;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const auto table = load_feature_table(args.table_path);
  const auto heldout = split_commas(args.heldout);
  const auto ck = Checkpoint::load(args.model_path);
  const double kind = ck.get_scalar("model.kind");

  std::function<Vec(const ArticulatoryVector&)> model;
  if (kind == 0.0) {
    const auto params = acoustic_from_checkpoint(ck);
    model = [params](const ArticulatoryVector& v) {
      return acoustic_forward(params, std::span(&v, 1)).front();
    };
  } else {
    const auto params = embedding_from_checkpoint(ck);
    ArticBlock block;
    switch (params.config.input_dim) {
      case kTernaryDim: block = ArticBlock::Ternary; break;
      case kOneHotDim: block = ArticBlock::OneHot; break;
      case kArticDim: block = ArticBlock::Combined; break;
      default: throw ParseError("embedding input dim does not match any feature block");
    }
    model = [params, block](const ArticulatoryVector& v) {
      return embed(params, artic_block(v, block));
    };
  }

  OutputDir out;
  out.open(args.out_dir, "analyze");
  if (!out.active()) throw ParseError("analyze requires --out");
  out.echo("table", args.table_path);
  out.echo("model", args.model_path);
  out.echo("heldout", args.heldout);
  out.echo_int("k", static_cast<std::int64_t>(args.k));
  out.echo("collapse_tol", args.collapse_tol);

  if (!heldout.empty()) {
    const auto reports = zero_shot_report(table, heldout, model, args.k, args.collapse_tol);
    std::string tsv = "heldout\tspace\trank\tneighbor\tdistance\n";
    std::string summary = "heldout\tcollapse\n";
    for (const auto& r : reports) {
      for (std::size_t i = 0; i < r.artic_neighbors.size(); ++i)
        tsv += r.heldout_symbol + "\tartic\t" + std::to_string(i + 1) + "\t" +
               r.artic_neighbors[i].symbol + "\t" +
               detail::format_double(r.artic_neighbors[i].distance) + "\n";
      for (std::size_t i = 0; i < r.model_neighbors.size(); ++i)
        tsv += r.heldout_symbol + "\tmodel\t" + std::to_string(i + 1) + "\t" +
               r.model_neighbors[i].symbol + "\t" +
               detail::format_double(r.model_neighbors[i].distance) + "\n";
      summary += r.heldout_symbol + "\t" + (r.collapse ? "true" : "false") + "\n";
      std::cout << r.heldout_symbol << "\tcollapse=" << (r.collapse ? "true" : "false") << "\n";
    }
    out.write_text("zero_shot.tsv", tsv);
    out.write_text("zero_shot_summary.tsv", summary);
  }

  export_embeddings(table, model, out.path("embeddings.tsv"), heldout);
  out.note_file("embeddings.tsv");
  out.finalize();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"articulatory-feature TTS toolkit at desk scale"};
  app.require_subcommand(1);
  // Structured key-value config; sections name the subcommand, e.g.
  // [featurize]. Command-line flags override config values.
  app.set_config("--config");
  app.allow_config_extras(CLI::config_extras_mode::error);

  FeaturizeArgs fz;
  EmbedTrainArgs et;
  MetaTrainArgs mt;
  FinetuneArgs ft;
  AlignArgs al;
  AnalyzeArgs an;

  const auto add_common = [](CLI::App* cmd) { cmd->fallthrough(); };

  auto* featurize = app.add_subcommand("featurize", "IPA string to per-phoneme feature vectors");
  add_common(featurize);
  featurize->add_option("--table", fz.table_path, "feature table TSV")->required();
  auto* text_opt = featurize->add_option("--text", fz.text, "inline IPA string");
  featurize->add_option("--input", fz.input_path, "read IPA text from file")->excludes(text_opt);
  featurize->add_option("--out", fz.out_dir, "output directory");
  featurize->add_option("--delimiters", fz.delimiters, "extra delimiter characters to drop");
  featurize->add_flag("--map-boundaries", fz.map_boundaries,
                      "emit a boundary row for delimiter runs");
  featurize->add_option("--boundary-symbol", fz.boundary_symbol, "table symbol for boundaries");

  auto* embed_train =
      app.add_subcommand("embed-train", "fit an embedding function to gold vectors");
  add_common(embed_train);
  embed_train->add_option("--table", et.table_path, "feature table TSV")->required();
  embed_train->add_option("--gold", et.gold_path, "gold embedding TSV")->required();
  embed_train->add_option("--out", et.out_dir, "output directory");
  embed_train->add_option("--arch", et.arch, "linear|nonlinear")
      ->check(CLI::IsMember({"linear", "nonlinear"}));
  embed_train->add_option("--block", et.block, "ternary|onehot|combined (by resource name: panphon|papercup)")
      ->check(CLI::IsMember({"ternary", "onehot", "combined", "panphon", "papercup"}));
  embed_train->add_option("--hidden", et.hidden, "hidden width (nonlinear)");
  embed_train->add_option("--epochs", et.epochs, "training epochs");
  embed_train->add_option("--batch", et.batch, "batch size");
  embed_train->add_option("--seed", et.seed, "run seed");
  embed_train->add_option("--lr", et.adam.lr, "Adam learning rate");

  auto* meta_train_cmd =
      app.add_subcommand("meta-train", "meta-train over synthetic multi-language tasks");
  add_common(meta_train_cmd);
  meta_train_cmd->add_option("--table", mt.table_path, "feature table TSV")->required();
  meta_train_cmd->add_option("--out", mt.out_dir, "output directory");
  meta_train_cmd->add_option("--procedure", mt.procedure, "laml|maml|fomaml")
      ->check(CLI::IsMember({"laml", "maml", "fomaml"}));
  meta_train_cmd->add_option("--tasks", mt.n_tasks, "number of synthetic languages");
  meta_train_cmd->add_option("--inventory-size", mt.inventory_size, "symbols per language");
  meta_train_cmd->add_option("--noise", mt.noise, "target noise level");
  meta_train_cmd->add_option("--steps", mt.steps, "outer steps");
  meta_train_cmd->add_option("--batch", mt.batch, "batch size per task");
  meta_train_cmd->add_option("--hidden", mt.hidden, "acoustic hidden width");
  meta_train_cmd->add_option("--frame-dim", mt.frame_dim, "target frame dimension");
  meta_train_cmd->add_option("--inner-steps", mt.inner_steps, "MAML inner steps");
  meta_train_cmd->add_option("--inner-lr", mt.inner_lr, "MAML inner learning rate");
  meta_train_cmd->add_option("--outer-lr", mt.outer_lr, "outer Adam learning rate");
  meta_train_cmd->add_option("--base-scale", mt.base_scale, "shared generator scale");
  meta_train_cmd->add_option("--offset-scale", mt.offset_scale, "speaker offset scale");
  meta_train_cmd->add_option("--seed", mt.seed, "run seed");
  meta_train_cmd->add_option("--heldout", mt.heldout,
                             "comma-separated symbols excluded from task inventories");
  meta_train_cmd->add_option("--unseen-corpus-out", mt.unseen_corpus,
                             "also write a corpus for an unseen task (file name under --out)");
  meta_train_cmd->add_option("--unseen-lines", mt.unseen_lines, "unseen corpus utterances");
  meta_train_cmd->add_option("--unseen-symbols", mt.unseen_symbols,
                             "symbols per unseen corpus utterance");

  auto* finetune_cmd = app.add_subcommand("finetune", "adapt a meta checkpoint to one task");
  add_common(finetune_cmd);
  finetune_cmd->add_option("--table", ft.table_path, "feature table TSV")->required();
  finetune_cmd->add_option("--meta", ft.meta_path, "meta checkpoint")->required();
  finetune_cmd->add_option("--corpus", ft.corpus_path, "corpus file")->required();
  finetune_cmd->add_option("--out", ft.out_dir, "output directory");
  finetune_cmd->add_option("--steps", ft.steps, "Adam steps");
  finetune_cmd->add_option("--lr", ft.lr, "Adam learning rate");
  finetune_cmd->add_option("--snapshot-every", ft.snapshot_every, "curve checkpoint interval");

  auto* align_cmd = app.add_subcommand("align", "extract durations from an attention map");
  add_common(align_cmd);
  align_cmd->add_option("--attention", al.attention_path, "attention map (TSV or .ck)")
      ->required();
  align_cmd->add_option("--format", al.format, "auto|tsv|checkpoint")
      ->check(CLI::IsMember({"auto", "tsv", "checkpoint"}));
  align_cmd->add_option("--out", al.out_dir, "output directory");

  auto* analyze_cmd =
      app.add_subcommand("analyze", "zero-shot phoneme report and embedding export");
  add_common(analyze_cmd);
  analyze_cmd->add_option("--table", an.table_path, "feature table TSV")->required();
  analyze_cmd->add_option("--model", an.model_path, "acoustic or embedding checkpoint")
      ->required();
  analyze_cmd->add_option("--out", an.out_dir, "output directory")->required();
  analyze_cmd->add_option("--heldout", an.heldout, "comma-separated held-out symbols");
  analyze_cmd->add_option("--k", an.k, "neighbors per report");
  analyze_cmd->add_option("--collapse-tol", an.collapse_tol, "collapse flag tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (featurize->parsed()) return cmd_featurize(fz);
    if (embed_train->parsed()) return cmd_embed_train(et);
    if (meta_train_cmd->parsed()) return cmd_meta_train(mt);
    if (finetune_cmd->parsed()) return cmd_finetune(ft);
    if (align_cmd->parsed()) return cmd_align(al);
    if (analyze_cmd->parsed()) return cmd_analyze(an);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
