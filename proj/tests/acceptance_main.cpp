// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Heavier end-to-end checks than the unit tests, with
// per-criterion runtime budgets enforced.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crossvox/crossvox.hpp"

namespace fs = std::filesystem;
using namespace crossvox;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void run(const std::string& name, double budget_seconds,
           const std::function<bool(std::string&)>& body) {
    ++index;
    std::string detail;
    bool ok = false;
    const auto start = Clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start).count();
    if (elapsed >= budget_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over budget of ") +
                std::to_string(budget_seconds) + "s";
    }
    if (!ok) ++failures;
    std::printf("criterion %2d [%s] %6.2fs  %s%s%s\n", index, ok ? "PASS" : "FAIL", elapsed,
                name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

Vec random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  Vec v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

double mse(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// --- criterion 1: distance properties ----------------------------------------

bool criterion_distance_properties(std::string& detail) {
  Rng rng(8881);
  double worst_self = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t n = 1 + rng.below(32);
    const Vec a = random_vec(rng, n, -3.0, 3.0);
    const Vec b = random_vec(rng, n, -3.0, 3.0);
    if (norm(a) == 0.0 || norm(b) == 0.0) continue;
    const double dab = artic_distance(a, b);
    if (dab != artic_distance(b, a)) {
      detail = "symmetry violated";
      return false;
    }
    if (dab < -1.0 - 1e-12) {
      detail = "lower bound violated";
      return false;
    }
    worst_self = std::max(worst_self, std::abs(artic_distance(a, a) + 1.0));
  }
  if (worst_self >= 1e-12) {
    detail = "self distance slack " + sci(worst_self);
    return false;
  }
  detail = "10000 pairs, max self-distance slack " + sci(worst_self);
  return true;
}

// --- criterion 2: embedding design ordering --------------------------------

bool criterion_embedding_ordering(std::string& detail, const FeatureTable& table) {
  // Gold embeddings from a hidden nonlinear map over the full 66 dims, with
  // the first layer scaled up so the tanh actually bends.
  const std::size_t gold_dim = 48;
  const auto make_gold = [&](std::uint64_t seed) {
    EmbeddingConfig hidden_cfg{EmbeddingArch::NonLinear, kArticDim, 100, gold_dim, seed};
    auto hidden = init_embedding(hidden_cfg);
    const auto dims = hidden.mlp_dims();
    for (std::size_t i = 0; i < dims.w2_off(); ++i) hidden.flat[i] *= 3.0;
    GoldEmbeddingSet gold;
    for (const auto& e : table.entries()) {
      GoldPair p;
      p.input = Vec(e.vector.all().begin(), e.vector.all().end());
      p.gold = embed(hidden, p.input);
      gold.pairs.push_back(std::move(p));
    }
    return gold;
  };

  const auto train_block = [&](const GoldEmbeddingSet& full, ArticBlock block,
                               EmbeddingArch arch, std::uint64_t seed) {
    GoldEmbeddingSet sub;
    for (const auto& p : full.pairs) {
      GoldPair q;
      ArticulatoryVector v;
      std::copy(p.input.begin(), p.input.end(), v.values.begin());
      q.input = artic_block(v, block);
      q.gold = p.gold;
      sub.pairs.push_back(std::move(q));
    }
    EmbeddingConfig cfg{arch, artic_block_dim(block), 100, gold_dim, seed};
    return train_embedding(cfg, sub, /*epochs=*/1500, /*batch_size=*/32).final_avg_distance;
  };

  std::ostringstream report;
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const auto gold = make_gold(900 + seed);
    const double lin_t = train_block(gold, ArticBlock::Ternary, EmbeddingArch::Linear, seed);
    const double lin_o = train_block(gold, ArticBlock::OneHot, EmbeddingArch::Linear, seed);
    const double lin_c = train_block(gold, ArticBlock::Combined, EmbeddingArch::Linear, seed);
    const double nl_t = train_block(gold, ArticBlock::Ternary, EmbeddingArch::NonLinear, seed);
    const double nl_o = train_block(gold, ArticBlock::OneHot, EmbeddingArch::NonLinear, seed);
    const double nl_c = train_block(gold, ArticBlock::Combined, EmbeddingArch::NonLinear, seed);
    report << "seed " << seed << ": lin(t,o,c)=" << lin_t << "," << lin_o << "," << lin_c
           << " nl(t,o,c)=" << nl_t << "," << nl_o << "," << nl_c << " ";
    const bool ok = nl_c < nl_t && nl_t < lin_t && nl_o < lin_o && nl_c < lin_c;
    if (!ok) {
      detail = "ordering violated: " + report.str();
      return false;
    }
  }
  detail = report.str();
  return true;
}

// --- criterion 3: gradient correctness --------------------------------------

bool criterion_gradients(std::string& detail) {
  Rng rng(5150);
  double worst = 0.0;
  for (int config_idx = 0; config_idx < 20; ++config_idx) {
    // Embedding loss on a <=50-parameter instance.
    {
      const std::size_t in = 2 + rng.below(4);
      const std::size_t hid = 1 + rng.below(3);
      const bool linear = rng.below(2) == 0;
      std::size_t out = 1 + rng.below(3);
      while ((linear ? (in + 1) * out : (in + 1) * hid + (hid + 1) * out) > 50) --out;
      EmbeddingConfig cfg{linear ? EmbeddingArch::Linear : EmbeddingArch::NonLinear, in, hid,
                          out, 3000 + static_cast<std::uint64_t>(config_idx)};
      auto params = init_embedding(cfg);

      GoldEmbeddingSet gold;
      for (int p = 0; p < 4; ++p) {
        GoldPair pair;
        pair.input = random_vec(rng, in, -1.0, 1.0);
        pair.gold = random_vec(rng, out, 0.5, 2.0);  // margins away from |.| kinks
        gold.pairs.push_back(std::move(pair));
      }
      std::vector<const GoldPair*> batch;
      for (const auto& p : gold.pairs) batch.push_back(&p);
      Vec analytic(params.flat.size(), 0.0);
      double loss = 0.0;
      detail::embed_batch_grad(params, batch, analytic, loss);

      auto probe = params;
      Vec fd(params.flat.size());
      for (std::size_t i = 0; i < fd.size(); ++i) {
        const double h = 1e-6;
        probe.flat = params.flat;
        probe.flat[i] += h;
        double hi = 0.0;
        for (const auto& p : gold.pairs) hi += artic_distance(embed(probe, p.input), p.gold);
        probe.flat[i] -= 2 * h;
        double lo = 0.0;
        for (const auto& p : gold.pairs) lo += artic_distance(embed(probe, p.input), p.gold);
        fd[i] = (hi - lo) / (2 * h) / static_cast<double>(gold.pairs.size());
      }
      double diff2 = 0.0, ref2 = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        diff2 += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
        ref2 += fd[i] * fd[i];
      }
      worst = std::max(worst, std::sqrt(diff2 / std::max(ref2, 1e-18)));
    }

    // Toy acoustic loss on a <=50-parameter instance (input slice).
    {
      AcousticConfig cfg;
      cfg.input_dim = 2 + rng.below(3);
      cfg.hidden_dim = 1 + rng.below(4);
      cfg.frame_dim = 1 + rng.below(3);
      while (cfg.dims().total() > 50) --cfg.hidden_dim;
      cfg.seed = 4000 + static_cast<std::uint64_t>(config_idx);
      auto params = init_acoustic(cfg);

      TaskBatch batch;
      for (int s = 0; s < 5; ++s) {
        ArticulatoryVector v;
        for (auto& x : v.values) x = rng.uniform(-1.0, 1.0);
        batch.inputs.push_back(v);
        batch.targets.push_back(random_vec(rng, cfg.frame_dim, -1.0, 1.0));
      }
      const AcousticObjective obj{cfg};
      Vec analytic(params.flat.size(), 0.0);
      obj.add_grad(params.flat, batch, analytic);

      Vec fd(params.flat.size());
      Vec probe = params.flat;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        const double h = 1e-5;
        probe[i] = params.flat[i] + h;
        const double hi = obj.loss(probe, batch);
        probe[i] = params.flat[i] - h;
        const double lo = obj.loss(probe, batch);
        probe[i] = params.flat[i];
        fd[i] = (hi - lo) / (2 * h);
      }
      double diff2 = 0.0, ref2 = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        diff2 += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
        ref2 += fd[i] * fd[i];
      }
      worst = std::max(worst, std::sqrt(diff2 / std::max(ref2, 1e-18)));
    }
  }
  detail = "worst relative error " + sci(worst);
  return worst < 1e-5;
}

// --- criterion 4: MAML meta-gradient ----------------------------------------

struct QuadraticBatch {
  double a = 0.0;
};

struct QuadraticObjective {
  double loss(std::span<const double> th, const QuadraticBatch& b) const {
    return (th[0] - b.a) * (th[0] - b.a);
  }
  double add_grad(std::span<const double> th, const QuadraticBatch& b,
                  std::span<double> g) const {
    g[0] += 2.0 * (th[0] - b.a);
    return loss(th, b);
  }
  void add_hvp(std::span<const double>, const QuadraticBatch&, std::span<const double> v,
               std::span<double> out) const {
    out[0] += 2.0 * v[0];
  }
};

// Small nonlinear model objective: MSE of a 2 -> 3 -> 1 tanh MLP, 13 params.
struct TinyMlpBatch {
  std::vector<Vec> xs;
  Vec ys;
};

struct TinyMlpObjective {
  detail::MlpDims dims{2, 3, 1};

  template <typename T>
  T loss_grad(std::span<const T> th, const TinyMlpBatch& b, std::span<T> grad) const {
    std::vector<T> x(2), hid(3), out(1), dout(1);
    T loss{};
    const double denom = static_cast<double>(b.ys.size());
    for (std::size_t s = 0; s < b.ys.size(); ++s) {
      x[0] = T{b.xs[s][0]};
      x[1] = T{b.xs[s][1]};
      detail::mlp_forward<T>(dims, th, x, std::span(hid), std::span(out));
      const T r = out[0] - T{b.ys[s]};
      loss += r * r;
      dout[0] = T{2.0 / denom} * r;
      if (!grad.empty()) detail::mlp_backward<T>(dims, th, x, hid, dout, grad);
    }
    return loss * T{1.0 / denom};
  }

  double loss(std::span<const double> th, const TinyMlpBatch& b) const {
    return loss_grad<double>(th, b, {});
  }
  double add_grad(std::span<const double> th, const TinyMlpBatch& b,
                  std::span<double> g) const {
    return loss_grad<double>(th, b, g);
  }
  void add_hvp(std::span<const double> th, const TinyMlpBatch& b, std::span<const double> v,
               std::span<double> out) const {
    std::vector<detail::Dual> p(th.size()), g(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) p[i] = {th[i], v[i]};
    loss_grad<detail::Dual>(p, b, g);
    for (std::size_t i = 0; i < th.size(); ++i) out[i] += g[i].dot;
  }
};

bool criterion_maml_meta_gradient(std::string& detail) {
  // (a) quadratic closed form, exact.
  const QuadraticObjective quad;
  const std::vector<double> as{1.0, 2.0, -0.5};
  std::vector<MamlTaskBatches<QuadraticBatch>> quad_tasks;
  for (double a : as) quad_tasks.push_back({{a}, {a}});
  double worst_quad = 0.0;
  for (int d : {1, 2, 3}) {
    for (double theta0 : {0.0, 0.7}) {
      for (double lr : {0.1, 0.25}) {
        Vec theta{theta0}, grad{0.0};
        maml_meta_grad<QuadraticObjective, QuadraticBatch>(quad, theta, quad_tasks, d, lr,
                                                           MamlMode::SecondOrder, grad);
        const double shrink = std::pow(1.0 - 2.0 * lr, 2 * d);
        double expected = 0.0;
        for (double a : as) expected += 2.0 * shrink * (theta0 - a);
        worst_quad = std::max(worst_quad, std::abs(grad[0] - expected));
      }
    }
  }
  if (worst_quad >= 1e-10) {
    detail = "quadratic closed-form error " + sci(worst_quad);
    return false;
  }

  // (b) finite differences on the 13-parameter nonlinear model.
  const TinyMlpObjective tiny;
  Rng rng(606);
  Vec theta(tiny.dims.total());
  for (auto& x : theta) x = rng.uniform(-0.8, 0.8);
  std::vector<MamlTaskBatches<TinyMlpBatch>> tasks;
  for (int t = 0; t < 3; ++t) {
    TinyMlpBatch b;
    for (int s = 0; s < 4; ++s) {
      b.xs.push_back(random_vec(rng, 2, -1.0, 1.0));
      b.ys.push_back(rng.uniform(-1.0, 1.0));
    }
    tasks.push_back({b, b});
  }

  double worst_fd = 0.0;
  for (int d : {1, 2, 3}) {
    Vec analytic(theta.size(), 0.0);
    maml_meta_grad<TinyMlpObjective, TinyMlpBatch>(tiny, theta, tasks, d, 0.1,
                                                   MamlMode::SecondOrder, analytic);
    Vec fd(theta.size());
    Vec probe = theta;
    const auto unrolled = [&](const Vec& th0) {
      double total = 0.0;
      Vec tmp(th0.size());
      for (const auto& task : tasks) {
        Vec th = th0;
        for (int j = 0; j < d; ++j) {
          std::fill(tmp.begin(), tmp.end(), 0.0);
          tiny.add_grad(th, task.inner, tmp);
          for (std::size_t i = 0; i < th.size(); ++i) th[i] -= 0.1 * tmp[i];
        }
        total += tiny.loss(th, task.outer);
      }
      return total;
    };
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double h = 1e-5;
      probe[i] = theta[i] + h;
      const double hi = unrolled(probe);
      probe[i] = theta[i] - h;
      const double lo = unrolled(probe);
      probe[i] = theta[i];
      fd[i] = (hi - lo) / (2 * h);
    }
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      diff2 += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      ref2 += fd[i] * fd[i];
    }
    worst_fd = std::max(worst_fd, std::sqrt(diff2 / std::max(ref2, 1e-18)));
  }
  detail = "closed-form error " + sci(worst_quad) + ", fd relative error " +
           sci(worst_fd);
  return worst_fd < 1e-4;
}

// --- criterion 5: degenerate equivalences -----------------------------------

bool criterion_degenerate_equivalences(std::string& detail, const FeatureTable& table) {
  Rng rng(717);
  AcousticConfig config;
  config.hidden_dim = 6;
  config.frame_dim = 3;

  const auto random_state = [&](std::uint64_t seed) {
    config.seed = seed;
    MetaModelState s = init_meta_state(config);
    for (auto& m : s.adam.m) m = rng.normal() * 0.01;
    for (auto& v : s.adam.v) v = rng.uniform(0.0, 1e-4);
    s.adam.step = static_cast<std::int64_t>(rng.below(20));
    return s;
  };
  const auto random_batches = [&](std::size_t n_tasks) {
    std::vector<TaskBatch> batches;
    for (std::size_t t = 0; t < n_tasks; ++t) {
      TaskBatch b;
      const std::size_t n = 1 + rng.below(6);
      for (std::size_t s = 0; s < n; ++s) {
        b.inputs.push_back(table.entry(rng.below(table.size())).vector);
        b.targets.push_back(random_vec(rng, config.frame_dim, -1.0, 1.0));
      }
      batches.push_back(std::move(b));
    }
    return batches;
  };

  for (int trial = 0; trial < 50; ++trial) {
    const auto batches = random_batches(1 + rng.below(4));
    std::vector<MamlTaskBatches<TaskBatch>> pairs;
    for (const auto& b : batches) pairs.push_back({b, b});

    // maml(d=0) == laml, bit for bit, both modes.
    auto s_laml = random_state(trial);
    auto s_so = s_laml;
    auto s_fo = s_laml;
    laml_step(s_laml, batches, {});
    maml_step(s_so, pairs, 0, 0.01, MamlMode::SecondOrder, {});
    maml_step(s_fo, pairs, 0, 0.01, MamlMode::FirstOrder, {});
    if (s_laml.params.flat != s_so.params.flat || s_laml.params.flat != s_fo.params.flat ||
        s_laml.adam.m != s_so.adam.m || s_laml.adam.v != s_so.adam.v ||
        s_laml.adam.step != s_so.adam.step) {
      detail = "maml(d=0) != laml at trial " + std::to_string(trial);
      return false;
    }

    // laml == one Adam step on the summed objective, bit for bit.
    const AcousticObjective obj{config};
    auto fresh = random_state(1000 + trial);
    const auto batches2 = random_batches(1 + rng.below(4));
    auto fresh_laml = fresh;
    laml_step(fresh_laml, batches2, {});

    Vec grad(fresh.params.flat.size(), 0.0);
    Vec tmp(grad.size());
    for (const auto& b : batches2) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      obj.add_grad(fresh.params.flat, b, tmp);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += tmp[i];
    }
    adam_step(fresh.adam, fresh.params.flat, grad, {});
    if (fresh.params.flat != fresh_laml.params.flat || fresh.adam.m != fresh_laml.adam.m ||
        fresh.adam.v != fresh_laml.adam.v) {
      detail = "laml != direct summed Adam step at trial " + std::to_string(trial);
      return false;
    }
  }
  detail = "50 random states per equivalence";
  return true;
}

// --- criterion 6: Viterbi vs brute force -------------------------------------

bool criterion_viterbi(std::string& detail) {
  Rng rng(321);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t phonemes = 1 + rng.below(6);
    const std::size_t frames = phonemes + rng.below(8 - phonemes + 1);
    Matrix m(frames, phonemes);
    for (auto& x : m.data) x = rng.uniform(0.01, 1.0);
    const AttentionMap map(std::move(m));
    const auto dp = monotonic_viterbi_scored(map);
    const auto oracle = brute_force_align_scored(map);
    if (dp.log_score != oracle.log_score || dp.durations != oracle.durations) {
      detail = "mismatch at iter " + std::to_string(iter);
      return false;
    }
  }
  // All-ties maps exercise the tie-breaking rule.
  for (std::size_t phonemes = 1; phonemes <= 6; ++phonemes) {
    for (std::size_t frames = phonemes; frames <= 8; ++frames) {
      Matrix m(frames, phonemes, 0.25);
      const AttentionMap map(std::move(m));
      const auto dp = monotonic_viterbi_scored(map);
      const auto oracle = brute_force_align_scored(map);
      if (dp.durations != oracle.durations || dp.log_score != oracle.log_score) {
        detail = "tie-break mismatch at " + std::to_string(frames) + "x" +
                 std::to_string(phonemes);
        return false;
      }
    }
  }
  detail = "500 random maps + 33 all-ties maps";
  return true;
}

// --- criterion 7: low-resource adaptation ------------------------------------

bool criterion_low_resource(std::string& detail, const FeatureTable& table) {
  std::ostringstream report;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    MetaTrainConfig config;
    config.model.hidden_dim = 24;
    config.model.frame_dim = 6;
    config.model.seed = seed;
    config.family.base_seed = 5555;
    config.family.frame_dim = 6;
    config.steps = 1200;
    config.batch_size = 12;
    config.seed = seed;
    const auto tasks = make_synthetic_tasks(table, 5, 20, 0.005, seed);
    const auto meta = meta_train(config, table, tasks, MetaProcedure::LAML);

    TaskSpec unseen;
    unseen.task_id = 100;
    unseen.seed = derive_seed(seed, 0xFEED);
    unseen.noise_level = 0.005;
    unseen.inventory = make_synthetic_tasks(table, 1, 20, 0.005, seed + 80)[0].inventory;
    const TaskGenerator gen(config.family, unseen);
    Rng corpus_rng(derive_seed(seed, 0xCC));
    std::vector<TaskBatch> corpus;
    for (int i = 0; i < 6; ++i)
      corpus.push_back(sample_task_batch(gen, unseen, table, 12, corpus_rng));

    AcousticConfig fresh = config.model;
    fresh.seed = seed + 7000;
    const MetaModelState random_start = init_meta_state(fresh);

    const double eps = 0.05;
    const std::size_t max_steps = 3000;
    const auto steps_to = [&](const MetaModelState& start) -> std::size_t {
      const auto result = finetune(start, corpus, max_steps, {}, 0);
      for (std::size_t i = 0; i < result.loss_log.size(); ++i)
        if (result.loss_log[i] <= eps) return i + 1;
      return max_steps + 1;
    };
    const std::size_t from_meta = steps_to(meta.state);
    const std::size_t from_random = steps_to(random_start);
    report << "seed " << seed << ": meta " << from_meta << " vs random " << from_random << "; ";
    if (!(from_meta < from_random)) {
      detail = "not strictly faster: " + report.str();
      return false;
    }
  }
  detail = report.str();
  return true;
}

// --- criterion 8: zero-shot analogue ------------------------------------------

bool criterion_zero_shot(std::string& detail, const FeatureTable& table) {
  const std::string heldout = "ø";
  int passes = 0;
  std::ostringstream report;
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    MetaTrainConfig config;
    config.model.hidden_dim = 24;
    config.model.frame_dim = 6;
    config.model.seed = seed;
    config.family.base_seed = 777;
    config.family.frame_dim = 6;
    config.family.offset_scale = 0.2;
    config.steps = 1200;
    config.batch_size = 12;
    config.seed = seed;
    const auto tasks = make_synthetic_tasks(table, 5, 24, 0.005, seed, {heldout});
    const auto meta = meta_train(config, table, tasks, MetaProcedure::LAML);

    TaskSpec unseen;
    unseen.task_id = 55;
    unseen.seed = derive_seed(seed, 0xE0);
    unseen.noise_level = 0.005;
    unseen.inventory = make_synthetic_tasks(table, 1, 24, 0.005, seed + 60)[0].inventory;
    unseen.inventory.push_back(nfd_utf8(heldout));
    const TaskGenerator gen(config.family, unseen);

    const auto& held_vec = table.entry(table.row_of(heldout)).vector;
    const Vec true_target = gen.target(held_vec);
    const auto zero_shot_out =
        acoustic_forward(meta.state.params, std::span(&held_vec, 1)).front();
    const double gap0 = mse(zero_shot_out, true_target);

    std::size_t closer = 0, total = 0;
    for (const auto& e : table.entries()) {
      if (e.symbol == nfd_utf8(heldout)) continue;
      if (e.vector.values == held_vec.values) continue;
      ++total;
      if (gap0 < mse(zero_shot_out, gen.target(e.vector))) ++closer;
    }
    const double frac = static_cast<double>(closer) / static_cast<double>(total);

    Rng corpus_rng(derive_seed(seed, 0xCF));
    std::vector<TaskBatch> corpus;
    for (int i = 0; i < 5; ++i)
      corpus.push_back(sample_task_batch(gen, unseen, table, 12, corpus_rng));
    const auto adapted = finetune(meta.state, corpus, 100, {}, 0);
    const auto adapted_out =
        acoustic_forward(adapted.params, std::span(&held_vec, 1)).front();
    const double gap1 = mse(adapted_out, true_target);

    const bool ok = frac >= 0.9 && gap1 <= 0.5 * gap0;
    if (ok) ++passes;
    report << "seed " << seed << ": closer-frac " << frac << ", gap " << gap0 << " -> " << gap1
           << (ok ? " ok; " : " FAIL; ");
  }
  detail = report.str();
  return passes >= 2;
}

// --- criterion 9: CLI determinism ---------------------------------------------

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& cli, const std::string& args, const fs::path& stdout_path) {
  const std::string cmd = cli + " " + args + " > " + stdout_path.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(stdout_path.string());
  return r;
}

bool criterion_cli_determinism(std::string& detail, const std::string& cli,
                               const std::string& table_path, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string table_arg = " --table " + table_path;

  // Inputs shared by both passes.
  {
    std::ofstream att(work / "att.tsv");
    att << "0.7\t0.2\t0.1\n0.5\t0.4\t0.1\n0.2\t0.6\t0.2\n0.1\t0.2\t0.7\n";
    std::ofstream gold(work / "gold.tsv");
    gold << "p\t1.0\t0.25\na\t-0.5\t1.5\nm\t0.75\t-1.0\nk\t0.1\t0.9\n";
  }

  std::vector<std::pair<std::string, std::string>> commands = {
      {"featurize", "featurize" + table_arg + " --text \"pat͡sa\" --out OUT"},
      {"align", "align --attention " + (work / "att.tsv").string() + " --out OUT"},
      {"embed-train", "embed-train" + table_arg + " --gold " + (work / "gold.tsv").string() +
                          " --epochs 40 --batch 2 --hidden 6 --seed 11 --out OUT"},
      {"meta-train", "meta-train" + table_arg +
                         " --steps 40 --tasks 3 --inventory-size 10 --batch 6 --seed 12 "
                         "--unseen-corpus-out corpus.tsv --unseen-lines 6 --unseen-symbols 8 "
                         "--out OUT"},
  };

  // Two passes per command with identical argv apart from --out. Dependent
  // commands read the first pass's meta outputs in both passes so their
  // inputs (and echoed configs) are bytewise identical.
  const fs::path meta_dir = work / "meta-train_0";
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [name, arg_template] : commands) {
      const fs::path out_dir = work / (name + "_" + std::to_string(pass));
      std::string args = arg_template;
      args.replace(args.find("OUT"), 3, out_dir.string());
      const auto r = run_cli(cli, args, work / (name + "_stdout_" + std::to_string(pass)));
      if (r.exit_code != 0) {
        detail = name + " exited " + std::to_string(r.exit_code);
        return false;
      }
    }
    const auto ft = run_cli(cli,
                            "finetune" + table_arg + " --meta " + (meta_dir / "meta.ck").string() +
                                " --corpus " + (meta_dir / "corpus.tsv").string() +
                                " --steps 30 --out " + (work / ("ft_" + std::to_string(pass))).string(),
                            work / ("ft_stdout_" + std::to_string(pass)));
    if (ft.exit_code != 0) {
      detail = "finetune exited " + std::to_string(ft.exit_code);
      return false;
    }
    const auto an = run_cli(cli,
                            "analyze" + table_arg + " --model " + (meta_dir / "meta.ck").string() +
                                " --heldout ø --k 4 --out " +
                                (work / ("an_" + std::to_string(pass))).string(),
                            work / ("an_stdout_" + std::to_string(pass)));
    if (an.exit_code != 0) {
      detail = "analyze exited " + std::to_string(an.exit_code);
      return false;
    }
  }

  std::vector<std::string> out_names;
  for (const auto& [name, _] : commands) out_names.push_back(name);
  out_names.push_back("ft");
  out_names.push_back("an");
  for (const auto& name : out_names) {
    const auto m0 = slurp((work / (name + "_0") / "manifest.tsv").string());
    const auto m1 = slurp((work / (name + "_1") / "manifest.tsv").string());
    if (m0.empty() || m0 != m1) {
      detail = "manifest mismatch for " + name;
      return false;
    }
    const auto s0 = slurp((work / (name + "_stdout_0")).string());
    const auto s1 = slurp((work / (name + "_stdout_1")).string());
    if (s0 != s1) {
      detail = "stdout mismatch for " + name;
      return false;
    }
  }
  detail = "6 commands, byte-identical manifests and stdout";
  return true;
}

// --- criterion 10: frontend integrity -----------------------------------------

bool criterion_frontend(std::string& detail, const FeatureTable& table) {
  for (const auto& e : table.entries()) {
    try {
      FeatureTable::validate_vector(e.symbol, e.vector);
    } catch (const std::exception& ex) {
      detail = "invariant violated for '" + e.symbol + "': " + ex.what();
      return false;
    }
  }
  Rng rng(997);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string utterance;
    const std::size_t len = 1 + rng.below(16);
    for (std::size_t i = 0; i < len; ++i) {
      utterance += table.entry(rng.below(table.size())).symbol;
      if (rng.below(8) == 0) utterance += ' ';
    }
    const auto first = segment_ipa(utterance, table);
    std::string rebuilt;
    for (const auto& s : first) rebuilt += s.symbol;
    const auto second = segment_ipa(rebuilt, table);
    if (first.size() != second.size()) {
      detail = "round-trip length mismatch at iter " + std::to_string(iter);
      return false;
    }
    for (std::size_t i = 0; i < first.size(); ++i)
      if (first[i].table_row != second[i].table_row) {
        detail = "round-trip row mismatch at iter " + std::to_string(iter);
        return false;
      }
  }
  detail = std::to_string(table.size()) + " entries validated, 1000 fuzz utterances";
  return true;
}

}  // namespace

int main() {
  const std::string table_path = std::string(CROSSVOX_DATA_DIR) + "/feature_table.tsv";
  const std::string cli = CROSSVOX_CLI_PATH;
  const fs::path work = fs::temp_directory_path() / "crossvox_acceptance";

  FeatureTable table;
  try {
    table = load_feature_table(table_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load bundled table: %s\n", e.what());
    return 10;
  }

  Harness h;
  h.run("distance-properties", 5.0, [&](std::string& d) {
    return criterion_distance_properties(d);
  });
  h.run("embedding-design-ordering", 300.0, [&](std::string& d) {
    return criterion_embedding_ordering(d, table);
  });
  h.run("gradient-correctness", 30.0, [&](std::string& d) { return criterion_gradients(d); });
  h.run("maml-meta-gradient", 60.0, [&](std::string& d) {
    return criterion_maml_meta_gradient(d);
  });
  h.run("degenerate-equivalences", 10.0, [&](std::string& d) {
    return criterion_degenerate_equivalences(d, table);
  });
  h.run("viterbi-vs-brute-force", 10.0, [&](std::string& d) { return criterion_viterbi(d); });
  h.run("low-resource-adaptation", 300.0, [&](std::string& d) {
    return criterion_low_resource(d, table);
  });
  h.run("zero-shot-analogue", 300.0, [&](std::string& d) {
    return criterion_zero_shot(d, table);
  });
  h.run("cli-determinism", 120.0, [&](std::string& d) {
    return criterion_cli_determinism(d, cli, table_path, work);
  });
  h.run("frontend-integrity", 10.0, [&](std::string& d) {
    return criterion_frontend(d, table);
  });

  std::printf("%d/%d criteria passed\n", h.index - h.failures, h.index);
  return h.failures;
}
