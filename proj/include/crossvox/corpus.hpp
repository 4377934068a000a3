#ifndef CROSSVOX_CORPUS_HPP
#define CROSSVOX_CORPUS_HPP

#include <fstream>
#include <string>
#include <vector>

#include "crossvox/acoustic.hpp"
#include "crossvox/artic.hpp"
#include "crossvox/core.hpp"
#include "crossvox/detail/format.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

// Line-delimited corpus: task id, IPA string, then one frame of decimal
// floats per phoneme (frame_dim values each), all tab-separated. One line is
// one utterance.
struct CorpusLine {
  int task_id = 0;
  std::string ipa;
  std::vector<Vec> targets;
};

inline TaskBatch corpus_line_to_batch(const CorpusLine& line, const FeatureTable& table,
                                      const FrontendOptions& opts = {}) {
  TaskBatch batch;
  batch.task_id = line.task_id;
  batch.inputs = featurize_utterance(line.ipa, table, opts);
  if (batch.inputs.size() != line.targets.size())
    throw ParseError("corpus line '" + line.ipa + "': " + std::to_string(batch.inputs.size()) +
                     " phonemes but " + std::to_string(line.targets.size()) + " target frames");
  batch.targets = line.targets;
  return batch;
}

inline std::vector<CorpusLine> load_corpus(const std::string& path, std::size_t frame_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  std::vector<CorpusLine> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '#') continue;
    const auto cols = detail::split_tsv(raw);
    if (cols.size() < 2) throw MalformedRowError(line_no, "expected task id, ipa, frames");
    CorpusLine line;
    try {
      line.task_id = std::stoi(cols[0]);
    } catch (const std::exception&) {
      throw MalformedRowError(line_no, "bad task id '" + cols[0] + "'");
    }
    line.ipa = cols[1];
    const std::size_t n_floats = cols.size() - 2;
    if (frame_dim == 0 || n_floats % frame_dim != 0)
      throw MalformedRowError(line_no, "frame values (" + std::to_string(n_floats) +
                                           ") not divisible by frame dim " +
                                           std::to_string(frame_dim));
    for (std::size_t f = 0; f < n_floats / frame_dim; ++f) {
      Vec frame(frame_dim);
      for (std::size_t k = 0; k < frame_dim; ++k) {
        const auto& c = cols[2 + f * frame_dim + k];
        try {
          frame[k] = std::stod(c);
        } catch (const std::exception&) {
          throw MalformedRowError(line_no, "bad float '" + c + "'");
        }
      }
      line.targets.push_back(std::move(frame));
    }
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw IoError("corpus file '" + path + "' is empty");
  return lines;
}

inline void save_corpus(const std::vector<CorpusLine>& lines, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& line : lines) {
    out << line.task_id << '\t' << line.ipa;
    for (const auto& frame : line.targets)
      for (double x : frame) out << '\t' << detail::format_double(x);
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

// Synthesizes utterances for one task: random symbol sequences from the
// task's inventory with targets from its generator.
inline std::vector<CorpusLine> make_corpus(const TaskGenerator& gen, const TaskSpec& spec,
                                           const FeatureTable& table, std::size_t n_lines,
                                           std::size_t symbols_per_line, Rng& rng) {
  spec.validate();
  std::vector<CorpusLine> lines;
  lines.reserve(n_lines);
  for (std::size_t i = 0; i < n_lines; ++i) {
    CorpusLine line;
    line.task_id = spec.task_id;
    for (std::size_t s = 0; s < symbols_per_line; ++s) {
      const auto& symbol = spec.inventory[rng.below(spec.inventory.size())];
      line.ipa += symbol;
      line.targets.push_back(gen.noisy_target(table.entry(table.row_of(symbol)).vector, rng));
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace crossvox

#endif  // CROSSVOX_CORPUS_HPP
