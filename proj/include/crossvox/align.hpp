#ifndef CROSSVOX_ALIGN_HPP
#define CROSSVOX_ALIGN_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "crossvox/artic.hpp"
#include "crossvox/checkpoint.hpp"
#include "crossvox/core.hpp"
#include "crossvox/detail/format.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

// Duration extraction: the most probable monotonic path through a soft
// attention map. Each frame selects exactly one phoneme; transitions may
// stay or advance by one; the path starts at the first phoneme and ends at
// the last. Scores are products of attention values (sums of logs, with
// log 0 = -inf).

struct AttentionMap {
  Matrix att;  // frames x phonemes, non-negative

  AttentionMap() = default;
  explicit AttentionMap(Matrix m) : att(std::move(m)) { validate(); }

  std::size_t frames() const { return att.rows; }
  std::size_t phonemes() const { return att.cols; }

  void validate() const {
    if (att.rows == 0 || att.cols == 0) throw ParseError("attention map must be non-empty");
    for (std::size_t t = 0; t < att.rows; ++t) {
      bool positive = false;
      for (std::size_t n = 0; n < att.cols; ++n) {
        const double x = att(t, n);
        if (!(x >= 0.0) || !std::isfinite(x))
          throw ParseError("attention entries must be non-negative and finite");
        if (x > 0.0) positive = true;
      }
      if (!positive) throw ParseError("attention row " + std::to_string(t) + " is all zero");
    }
  }
};

// Frames per phoneme; every phoneme gets at least one frame and the
// durations sum to the frame count.
using DurationSequence = std::vector<std::size_t>;

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_or_neginf(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// Cell (t, n) can lie on a monotonic path with pinned endpoints iff the
// phoneme index fits both the frames consumed and the frames remaining.
inline bool feasible(std::size_t t, std::size_t n, std::size_t frames, std::size_t phonemes) {
  return n <= t && phonemes - 1 - n <= frames - 1 - t;
}

// First frame whose feasible window offers no usable (positive, reachable)
// cell; identifies where a degenerate map blocks every monotonic path.
inline std::size_t first_blocked_frame(const AttentionMap& map) {
  const std::size_t frames = map.frames(), phonemes = map.phonemes();
  std::vector<bool> frontier(phonemes, false), next(phonemes, false);
  frontier[0] = feasible(0, 0, frames, phonemes) && map.att(0, 0) > 0.0;
  if (!frontier[0]) return 0;
  for (std::size_t t = 1; t < frames; ++t) {
    bool any = false;
    for (std::size_t n = 0; n < phonemes; ++n) {
      next[n] = feasible(t, n, frames, phonemes) && map.att(t, n) > 0.0 &&
                (frontier[n] || (n > 0 && frontier[n - 1]));
      any = any || next[n];
    }
    if (!any) return t;
    std::swap(frontier, next);
  }
  return frames - 1;
}

inline DurationSequence path_to_durations(const std::vector<std::size_t>& path,
                                          std::size_t phonemes) {
  DurationSequence durations(phonemes, 0);
  for (std::size_t n : path) durations[n] += 1;
  return durations;
}

// Canonical path score: log attention summed in ascending frame order, so
// the dynamic program and the exhaustive oracle report bit-identical scores
// for identical paths regardless of their internal accumulation order.
inline double path_log_score(const AttentionMap& map, const std::vector<std::size_t>& path) {
  double score = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) score += log_or_neginf(map.att(t, path[t]));
  return score;
}

}  // namespace detail

struct AlignResult {
  DurationSequence durations;
  double log_score = 0.0;
};

// O(frames x phonemes) dynamic program. Ties are broken toward the
// lexicographically largest duration sequence: earlier phonemes keep frames
// as long as an equally good completion exists.
inline AlignResult monotonic_viterbi_scored(const AttentionMap& map) {
  map.validate();
  const std::size_t frames = map.frames(), phonemes = map.phonemes();
  if (frames < phonemes) throw TooFewFramesError(frames, phonemes);

  // best[t][n]: best log-score of a path suffix from (t, n) to the end.
  Matrix best(frames, phonemes, detail::kNegInf);
  for (std::size_t n = 0; n < phonemes; ++n)
    if (detail::feasible(frames - 1, n, frames, phonemes))
      best(frames - 1, n) = detail::log_or_neginf(map.att(frames - 1, n));
  for (std::size_t t = frames - 1; t-- > 0;)
    for (std::size_t n = 0; n < phonemes; ++n) {
      if (!detail::feasible(t, n, frames, phonemes)) continue;
      const double stay = best(t + 1, n);
      const double advance = n + 1 < phonemes ? best(t + 1, n + 1) : detail::kNegInf;
      const double cont = std::max(stay, advance);
      if (cont == detail::kNegInf) continue;
      best(t, n) = detail::log_or_neginf(map.att(t, n)) + cont;
    }

  if (best(0, 0) == detail::kNegInf) throw DegenerateRowError(detail::first_blocked_frame(map));

  std::vector<std::size_t> path;
  path.reserve(frames);
  std::size_t n = 0;
  path.push_back(n);
  for (std::size_t t = 0; t + 1 < frames; ++t) {
    const double stay = best(t + 1, n);
    const double advance = n + 1 < phonemes ? best(t + 1, n + 1) : detail::kNegInf;
    if (advance > stay) ++n;  // on ties, stay: longer durations for earlier phonemes
    path.push_back(n);
  }
  return AlignResult{detail::path_to_durations(path, phonemes),
                     detail::path_log_score(map, path)};
}

inline DurationSequence monotonic_viterbi(const AttentionMap& map) {
  return monotonic_viterbi_scored(map).durations;
}

inline constexpr std::size_t kBruteForceMaxFrames = 8;
inline constexpr std::size_t kBruteForceMaxPhonemes = 6;

// Exhaustive oracle: enumerates every monotonic path and keeps the best
// score, breaking ties by lexicographically largest duration sequence --
// the same rule as the dynamic program.
inline AlignResult brute_force_align_scored(const AttentionMap& map) {
  map.validate();
  const std::size_t frames = map.frames(), phonemes = map.phonemes();
  if (frames < phonemes) throw TooFewFramesError(frames, phonemes);
  if (frames > kBruteForceMaxFrames || phonemes > kBruteForceMaxPhonemes)
    throw InstanceTooLargeError(frames, phonemes);

  Matrix logs(frames, phonemes);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t n = 0; n < phonemes; ++n) logs(t, n) = detail::log_or_neginf(map.att(t, n));

  bool found = false;
  double best_score = detail::kNegInf;
  DurationSequence best_durations;
  std::vector<std::size_t> path(frames);

  const auto consider = [&]() {
    const double score = detail::path_log_score(map, path);
    if (score == detail::kNegInf) return;
    auto durations = detail::path_to_durations(path, phonemes);
    if (!found || score > best_score || (score == best_score && durations > best_durations)) {
      found = true;
      best_score = score;
      best_durations = std::move(durations);
    }
  };

  const auto recurse = [&](auto&& self, std::size_t t, std::size_t n, double score) -> void {
    if (score == detail::kNegInf) return;  // dead prefix, no need to extend
    if (t == frames) {
      if (n == phonemes) consider();
      return;
    }
    // Stay on phoneme n - 1 (path[t - 1] == n - 1) or advance to n.
    path[t] = n - 1;
    self(self, t + 1, n, score + logs(t, n - 1));
    if (n < phonemes) {
      path[t] = n;
      self(self, t + 1, n + 1, score + logs(t, n));
    }
  };
  path[0] = 0;
  recurse(recurse, 1, 1, logs(0, 0));

  if (!found) throw DegenerateRowError(detail::first_blocked_frame(map));
  return AlignResult{best_durations, best_score};
}

inline DurationSequence brute_force_align(const AttentionMap& map) {
  return brute_force_align_scored(map).durations;
}

// Diagonal attention prior: mean over all cells of att[t,n] * W[t,n] with
// W[t,n] = 1 - exp(-(n/N - t/T)^2 / (2 g^2)). Rows must be stochastic.
inline double guided_attention_loss(const AttentionMap& map, double g = 0.2) {
  map.validate();
  if (g <= 0.0) throw ParseError("guided attention width g must be > 0");
  const std::size_t frames = map.frames(), phonemes = map.phonemes();
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (std::size_t n = 0; n < phonemes; ++n) sum += map.att(t, n);
    if (std::abs(sum - 1.0) > 1e-6) throw NonStochasticRowError(t, sum);
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t n = 0; n < phonemes; ++n) {
      const double delta = static_cast<double>(n) / static_cast<double>(phonemes) -
                           static_cast<double>(t) / static_cast<double>(frames);
      const double w = 1.0 - std::exp(-delta * delta / (2.0 * g * g));
      loss += map.att(t, n) * w;
    }
  return loss / static_cast<double>(frames * phonemes);
}

// ---------------------------------------------------------------------------
// Attention map IO: TSV matrices (rows = frames) and the binary tensor
// container used for checkpoints.

inline AttentionMap load_attention_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  std::vector<Vec> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = detail::split_tsv(line);
    Vec row;
    row.reserve(cols.size());
    for (const auto& c : cols) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw MalformedRowError(line_no, "bad float '" + c + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw MalformedRowError(line_no, "ragged attention matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("attention file '" + path + "' is empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t t = 0; t < m.rows; ++t)
    for (std::size_t n = 0; n < m.cols; ++n) m(t, n) = rows[t][n];
  return AttentionMap(std::move(m));
}

inline void save_attention_tsv(const AttentionMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t t = 0; t < map.frames(); ++t) {
    for (std::size_t n = 0; n < map.phonemes(); ++n) {
      if (n) out << '\t';
      out << detail::format_double(map.att(t, n));
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

inline AttentionMap attention_from_checkpoint(const Checkpoint& ck) {
  const auto& t = ck.get("attention");
  if (t.shape.size() != 2) throw ParseError("attention tensor must be 2-dimensional");
  Matrix m(static_cast<std::size_t>(t.shape[0]), static_cast<std::size_t>(t.shape[1]));
  m.data = t.data;
  return AttentionMap(std::move(m));
}

inline Checkpoint attention_to_checkpoint(const AttentionMap& map) {
  Checkpoint ck;
  ck.put("attention", {map.frames(), map.phonemes()}, map.att.data);
  return ck;
}

}  // namespace crossvox

#endif  // CROSSVOX_ALIGN_HPP
