#ifndef CROSSVOX_ANALYSIS_HPP
#define CROSSVOX_ANALYSIS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "crossvox/artic.hpp"
#include "crossvox/core.hpp"
#include "crossvox/detail/format.hpp"
#include "crossvox/embedding.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_dim(a.size(), b.size());
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVectorError();
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

struct SimilarityPoint {
  std::int64_t step = 0;
  double similarity = 0.0;
};

using SimilarityCurve = std::vector<SimilarityPoint>;

// Evaluates a speaker-proxy probe on each checkpointed parameter set and
// tracks its cosine similarity to a reference vector over training steps.
template <typename Params, typename Probe>
SimilarityCurve similarity_curve(const std::vector<std::pair<std::int64_t, Params>>& checkpoints,
                                 Probe&& probe, std::span<const double> reference) {
  if (checkpoints.empty()) throw EmptyBatchError();
  SimilarityCurve curve;
  curve.reserve(checkpoints.size());
  for (const auto& [step, params] : checkpoints) {
    const Vec v = probe(params);
    curve.push_back(SimilarityPoint{step, cosine_similarity(v, reference)});
  }
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].step <= curve[i - 1].step)
      throw ParseError("checkpoint steps must be strictly increasing");
  return curve;
}

struct NeighborEntry {
  std::string symbol;
  double distance = 0.0;
};

struct ZeroShotReport {
  std::string heldout_symbol;
  std::vector<NeighborEntry> artic_neighbors;  // in raw 66-dim space
  std::vector<NeighborEntry> model_neighbors;  // in model output space
  bool collapse = false;
};

inline constexpr double kDefaultCollapseTolerance = 0.05;

// Nearest neighbors of each held-out symbol among the seen symbols, by the
// L1-minus-cosine distance, in articulatory space and in the model's output
// space. The collapse flag fires when the held-out embedding sits
// essentially on top of its nearest seen neighbor: since the distance has
// minimum -1, the nearest/second-nearest ratio test uses distances shifted
// by +1 so both sides are non-negative.
template <typename ModelFn>
std::vector<ZeroShotReport> zero_shot_report(const FeatureTable& table,
                                             const std::vector<std::string>& heldout,
                                             ModelFn&& model, std::size_t k,
                                             double collapse_tolerance = kDefaultCollapseTolerance) {
  if (k == 0) throw ParseError("k must be >= 1");
  std::set<std::size_t> heldout_rows;
  for (const auto& symbol : heldout) {
    const std::string key = nfd_utf8(symbol);
    if (!table.contains(key)) throw HeldoutNotInTableError(symbol);
    heldout_rows.insert(table.row_of(key));
  }

  std::vector<std::size_t> seen_rows;
  for (std::size_t r = 0; r < table.size(); ++r)
    if (!heldout_rows.count(r)) seen_rows.push_back(r);

  const auto neighbors = [&](const Vec& query, auto&& space_of) {
    std::vector<NeighborEntry> all;
    all.reserve(seen_rows.size());
    for (std::size_t r : seen_rows) {
      const Vec other = space_of(r);
      all.push_back(NeighborEntry{table.entry(r).symbol, artic_distance(query, other)});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const NeighborEntry& a, const NeighborEntry& b) {
                       return a.distance < b.distance;
                     });
    return all;
  };

  std::vector<ZeroShotReport> reports;
  for (std::size_t row : heldout_rows) {
    ZeroShotReport report;
    report.heldout_symbol = table.entry(row).symbol;

    const auto& held_vec = table.entry(row).vector;
    const Vec artic_query(held_vec.all().begin(), held_vec.all().end());
    auto artic_all = neighbors(artic_query, [&](std::size_t r) {
      const auto& v = table.entry(r).vector;
      return Vec(v.all().begin(), v.all().end());
    });

    const Vec model_query = model(held_vec);
    auto model_all = neighbors(model_query, [&](std::size_t r) { return model(table.entry(r).vector); });

    if (model_all.size() >= 2) {
      const double d1 = model_all[0].distance + 1.0;
      const double d2 = model_all[1].distance + 1.0;
      report.collapse = d1 < collapse_tolerance * d2;
    } else if (model_all.size() == 1) {
      report.collapse = model_all[0].distance + 1.0 < collapse_tolerance;
    }

    const std::size_t take = std::min(k, artic_all.size());
    report.artic_neighbors.assign(artic_all.begin(), artic_all.begin() + take);
    report.model_neighbors.assign(model_all.begin(), model_all.begin() + take);
    reports.push_back(std::move(report));
  }
  return reports;
}

namespace detail {

inline const char* category_name(PhonemeCategory c) {
  switch (c) {
    case PhonemeCategory::Vowel: return "vowel";
    case PhonemeCategory::Consonant: return "consonant";
    default: return "special";
  }
}

}  // namespace detail

// TSV export of per-symbol model outputs for external projection tools:
// symbol, category tag (held-out symbols are tagged "unseen"), components.
// Deterministic: table order, shortest round-trip float formatting.
template <typename ModelFn>
void export_embeddings(const FeatureTable& table, ModelFn&& model, const std::string& path,
                       const std::vector<std::string>& heldout = {}) {
  std::set<std::size_t> heldout_rows;
  for (const auto& symbol : heldout) {
    const std::string key = nfd_utf8(symbol);
    if (!table.contains(key)) throw HeldoutNotInTableError(symbol);
    heldout_rows.insert(table.row_of(key));
  }
  std::vector<Vec> outputs;
  outputs.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) outputs.push_back(model(table.entry(r).vector));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "symbol\tcategory";
  if (!outputs.empty())
    for (std::size_t i = 0; i < outputs.front().size(); ++i) out << "\te" << i;
  out << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& entry = table.entry(r);
    out << entry.symbol << '\t'
        << (heldout_rows.count(r) ? "unseen" : detail::category_name(table.category(r)));
    for (double x : outputs[r]) out << '\t' << detail::format_double(x);
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

inline void save_similarity_curve(const SimilarityCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "step\tsimilarity\n";
  for (const auto& p : curve)
    out << p.step << '\t' << detail::format_double(p.similarity) << '\n';
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace crossvox

#endif  // CROSSVOX_ANALYSIS_HPP
