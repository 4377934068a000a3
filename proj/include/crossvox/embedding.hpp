#ifndef CROSSVOX_EMBEDDING_HPP
#define CROSSVOX_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "crossvox/adam.hpp"
#include "crossvox/artic.hpp"
#include "crossvox/checkpoint.hpp"
#include "crossvox/core.hpp"
#include "crossvox/detail/mlp.hpp"
#include "crossvox/errors.hpp"
#include "crossvox/rng.hpp"

namespace crossvox {

// Projections from articulatory space into a gold embedding space, trained
// with the combined L1-minus-cosine distance as the objective.

enum class EmbeddingArch { Linear, NonLinear };

struct EmbeddingConfig {
  EmbeddingArch arch = EmbeddingArch::NonLinear;
  std::size_t input_dim = kArticDim;  // 66, or 24/42 for block ablations
  std::size_t hidden_dim = 100;
  std::size_t output_dim = 512;
  std::uint64_t seed = 0;

  void validate() const {
    if (input_dim == 0 || output_dim == 0)
      throw ParseError("embedding dims must be positive");
    if (arch == EmbeddingArch::NonLinear && hidden_dim == 0)
      throw ParseError("nonlinear embedding requires hidden_dim >= 1");
  }
};

struct EmbeddingParams {
  EmbeddingConfig config;
  Vec flat;  // affine [W, b] or MLP [W1, b1, W2, b2], see detail/mlp.hpp

  detail::AffineDims affine_dims() const {
    return {config.input_dim, config.output_dim};
  }
  detail::MlpDims mlp_dims() const {
    return {config.input_dim, config.hidden_dim, config.output_dim};
  }
  std::size_t param_count() const {
    return config.arch == EmbeddingArch::Linear ? affine_dims().total() : mlp_dims().total();
  }
};

inline EmbeddingParams init_embedding(const EmbeddingConfig& config) {
  config.validate();
  EmbeddingParams p;
  p.config = config;
  Rng rng(derive_seed(config.seed, /*stream=*/0x0E));
  if (config.arch == EmbeddingArch::Linear) {
    const auto d = detail::AffineDims{config.input_dim, config.output_dim};
    p.flat.assign(d.total(), 0.0);
    detail::init_layer(rng, std::span(p.flat).subspan(0, d.total()), config.input_dim);
  } else {
    const auto d = detail::MlpDims{config.input_dim, config.hidden_dim, config.output_dim};
    p.flat.assign(d.total(), 0.0);
    detail::init_layer(rng, std::span(p.flat).subspan(0, d.w2_off()), config.input_dim);
    detail::init_layer(rng, std::span(p.flat).subspan(d.w2_off()), config.hidden_dim);
  }
  return p;
}

inline Vec embed(const EmbeddingParams& params, std::span<const double> v) {
  require_dim(params.config.input_dim, v.size());
  Vec out(params.config.output_dim);
  if (params.config.arch == EmbeddingArch::Linear) {
    detail::affine_forward<double>(params.affine_dims(), params.flat, v, out);
  } else {
    Vec hid(params.config.hidden_dim);
    detail::mlp_forward<double>(params.mlp_dims(), params.flat, v, std::span(hid), std::span(out));
  }
  return out;
}

// d(A, B) = sum_i |A_i - B_i|  -  (A . B) / (|A| |B|)
// The L1 term is a sum over dimensions, not a mean. Minimum is -1, attained
// exactly when A == B.
inline double artic_distance(std::span<const double> a, std::span<const double> b) {
  require_dim(a.size(), b.size());
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVectorError();
  return l1 - dot(a, b) / (na * nb);
}

namespace detail {

// Gradient of artic_distance(a, b) w.r.t. a, accumulated into da.
// d/da_i = sign(a_i - b_i) - b_i/(|a||b|) + (a.b) a_i / (|a|^3 |b|)
inline void artic_distance_grad_a(std::span<const double> a, std::span<const double> b,
                                  std::span<double> da) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVectorError();
  const double ab = dot(a, b);
  const double inv = 1.0 / (na * nb);
  const double proj = ab / (na * na * na * nb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    da[i] += sgn - b[i] * inv + proj * a[i];
  }
}

}  // namespace detail

struct GoldPair {
  Vec input;  // articulatory vector or sub-block
  Vec gold;   // target embedding
};

struct GoldEmbeddingSet {
  std::vector<GoldPair> pairs;
  std::string source;

  void validate() const {
    if (pairs.empty()) throw EmptyBatchError();
    const std::size_t gold_dim = pairs.front().gold.size();
    for (const auto& p : pairs) {
      require_dim(gold_dim, p.gold.size());
      if (norm(p.gold) == 0.0) throw ZeroVectorError();
    }
  }
};

enum class ArticBlock { Ternary, OneHot, Combined };

inline Vec artic_block(const ArticulatoryVector& v, ArticBlock block) {
  const auto s = block == ArticBlock::Ternary  ? v.ternary_block()
                 : block == ArticBlock::OneHot ? v.onehot_block()
                                               : v.all();
  return Vec(s.begin(), s.end());
}

inline std::size_t artic_block_dim(ArticBlock block) {
  switch (block) {
    case ArticBlock::Ternary: return kTernaryDim;
    case ArticBlock::OneHot: return kOneHotDim;
    default: return kArticDim;
  }
}

// Gold set TSV: column 1 = IPA symbol (resolved against the table), remaining
// columns = gold vector components. Zero-norm gold vectors are rejected here
// because the cosine term of the objective is undefined for them.
inline GoldEmbeddingSet load_gold_set(const std::string& path, const FeatureTable& table,
                                      ArticBlock block = ArticBlock::Combined) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError(path);
  GoldEmbeddingSet set;
  set.source = path;
  std::string line;
  std::size_t line_no = 0;
  std::size_t gold_dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = detail::split_tsv(line);
    if (cols.size() < 2) throw MalformedRowError(line_no, "expected symbol plus vector");
    GoldPair pair;
    const std::size_t row = table.row_of(cols[0]);
    pair.input = artic_block(table.entry(row).vector, block);
    pair.gold.reserve(cols.size() - 1);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      try {
        pair.gold.push_back(std::stod(cols[i]));
      } catch (const std::exception&) {
        throw MalformedRowError(line_no, "bad float '" + cols[i] + "'");
      }
    }
    if (gold_dim == 0)
      gold_dim = pair.gold.size();
    else if (pair.gold.size() != gold_dim)
      throw MalformedRowError(line_no, "inconsistent gold vector length");
    if (norm(pair.gold) == 0.0)
      throw MalformedRowError(line_no, "zero-norm gold vector for '" + cols[0] + "'");
    set.pairs.push_back(std::move(pair));
  }
  set.validate();
  return set;
}

inline double evaluate_embedding(const EmbeddingParams& params, const GoldEmbeddingSet& gold) {
  gold.validate();
  double sum = 0.0;
  for (const auto& p : gold.pairs) sum += artic_distance(embed(params, p.input), p.gold);
  return sum / static_cast<double>(gold.pairs.size());
}

struct EmbedTrainResult {
  EmbeddingParams params;
  double final_avg_distance = 0.0;
  Vec epoch_avg_distance;  // training-set average per epoch
  // Set when the loss went non-finite; params hold the last finite epoch.
  std::optional<std::size_t> aborted_epoch;
};

namespace detail {

inline void embed_batch_grad(const EmbeddingParams& params,
                             const std::vector<const GoldPair*>& batch, std::span<double> grad,
                             double& loss_out) {
  const double scale = 1.0 / static_cast<double>(batch.size());
  Vec out(params.config.output_dim);
  Vec dout(params.config.output_dim);
  Vec hid(params.config.hidden_dim);
  double loss = 0.0;
  for (const auto* pair : batch) {
    std::fill(dout.begin(), dout.end(), 0.0);
    if (params.config.arch == EmbeddingArch::Linear) {
      affine_forward<double>(params.affine_dims(), params.flat, pair->input, out);
      loss += artic_distance(out, pair->gold);
      artic_distance_grad_a(out, pair->gold, dout);
      for (auto& g : dout) g *= scale;
      affine_backward<double>(params.affine_dims(), pair->input, dout, grad);
    } else {
      mlp_forward<double>(params.mlp_dims(), params.flat, pair->input, std::span(hid),
                          std::span(out));
      loss += artic_distance(out, pair->gold);
      artic_distance_grad_a(out, pair->gold, dout);
      for (auto& g : dout) g *= scale;
      mlp_backward<double>(params.mlp_dims(), params.flat, pair->input, hid, dout, grad);
    }
  }
  loss_out = loss * scale;
}

}  // namespace detail

// Mini-batch Adam on the mean pair distance. Epochs shuffle the pair order
// with the run seed; the last partial batch is kept. Reproducible: identical
// (seed, config, gold) give bit-identical parameters.
inline EmbedTrainResult train_embedding(const EmbeddingConfig& config,
                                        const GoldEmbeddingSet& gold, std::size_t epochs = 3000,
                                        std::size_t batch_size = 32, AdamConfig adam = {}) {
  gold.validate();
  for (const auto& p : gold.pairs) require_dim(config.input_dim, p.input.size());
  require_dim(config.output_dim, gold.pairs.front().gold.size());
  if (batch_size == 0) throw ParseError("batch_size must be >= 1");

  EmbedTrainResult result;
  result.params = init_embedding(config);
  Rng shuffle_rng(derive_seed(config.seed, /*stream=*/0x5F));

  std::vector<std::size_t> order(gold.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Vec grad(result.params.flat.size());
  AdamState opt(result.params.flat.size());
  Vec last_finite = result.params.flat;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    bool finite = true;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<const GoldPair*> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(&gold.pairs[order[i]]);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      detail::embed_batch_grad(result.params, batch, grad, batch_loss);
      if (!std::isfinite(batch_loss) || !all_finite(grad)) {
        finite = false;
        break;
      }
      adam_step(opt, result.params.flat, grad, adam);
      epoch_loss += batch_loss;
      ++batches;
    }
    if (!finite) {
      result.aborted_epoch = epoch;
      result.params.flat = last_finite;
      break;
    }
    last_finite = result.params.flat;
    result.epoch_avg_distance.push_back(epoch_loss / static_cast<double>(batches));
  }

  result.final_avg_distance = evaluate_embedding(result.params, gold);
  return result;
}

// Checkpoint layout for embedding parameters.
inline Checkpoint embedding_to_checkpoint(const EmbeddingParams& p) {
  Checkpoint ck;
  ck.put_scalar("model.kind", 1.0);  // 0 = acoustic, 1 = embedding
  ck.put_scalar("arch", p.config.arch == EmbeddingArch::Linear ? 0.0 : 1.0);
  ck.put("dims", {3},
         Vec{static_cast<double>(p.config.input_dim), static_cast<double>(p.config.hidden_dim),
             static_cast<double>(p.config.output_dim)});
  ck.put("params", {p.flat.size()}, p.flat);
  return ck;
}

inline EmbeddingParams embedding_from_checkpoint(const Checkpoint& ck) {
  EmbeddingParams p;
  p.config.arch = ck.get_scalar("arch") == 0.0 ? EmbeddingArch::Linear : EmbeddingArch::NonLinear;
  const auto& dims = ck.get("dims").data;
  p.config.input_dim = static_cast<std::size_t>(dims[0]);
  p.config.hidden_dim = static_cast<std::size_t>(dims[1]);
  p.config.output_dim = static_cast<std::size_t>(dims[2]);
  p.flat = ck.get("params").data;
  require_dim(p.param_count(), p.flat.size());
  return p;
}

}  // namespace crossvox

#endif  // CROSSVOX_EMBEDDING_HPP
