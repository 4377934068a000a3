#ifndef CROSSVOX_ACOUSTIC_HPP
#define CROSSVOX_ACOUSTIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "crossvox/artic.hpp"
#include "crossvox/checkpoint.hpp"
#include "crossvox/core.hpp"
#include "crossvox/detail/dual.hpp"
#include "crossvox/detail/mlp.hpp"
#include "crossvox/errors.hpp"
#include "crossvox/rng.hpp"

namespace crossvox {

// Desk-scale acoustic model: a per-phoneme feed-forward map from the 66-dim
// articulatory vector to a K-dim frame (66 -> H, tanh, -> K). Small enough
// for exact gradient oracles, which is the whole point.

struct AcousticConfig {
  std::size_t input_dim = kArticDim;
  std::size_t hidden_dim = 32;
  std::size_t frame_dim = 8;
  std::uint64_t seed = 0;

  detail::MlpDims dims() const { return {input_dim, hidden_dim, frame_dim}; }
};

struct AcousticParams {
  AcousticConfig config;
  Vec flat;  // [W1, b1, W2, b2]
};

inline AcousticParams init_acoustic(const AcousticConfig& config) {
  AcousticParams p;
  p.config = config;
  const auto d = config.dims();
  p.flat.assign(d.total(), 0.0);
  Rng rng(derive_seed(config.seed, /*stream=*/0xAC));
  detail::init_layer(rng, std::span(p.flat).subspan(0, d.w2_off()), d.in);
  detail::init_layer(rng, std::span(p.flat).subspan(d.w2_off()), d.hidden);
  return p;
}

// Batch B_i sampled from one synthetic language.
struct TaskBatch {
  int task_id = 0;
  std::vector<ArticulatoryVector> inputs;
  std::vector<Vec> targets;

  void validate(std::size_t frame_dim) const {
    if (inputs.empty()) throw EmptyBatchError();
    require_dim(inputs.size(), targets.size());
    for (const auto& t : targets) require_dim(frame_dim, t.size());
  }
};

inline std::vector<Vec> acoustic_forward(const AcousticParams& params,
                                         std::span<const ArticulatoryVector> inputs) {
  const auto d = params.config.dims();
  require_dim(kArticDim, d.in);
  std::vector<Vec> out;
  out.reserve(inputs.size());
  Vec hid(d.hidden);
  for (const auto& x : inputs) {
    Vec frame(d.out);
    detail::mlp_forward<double>(d, params.flat, x.all(), std::span(hid), std::span(frame));
    out.push_back(std::move(frame));
  }
  return out;
}

namespace detail {

// Mean squared error over frames and dims, with gradient accumulation.
// Templated on the scalar so Dual instantiation yields exact Hessian-vector
// products for the unrolled meta-gradient.
template <typename T>
T acoustic_loss_grad(const MlpDims& d, std::span<const T> params, const TaskBatch& batch,
                     std::span<T> grad) {
  const std::size_t n = batch.inputs.size();
  const double denom = static_cast<double>(n * d.out);
  std::vector<T> x(d.in), hid(d.hidden), out(d.out), dout(d.out);
  T loss{};
  for (std::size_t s = 0; s < n; ++s) {
    const auto xs = batch.inputs[s].all();
    for (std::size_t i = 0; i < d.in; ++i) x[i] = T{xs[i]};
    mlp_forward<T>(d, params, x, std::span(hid), std::span(out));
    for (std::size_t k = 0; k < d.out; ++k) {
      const T r = out[k] - T{batch.targets[s][k]};
      loss += r * r;
      dout[k] = T{2.0 / denom} * r;
    }
    if (!grad.empty()) mlp_backward<T>(d, params, x, hid, dout, grad);
  }
  return loss * T{1.0 / denom};
}

}  // namespace detail

inline double task_loss(const AcousticParams& params, const TaskBatch& batch) {
  batch.validate(params.config.frame_dim);
  return detail::acoustic_loss_grad<double>(params.config.dims(), params.flat, batch, {});
}

// Task objective adapter for the meta-learning core: loss, gradient and exact
// Hessian-vector product of the MSE task loss on a flat parameter vector.
struct AcousticObjective {
  AcousticConfig config;

  double loss(std::span<const double> theta, const TaskBatch& batch) const {
    batch.validate(config.frame_dim);
    return detail::acoustic_loss_grad<double>(config.dims(), theta, batch, {});
  }

  double add_grad(std::span<const double> theta, const TaskBatch& batch,
                  std::span<double> grad) const {
    batch.validate(config.frame_dim);
    return detail::acoustic_loss_grad<double>(config.dims(), theta, batch, grad);
  }

  void add_hvp(std::span<const double> theta, const TaskBatch& batch,
               std::span<const double> v, std::span<double> out) const {
    batch.validate(config.frame_dim);
    std::vector<detail::Dual> p(theta.size()), g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) p[i] = {theta[i], v[i]};
    detail::acoustic_loss_grad<detail::Dual>(config.dims(), p, batch, g);
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] += g[i].dot;
  }
};

// ---------------------------------------------------------------------------
// Synthetic multi-language tasks.
//
// Targets come from a base linear map shared by the whole task family plus a
// task-specific speaker offset: universal acoustic structure + per-task
// speaker traits. Each task is "a different language and a different
// speaker": its own phoneme inventory, its own offset.

struct TaskFamilyConfig {
  std::uint64_t base_seed = 0;
  std::size_t frame_dim = 8;
  double base_scale = 1.0;
  double offset_scale = 0.5;
};

struct TaskSpec {
  int task_id = 0;
  std::vector<std::string> inventory;  // table symbols
  std::uint64_t seed = 0;
  double noise_level = 0.0;

  void validate() const {
    if (inventory.empty()) throw ParseError("task inventory must be non-empty");
    if (noise_level < 0.0) throw ParseError("noise level must be >= 0");
  }
};

class TaskGenerator {
 public:
  TaskGenerator(const TaskFamilyConfig& family, const TaskSpec& spec)
      : frame_dim_(family.frame_dim), noise_level_(spec.noise_level) {
    spec.validate();
    Rng base_rng(derive_seed(family.base_seed, /*stream=*/0xBA));
    base_ = Matrix(family.frame_dim, kArticDim);
    const double scale = family.base_scale / std::sqrt(static_cast<double>(kArticDim));
    for (auto& w : base_.data) w = base_rng.normal() * scale;
    bias_.resize(family.frame_dim);
    for (auto& b : bias_) b = base_rng.normal() * 0.1;
    Rng task_rng(derive_seed(spec.seed, /*stream=*/0x0F));
    offset_.resize(family.frame_dim);
    for (auto& o : offset_) o = task_rng.normal() * family.offset_scale;
  }

  std::size_t frame_dim() const { return frame_dim_; }
  const Vec& speaker_offset() const { return offset_; }

  // Clean target for one phoneme vector, before observation noise.
  Vec target(const ArticulatoryVector& x) const {
    Vec out(frame_dim_);
    for (std::size_t k = 0; k < frame_dim_; ++k)
      out[k] = dot(base_.row(k), x.all()) + bias_[k] + offset_[k];
    return out;
  }

  Vec noisy_target(const ArticulatoryVector& x, Rng& rng) const {
    Vec out = target(x);
    if (noise_level_ > 0.0)
      for (auto& y : out) y += noise_level_ * rng.normal();
    return out;
  }

 private:
  std::size_t frame_dim_;
  double noise_level_;
  Matrix base_;
  Vec bias_;
  Vec offset_;
};

// Uniform-with-replacement batch from the task's inventory.
inline TaskBatch sample_task_batch(const TaskGenerator& gen, const TaskSpec& spec,
                                   const FeatureTable& table, std::size_t batch_size, Rng& rng) {
  spec.validate();
  TaskBatch batch;
  batch.task_id = spec.task_id;
  batch.inputs.reserve(batch_size);
  batch.targets.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto& symbol = spec.inventory[rng.below(spec.inventory.size())];
    const auto& v = table.entry(table.row_of(symbol)).vector;
    batch.inputs.push_back(v);
    batch.targets.push_back(gen.noisy_target(v, rng));
  }
  return batch;
}

// Random task inventories over the table symbols, excluding held-out ones.
inline std::vector<TaskSpec> make_synthetic_tasks(const FeatureTable& table, std::size_t n_tasks,
                                                  std::size_t inventory_size, double noise_level,
                                                  std::uint64_t seed,
                                                  const std::vector<std::string>& heldout = {}) {
  std::vector<std::string> pool;
  for (const auto& e : table.entries()) {
    bool excluded = false;
    for (const auto& h : heldout)
      if (nfd_utf8(h) == e.symbol) excluded = true;
    if (!excluded) pool.push_back(e.symbol);
  }
  if (pool.size() < inventory_size) throw ParseError("inventory_size exceeds available symbols");
  std::vector<TaskSpec> tasks;
  tasks.reserve(n_tasks);
  for (std::size_t t = 0; t < n_tasks; ++t) {
    TaskSpec spec;
    spec.task_id = static_cast<int>(t);
    spec.seed = derive_seed(seed, 0x100 + t);
    spec.noise_level = noise_level;
    Rng rng(derive_seed(spec.seed, /*stream=*/0x1B));
    std::vector<std::string> shuffled = pool;
    rng.shuffle(shuffled);
    spec.inventory.assign(shuffled.begin(),
                          shuffled.begin() + static_cast<std::ptrdiff_t>(inventory_size));
    tasks.push_back(std::move(spec));
  }
  return tasks;
}

}  // namespace crossvox

#endif  // CROSSVOX_ACOUSTIC_HPP
