#ifndef CROSSVOX_META_HPP
#define CROSSVOX_META_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "crossvox/acoustic.hpp"
#include "crossvox/adam.hpp"
#include "crossvox/checkpoint.hpp"
#include "crossvox/core.hpp"
#include "crossvox/errors.hpp"
#include "crossvox/rng.hpp"

namespace crossvox {

// Meta-training procedures over per-task objectives.
//
// The generic core works on a flat parameter vector and any objective that
// provides loss / add_grad / add_hvp; the typed wrappers below bind it to the
// toy acoustic model. Per-task contributions are accumulated in fixed task
// order into a per-task temporary first, so that the degenerate equivalences
// (MAML with zero inner steps == LAML == one Adam step on the summed loss)
// hold bit for bit.

enum class MamlMode { SecondOrder, FirstOrder };
enum class MetaProcedure { LAML, MAML, FOMAML };

template <typename Batch>
struct MamlTaskBatches {
  Batch inner;  // adapted on in the inner loop
  Batch outer;  // evaluated after adaptation for the meta-gradient
};

// Gradient of the LAML objective sum_i L(theta, B_i); returns the summed
// loss. This is the whole procedure: no inner loop, one direct step.
template <typename Obj, typename Batch>
double laml_grad(const Obj& obj, std::span<const double> theta,
                 std::span<const Batch> batches, std::span<double> grad) {
  if (batches.empty()) throw EmptyBatchError();
  double total = 0.0;
  Vec tmp(theta.size());
  for (const auto& batch : batches) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    total += obj.add_grad(theta, batch, tmp);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += tmp[i];
  }
  return total;
}

// Meta-gradient of sum_i L(theta_{i,d}, B_i^outer) w.r.t. theta, where
// theta_{i,d} results from d plain gradient-descent steps on B_i^inner.
//
// SecondOrder unrolls the inner loop: with H_j the inner-loss Hessian at the
// j-th trajectory point, the per-task meta-gradient is
//   (I - a H_0) ... (I - a H_{d-1}) grad L(theta_d),
// accumulated right-to-left with exact Hessian-vector products. FirstOrder
// applies grad L(theta_d) directly. With d = 0 both reduce to laml_grad.
template <typename Obj, typename Batch>
double maml_meta_grad(const Obj& obj, std::span<const double> theta,
                      std::span<const MamlTaskBatches<Batch>> tasks, int inner_steps,
                      double inner_lr, MamlMode mode, std::span<double> grad) {
  if (tasks.empty()) throw EmptyBatchError();
  if (inner_steps < 0) throw ParseError("inner_steps must be >= 0");
  if (inner_steps > 0 && inner_lr <= 0.0) throw ParseError("inner_lr must be > 0");

  const std::size_t n = theta.size();
  double total = 0.0;
  Vec tmp(n), hv(n);
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const auto& task = tasks[ti];

    std::vector<Vec> trajectory;
    trajectory.reserve(static_cast<std::size_t>(inner_steps));
    Vec th(theta.begin(), theta.end());
    for (int j = 0; j < inner_steps; ++j) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      obj.add_grad(th, task.inner, tmp);
      if (!all_finite(tmp)) throw NonFiniteGradientError(static_cast<int>(ti), j);
      trajectory.push_back(th);
      for (std::size_t i = 0; i < n; ++i) th[i] -= inner_lr * tmp[i];
    }

    std::fill(tmp.begin(), tmp.end(), 0.0);
    total += obj.add_grad(th, task.outer, tmp);
    if (mode == MamlMode::SecondOrder) {
      for (int j = inner_steps - 1; j >= 0; --j) {
        std::fill(hv.begin(), hv.end(), 0.0);
        obj.add_hvp(trajectory[static_cast<std::size_t>(j)], task.inner, tmp, hv);
        for (std::size_t i = 0; i < n; ++i) tmp[i] -= inner_lr * hv[i];
      }
    }
    if (!all_finite(tmp)) throw NonFiniteGradientError(static_cast<int>(ti), inner_steps);
    for (std::size_t i = 0; i < n; ++i) grad[i] += tmp[i];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Typed wrappers around the toy acoustic model.

struct MetaModelState {
  AcousticParams params;
  AdamState adam;

  std::int64_t step() const { return adam.step; }
};

inline MetaModelState init_meta_state(const AcousticConfig& config) {
  MetaModelState s;
  s.params = init_acoustic(config);
  s.adam = AdamState(s.params.flat.size());
  return s;
}

// One LAML update: sum the per-task losses at the current meta parameters,
// backpropagate, update with Adam. Returns the summed pre-update loss.
inline double laml_step(MetaModelState& meta, std::span<const TaskBatch> batches,
                        const AdamConfig& outer = {}) {
  const AcousticObjective obj{meta.params.config};
  Vec grad(meta.params.flat.size(), 0.0);
  const double loss = laml_grad<AcousticObjective, TaskBatch>(obj, meta.params.flat, batches, grad);
  adam_step(meta.adam, meta.params.flat, grad, outer);
  return loss;
}

// One MAML outer update (second-order or first-order inner-loop handling).
// Returns the summed post-inner-loop loss.
inline double maml_step(MetaModelState& meta, std::span<const MamlTaskBatches<TaskBatch>> tasks,
                        int inner_steps, double inner_lr, MamlMode mode,
                        const AdamConfig& outer = {}) {
  const AcousticObjective obj{meta.params.config};
  Vec grad(meta.params.flat.size(), 0.0);
  const double loss = maml_meta_grad<AcousticObjective, TaskBatch>(
      obj, meta.params.flat, tasks, inner_steps, inner_lr, mode, grad);
  adam_step(meta.adam, meta.params.flat, grad, outer);
  return loss;
}

struct MetaTrainConfig {
  AcousticConfig model;
  TaskFamilyConfig family;
  std::size_t steps = 2000;
  std::size_t batch_size = 16;
  AdamConfig outer;
  // MAML / FOMAML only:
  int inner_steps = 1;
  double inner_lr = 0.01;
  std::uint64_t seed = 0;
};

struct MetaTrainResult {
  MetaModelState state;
  Vec loss_log;  // summed loss per outer step
};

// Meta-training loop: per outer step, sample one batch per task (in fixed
// task order) and apply the chosen step operation. MAML uses the same batch
// for the inner loop and the outer loss, matching the meta-train semantics
// of one batch per language per step.
inline MetaTrainResult meta_train(const MetaTrainConfig& config, const FeatureTable& table,
                                  const std::vector<TaskSpec>& tasks, MetaProcedure procedure) {
  if (tasks.empty()) throw EmptyBatchError();
  MetaTrainResult result;
  result.state = init_meta_state(config.model);

  std::vector<TaskGenerator> generators;
  generators.reserve(tasks.size());
  for (const auto& spec : tasks) generators.emplace_back(config.family, spec);

  Rng sample_rng(derive_seed(config.seed, /*stream=*/0x5A));
  result.loss_log.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    std::vector<TaskBatch> batches;
    batches.reserve(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t)
      batches.push_back(
          sample_task_batch(generators[t], tasks[t], table, config.batch_size, sample_rng));

    double loss = 0.0;
    if (procedure == MetaProcedure::LAML) {
      loss = laml_step(result.state, batches, config.outer);
    } else {
      std::vector<MamlTaskBatches<TaskBatch>> pairs;
      pairs.reserve(batches.size());
      for (auto& b : batches) pairs.push_back(MamlTaskBatches<TaskBatch>{b, b});
      const MamlMode mode =
          procedure == MetaProcedure::MAML ? MamlMode::SecondOrder : MamlMode::FirstOrder;
      loss = maml_step(result.state, pairs, config.inner_steps, config.inner_lr, mode,
                       config.outer);
    }
    result.loss_log.push_back(loss);
  }
  return result;
}

struct FinetuneResult {
  AcousticParams params;
  Vec loss_log;
  // (step, params) checkpoints for adaptation-speed analysis; always
  // includes step 0 and the final step.
  std::vector<std::pair<std::int64_t, AcousticParams>> snapshots;
};

// Plain supervised Adam from the meta parameters on batches of one unseen
// task, cycling through the corpus in order. Optimizer state starts fresh.
inline FinetuneResult finetune(const MetaModelState& meta, const std::vector<TaskBatch>& corpus,
                               std::size_t steps, const AdamConfig& adam = {},
                               std::size_t snapshot_every = 10) {
  if (corpus.empty()) throw EmptyBatchError();
  const AcousticObjective obj{meta.params.config};
  FinetuneResult result;
  result.params = meta.params;
  AdamState opt(result.params.flat.size());
  Vec grad(result.params.flat.size());

  result.snapshots.emplace_back(0, result.params);
  for (std::size_t step = 0; step < steps; ++step) {
    const auto& batch = corpus[step % corpus.size()];
    std::fill(grad.begin(), grad.end(), 0.0);
    result.loss_log.push_back(obj.add_grad(result.params.flat, batch, grad));
    adam_step(opt, result.params.flat, grad, adam);
    const std::size_t done = step + 1;
    if (done == steps || (snapshot_every > 0 && done % snapshot_every == 0))
      result.snapshots.emplace_back(static_cast<std::int64_t>(done), result.params);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Meta checkpoint layout.

inline Checkpoint meta_to_checkpoint(const MetaModelState& s) {
  Checkpoint ck;
  ck.put_scalar("model.kind", 0.0);  // 0 = acoustic, 1 = embedding
  ck.put("dims", {3},
         Vec{static_cast<double>(s.params.config.input_dim),
             static_cast<double>(s.params.config.hidden_dim),
             static_cast<double>(s.params.config.frame_dim)});
  ck.put("params", {s.params.flat.size()}, s.params.flat);
  ck.put("adam.m", {s.adam.m.size()}, s.adam.m);
  ck.put("adam.v", {s.adam.v.size()}, s.adam.v);
  ck.put_scalar("adam.step", static_cast<double>(s.adam.step));
  return ck;
}

inline MetaModelState meta_from_checkpoint(const Checkpoint& ck) {
  MetaModelState s;
  const auto& dims = ck.get("dims").data;
  s.params.config.input_dim = static_cast<std::size_t>(dims[0]);
  s.params.config.hidden_dim = static_cast<std::size_t>(dims[1]);
  s.params.config.frame_dim = static_cast<std::size_t>(dims[2]);
  s.params.flat = ck.get("params").data;
  require_dim(s.params.config.dims().total(), s.params.flat.size());
  s.adam.m = ck.get("adam.m").data;
  s.adam.v = ck.get("adam.v").data;
  s.adam.step = static_cast<std::int64_t>(ck.get_scalar("adam.step"));
  return s;
}

inline Checkpoint acoustic_to_checkpoint(const AcousticParams& p) {
  Checkpoint ck;
  ck.put_scalar("model.kind", 0.0);
  ck.put("dims", {3},
         Vec{static_cast<double>(p.config.input_dim), static_cast<double>(p.config.hidden_dim),
             static_cast<double>(p.config.frame_dim)});
  ck.put("params", {p.flat.size()}, p.flat);
  return ck;
}

inline AcousticParams acoustic_from_checkpoint(const Checkpoint& ck) {
  AcousticParams p;
  const auto& dims = ck.get("dims").data;
  p.config.input_dim = static_cast<std::size_t>(dims[0]);
  p.config.hidden_dim = static_cast<std::size_t>(dims[1]);
  p.config.frame_dim = static_cast<std::size_t>(dims[2]);
  p.flat = ck.get("params").data;
  require_dim(p.config.dims().total(), p.flat.size());
  return p;
}

}  // namespace crossvox

#endif  // CROSSVOX_META_HPP
