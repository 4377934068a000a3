#ifndef CROSSVOX_ADAM_HPP
#define CROSSVOX_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <span>

#include "crossvox/core.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vec m;
  Vec v;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
inline void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
                      const AdamConfig& cfg) {
  require_dim(params.size(), grad.size());
  require_dim(params.size(), state.m.size());
  if (!all_finite(grad)) throw NonFiniteGradientError(-1, -1);

  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace crossvox

#endif  // CROSSVOX_ADAM_HPP
