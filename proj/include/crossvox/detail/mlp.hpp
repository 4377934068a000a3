#ifndef CROSSVOX_DETAIL_MLP_HPP
#define CROSSVOX_DETAIL_MLP_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "crossvox/detail/dual.hpp"
#include "crossvox/rng.hpp"

namespace crossvox::detail {

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], covering weights and
// biases of one layer.
inline void init_layer(Rng& rng, std::span<double> block, std::size_t fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& w : block) w = rng.uniform(-bound, bound);
}

// Two-layer perceptron out = W2 * tanh(W1 * x + b1) + b2 on a flat parameter
// vector, templated on the scalar so the same backward pass serves plain
// training (double) and exact Hessian-vector products (Dual).
//
// Flat layout: [W1 (hidden x in, row-major), b1, W2 (out x hidden), b2].
struct MlpDims {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;

  std::size_t w1_size() const { return hidden * in; }
  std::size_t b1_off() const { return w1_size(); }
  std::size_t w2_off() const { return w1_size() + hidden; }
  std::size_t b2_off() const { return w2_off() + out * hidden; }
  std::size_t total() const { return b2_off() + out; }
};

template <typename T>
void mlp_forward(const MlpDims& d, std::span<const T> p, std::span<const T> x, std::span<T> hid,
                 std::span<T> out) {
  for (std::size_t h = 0; h < d.hidden; ++h) {
    T acc = p[d.b1_off() + h];
    const T* row = p.data() + h * d.in;
    for (std::size_t i = 0; i < d.in; ++i) acc += row[i] * x[i];
    hid[h] = tanh(acc);
  }
  for (std::size_t o = 0; o < d.out; ++o) {
    T acc = p[d.b2_off() + o];
    const T* row = p.data() + d.w2_off() + o * d.hidden;
    for (std::size_t h = 0; h < d.hidden; ++h) acc += row[h] * hid[h];
    out[o] = acc;
  }
}

// Accumulates dL/dparams into grad given dL/dout; hid must come from the
// matching forward pass. Also accumulates dL/dx when dx is non-empty.
template <typename T>
void mlp_backward(const MlpDims& d, std::span<const T> p, std::span<const T> x,
                  std::span<const T> hid, std::span<const T> dout, std::span<T> grad,
                  std::span<T> dx = {}) {
  std::vector<T> dhid(d.hidden, T{});
  for (std::size_t o = 0; o < d.out; ++o) {
    const T g = dout[o];
    grad[d.b2_off() + o] += g;
    const T* w_row = p.data() + d.w2_off() + o * d.hidden;
    T* g_row = grad.data() + d.w2_off() + o * d.hidden;
    for (std::size_t h = 0; h < d.hidden; ++h) {
      g_row[h] += g * hid[h];
      dhid[h] += g * w_row[h];
    }
  }
  for (std::size_t h = 0; h < d.hidden; ++h) {
    const T dpre = dhid[h] * (T{1.0} - hid[h] * hid[h]);  // tanh'
    grad[d.b1_off() + h] += dpre;
    const T* w_row = p.data() + h * d.in;
    T* g_row = grad.data() + h * d.in;
    for (std::size_t i = 0; i < d.in; ++i) g_row[i] += dpre * x[i];
    if (!dx.empty())
      for (std::size_t i = 0; i < d.in; ++i) dx[i] += dpre * w_row[i];
  }
}

// Single affine map out = W * x + b. Flat layout: [W (out x in), b].
struct AffineDims {
  std::size_t in = 0;
  std::size_t out = 0;

  std::size_t b_off() const { return out * in; }
  std::size_t total() const { return out * in + out; }
};

template <typename T>
void affine_forward(const AffineDims& d, std::span<const T> p, std::span<const T> x,
                    std::span<T> out) {
  for (std::size_t o = 0; o < d.out; ++o) {
    T acc = p[d.b_off() + o];
    const T* row = p.data() + o * d.in;
    for (std::size_t i = 0; i < d.in; ++i) acc += row[i] * x[i];
    out[o] = acc;
  }
}

template <typename T>
void affine_backward(const AffineDims& d, std::span<const T> x, std::span<const T> dout,
                     std::span<T> grad) {
  for (std::size_t o = 0; o < d.out; ++o) {
    const T g = dout[o];
    grad[d.b_off() + o] += g;
    T* g_row = grad.data() + o * d.in;
    for (std::size_t i = 0; i < d.in; ++i) g_row[i] += g * x[i];
  }
}

}  // namespace crossvox::detail

#endif  // CROSSVOX_DETAIL_MLP_HPP
