#ifndef CROSSVOX_CORE_HPP
#define CROSSVOX_CORE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "crossvox/errors.hpp"

namespace crossvox {

using Vec = std::vector<double>;

// Dense row-major matrix, just enough for the models in this library.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

inline void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatchError(expected, got);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace crossvox

#endif  // CROSSVOX_CORE_HPP
