#ifndef CROSSVOX_DETAIL_DUAL_HPP
#define CROSSVOX_DETAIL_DUAL_HPP

#include <cmath>

namespace crossvox::detail {

// Forward-mode dual number. Instantiating the model's gradient code with
// Dual yields exact Hessian-vector products (forward-over-reverse), which is
// what the unrolled second-order meta-gradient needs.
struct Dual {
  double val = 0.0;
  double dot = 0.0;

  Dual() = default;
  Dual(double v) : val(v) {}  // NOLINT(google-explicit-constructor)
  Dual(double v, double d) : val(v), dot(d) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.val + b.val, a.dot + b.dot}; }
inline Dual operator-(Dual a, Dual b) { return {a.val - b.val, a.dot - b.dot}; }
inline Dual operator-(Dual a) { return {-a.val, -a.dot}; }
inline Dual operator*(Dual a, Dual b) { return {a.val * b.val, a.dot * b.val + a.val * b.dot}; }
inline Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.val;
  return {a.val * inv, (a.dot - a.val * b.dot * inv) * inv};
}
inline Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
inline Dual& operator-=(Dual& a, Dual b) { return a = a - b; }
inline Dual& operator*=(Dual& a, Dual b) { return a = a * b; }

inline Dual tanh(Dual a) {
  const double t = std::tanh(a.val);
  return {t, (1.0 - t * t) * a.dot};
}

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.val; }

using std::tanh;

}  // namespace crossvox::detail

#endif  // CROSSVOX_DETAIL_DUAL_HPP
