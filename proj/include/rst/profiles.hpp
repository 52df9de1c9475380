#pragma once

#include <cmath>

#include "rst/grid.hpp"
#include "rst/multiindex.hpp"

namespace rst {

// Value with first and second derivative along one direction; enough for the
// kernel derivatives the desk-scale structures need (|k|_s <= 2).
struct Dual2 {
  double v = 0, d1 = 0, d2 = 0;

  static Dual2 variable(double x) { return {x, 1, 0}; }
  static Dual2 constant(double c) { return {c, 0, 0}; }

  friend Dual2 operator+(const Dual2& a, const Dual2& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
  }
  friend Dual2 operator-(const Dual2& a, const Dual2& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
  }
  friend Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2};
  }
  friend Dual2 operator*(double c, const Dual2& a) { return {c * a.v, c * a.d1, c * a.d2}; }
  friend Dual2 operator/(const Dual2& a, const Dual2& b) {
    double iv = 1.0 / b.v;
    double q = a.v * iv;
    double q1 = (a.d1 - q * b.d1) * iv;
    double q2 = (a.d2 - 2 * q1 * b.d1 - q * b.d2) * iv;
    return {q, q1, q2};
  }
  friend Dual2 operator-(const Dual2& a) { return {-a.v, -a.d1, -a.d2}; }
};

inline Dual2 exp(const Dual2& a) {
  double e = std::exp(a.v);
  return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}
// |x|^p for x != 0 (used away from the singular point)
inline Dual2 abs_pow(const Dual2& a, double p) {
  double ax = std::fabs(a.v);
  double sg = a.v >= 0 ? 1.0 : -1.0;
  double f = std::pow(ax, p);
  double f1 = p * std::pow(ax, p - 1) * sg;
  double f2 = p * (p - 1) * std::pow(ax, p - 2);
  return {f, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

// --- elementary C-infinity profiles on the line ------------------------------

// even bump supported on |t| < 1, value e^{-1/(1-t^2)} inside, not normalized
inline Dual2 bump(const Dual2& t) {
  if (std::fabs(t.v) >= 1.0 - 1e-12) return Dual2::constant(0.0);
  Dual2 w = Dual2::constant(1.0) - t * t;
  return exp(-(Dual2::constant(1.0) / w));
}

// smooth transition: 1 for t <= 0, 0 for t >= 1
inline Dual2 smoothstep_down(const Dual2& t) {
  if (t.v <= 1e-12) return Dual2::constant(1.0);
  if (t.v >= 1.0 - 1e-12) return Dual2::constant(0.0);
  auto rexp = [](const Dual2& u) {  // e^{-1/u} for u > 0
    return exp(-(Dual2::constant(1.0) / u));
  };
  Dual2 a = rexp(Dual2::constant(1.0) - t);
  Dual2 b = rexp(t);
  return a / (a + b);
}

// plateau in the scaled radius: 1 for r <= r1, 0 for r >= r2
inline Dual2 plateau(const Dual2& r, double r1, double r2) {
  return smoothstep_down((r - Dual2::constant(r1)) * Dual2::constant(1.0 / (r2 - r1)));
}

// --- grid sampling of radial profiles ---------------------------------------

// Evaluates D^k f(x) for a profile given as a function of the coordinates with
// per-axis Dual2, |k| concentrated on one axis with |k| <= 2; mixed second
// derivatives fall back to central differences of the first derivative.
class ProfileND {
 public:
  using Fn = std::function<Dual2(const std::vector<Dual2>&)>;
  explicit ProfileND(Fn fn) : fn_(std::move(fn)) {}

  double value(const std::vector<double>& x) const { return eval_plain(x); }
  double deriv(const std::vector<double>& x, const MultiIndex& k) const;

 private:
  double eval_plain(const std::vector<double>& x) const {
    std::vector<Dual2> args(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) args[i] = Dual2::constant(x[i]);
    return fn_(args).v;
  }
  Dual2 eval_axis(const std::vector<double>& x, std::size_t axis) const {
    std::vector<Dual2> args(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      args[i] = (i == axis) ? Dual2::variable(x[i]) : Dual2::constant(x[i]);
    return fn_(args);
  }

  Fn fn_;
};

}  // namespace rst
