#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rst/scaling.hpp"

namespace rst {

// Uniform periodic grid on [0, L)^d with a power-of-two point count per axis.
struct Grid {
  std::size_t d = 1;
  std::vector<int> n;       // points per axis (powers of two)
  std::vector<double> len;  // period per axis
  std::vector<double> s;    // scaling exponents (float mirror of ScalingSpec)

  static std::shared_ptr<const Grid> make(const ScalingSpec& scaling, int points_per_axis,
                                          double period = 1.0);

  double h(std::size_t axis) const { return len[axis] / n[axis]; }
  std::size_t size() const {
    std::size_t t = 1;
    for (int v : n) t *= std::size_t(v);
    return t;
  }
  double cell_volume() const {
    double v = 1;
    for (std::size_t i = 0; i < d; ++i) v *= h(i);
    return v;
  }

  std::size_t flat(const std::vector<int>& ix) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < d; ++a) {
      int w = ((ix[a] % n[a]) + n[a]) % n[a];
      f = f * std::size_t(n[a]) + std::size_t(w);
    }
    return f;
  }
  std::vector<int> unflat(std::size_t f) const {
    std::vector<int> ix(d);
    for (std::size_t a = d; a-- > 0;) {
      ix[a] = int(f % std::size_t(n[a]));
      f /= std::size_t(n[a]);
    }
    return ix;
  }
  std::vector<double> point(const std::vector<int>& ix) const {
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a) x[a] = h(a) * (((ix[a] % n[a]) + n[a]) % n[a]);
    return x;
  }
  // minimal-image displacement a - b per axis
  double wrap(double v, std::size_t axis) const {
    double L = len[axis];
    v = std::fmod(v, L);
    if (v < -L / 2) v += L;
    if (v >= L / 2) v -= L;
    return v;
  }
  std::vector<double> displacement(const std::vector<double>& a,
                                   const std::vector<double>& b) const {
    std::vector<double> r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = wrap(a[i] - b[i], i);
    return r;
  }
  // scaled norm |z|_s of a displacement
  double snorm(const std::vector<double>& z) const {
    double t = 0;
    for (std::size_t i = 0; i < d; ++i) t += std::pow(std::fabs(z[i]), 1.0 / s[i]);
    return t;
  }
  double total_s() const {
    double t = 0;
    for (double v : s) t += v;
    return t;
  }
};
using GridPtr = std::shared_ptr<const Grid>;

// Scalar field sampled on a grid.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0) : grid_(std::move(g)), v_(grid_->size(), fill) {}

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double at(const std::vector<int>& ix) const { return v_[grid_->flat(ix)]; }
  double& at(const std::vector<int>& ix) { return v_[grid_->flat(ix)]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double c);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double c) { return a *= c; }
  friend Field operator*(double c, Field a) { return a *= c; }
  Field hadamard(const Field& o) const;  // pointwise product

  double integral() const;               // cell volume * sum
  double sup_norm() const;
  double lp_norm(double p) const;        // (int |f|^p)^{1/p}
  double l2_norm() const { return lp_norm(2.0); }

  // fills from a function of the point coordinates
  static Field sample(GridPtr g, const std::function<double(const std::vector<double>&)>& fn);

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

// circular convolution (a * b)(x) = cellvol * sum_y a(x - y) b(y), via FFT
Field convolve(const Field& a, const Field& b);
// direct O(N^2) evaluation, used as the independent quadrature oracle
Field convolve_direct(const Field& a, const Field& b);

// out(x) = in(x + offset) on the periodic grid (integer offsets)
Field shift_field(const Field& f, const std::vector<int>& offset);

// spectral derivative D^k f via Fourier multipliers (i omega)^k
Field spectral_derivative(const Field& f, const MultiIndex& k);

// applies a real spectral multiplier m(omega) where omega is the vector of
// angular frequencies 2*pi*k/L per axis
Field spectral_filter(const Field& f, const std::function<double(const std::vector<double>&)>& m);

// spectral Sobolev norm: || (1+|omega|^2)^{s/2} f^ ||, Parseval-normalized so
// that s = 0 gives the L^2 norm
double sobolev_norm(const Field& f, double sexp);

}  // namespace rst
