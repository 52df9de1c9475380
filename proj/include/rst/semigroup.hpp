#pragma once

#include <vector>

#include "rst/grid.hpp"
#include "rst/profiles.hpp"

namespace rst {

// Sub-box of the grid used for local (compact-set) norms.
struct Region {
  std::vector<int> lo, hi;  // half-open index ranges per axis

  static Region full(const Grid& g) {
    Region r;
    r.lo.assign(g.d, 0);
    r.hi = g.n;
    return r;
  }
  static Region centered_fraction(const Grid& g, double frac);
  bool contains(const std::vector<int>& ix) const {
    for (std::size_t a = 0; a < lo.size(); ++a)
      if (ix[a] < lo[a] || ix[a] >= hi[a]) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 1;
    for (std::size_t a = 0; a < lo.size(); ++a) c *= std::size_t(hi[a] - lo[a]);
    return c;
  }
};

double lp_norm_region(const Field& f, double p, const Region& r);
double sup_norm_region(const Field& f, const Region& r);

// Smooth compactly supported profile with C^r data, suitable for the
// distinguished test-function classes: support in the scaled unit ball,
// C^r-norm scaled to <= 1, and optionally vanishing moments up to an order.
class TestFunction {
 public:
  // plain normalized bump
  static TestFunction bump_profile(GridPtr grid, int smoothness);
  // bump times x^shape, C^r-normalized; shape > 0 gives odd/structured probes
  static TestFunction shaped_profile(GridPtr grid, int smoothness, const MultiIndex& shape);
  // probe with vanishing polynomial moments up to order `annihilation`
  static TestFunction annihilating_profile(GridPtr grid, int smoothness, int annihilation);

  // the probe family B^r (resp. B^r_m with vanishing moments) used wherever
  // the paper takes a sup over test functions
  static std::vector<TestFunction> family(GridPtr grid, int smoothness, int annihilation = -1);

  int smoothness() const { return r_; }
  int annihilation() const { return annihilation_; }

  // psi_x^lambda sampled on the grid; throws when lambda is below the
  // resolution guard (support under two grid cells per axis)
  Field place(const std::vector<double>& x, double lambda) const;
  double value(const std::vector<double>& arg) const;  // unscaled profile

 private:
  void normalize_cr();

  GridPtr grid_;
  int r_ = 2;
  int annihilation_ = -1;
  double radius_ = 1.0;          // support radius in the scaled norm
  std::vector<double> coeffs_;   // polynomial multiplier coefficients
  std::vector<MultiIndex> pows_; // matching powers
  double norm_scale_ = 1.0;
};

// Semigroup kernel: base profile rho with exact grid moments
// (int rho x^k = delta_{k0} for |k|_s <= r), dyadic levels rho^n, and
// phi^n = rho^n * rho^{n+1} * ... * rho^P built on-grid so that the
// semigroup identity phi^n = rho^n * phi^{n+1} holds by associativity.
class SemigroupKernel {
 public:
  SemigroupKernel(GridPtr grid, int moment_order);

  const GridPtr& grid() const { return grid_; }
  int max_level() const { return max_level_; }       // P
  int top_usable_level() const { return max_level_ - 1; }
  int moment_order() const { return r_; }

  const Field& rho(int level) const { return rho_.at(std::size_t(level)); }
  const Field& phi(int level) const { return phi_.at(std::size_t(level)); }

  // centered pairing <zeta, phi_x^n> = (phi^n * zeta)(x) using evenness
  Field smooth(const Field& zeta, int level) const;  // zeta_n = phi^n * zeta

  // worst grid moment |int rho^n x^k - delta| over 0 <= |k|_s <= r, all levels
  double worst_moment_residual() const;

 private:
  GridPtr grid_;
  int r_;
  int max_level_;
  std::vector<Field> rho_;
  std::vector<Field> phi_;
};

// Dyadic mollifier at scale 2^{-n}: a smooth spectral low-pass whose cutoff
// sits a fixed factor above the dyadic scale, so the mollification never
// amplifies any mode and the tested lambda-window stays below the cutoff.
class Mollifier {
 public:
  Mollifier(GridPtr grid, int moment_order, double radius_factor = 1.0 / 64.0);

  const Field& level(int n) const { return rho_.at(std::size_t(n)); }
  Field deriv_level(int n, const MultiIndex& k) const;  // D^k rho^n sampled
  int max_level() const { return int(rho_.size()) - 1; }
  double radius_factor() const { return radius_factor_; }

  Field apply(const Field& f, int n) const { return convolve(level(n), f); }

 private:
  GridPtr grid_;
  int r_;
  double radius_factor_;
  std::vector<Field> rho_;
};

// moment-corrected bump helpers shared by the kernel constructions: returns
// coefficients c such that sum_j c_j q_j(x) b(x) has grid moments
// int f x^k = target_k for all |k|_s <= r
std::vector<MultiIndex> moment_powers(const Grid& g, int r);
std::vector<double> solve_moment_multiplier(
    const Field& bump_field, const std::vector<MultiIndex>& pows,
    const std::vector<double>& targets);

// x^k as a grid field with minimal-image coordinates around 0
Field monomial_field(GridPtr g, const MultiIndex& k);

}  // namespace rst
