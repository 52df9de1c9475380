#pragma once

#include <map>
#include <vector>

#include "rst/grid.hpp"
#include "rst/multiindex.hpp"

namespace rst {

// Singular kernel of order beta with dyadic decomposition K = sum_n K_n,
// K_n supported in an annulus at scale 2^{-n}, each level annihilating grid
// polynomials up to the configured degree.  The construction is
//   K_n = G * w_n + P_n - P_{n+1},  G = |x|_s^{beta - |s|},
// with w_n a plateau-difference ring partition and P_n scale-2^{-n} bumps
// whose moments telescope so that every grid moment of K_n up to r0 vanishes.
// Off a neighborhood of the origin, sum_n K_n equals G times the outer
// plateau exactly.
class SingularKernel {
 public:
  SingularKernel(GridPtr grid, double beta, int annihilation_order);

  const GridPtr& grid() const { return grid_; }
  double beta() const { return beta_; }
  int levels() const { return int(level_fields_.size()); }
  int annihilation_order() const { return r0_; }

  const Field& level(int n, const MultiIndex& k) const;  // D^k K_n
  const Field& total(const MultiIndex& k) const;          // sum_n D^k K_n

  Field convolve_total(const Field& f, const MultiIndex& k) const {
    return convolve(total(k), f);
  }

  // reference G(x) * outer plateau for comparisons off the singular point
  double reference_at(const std::vector<double>& x) const;
  // inner plateau radius (the region where the outer plateau is 1)
  double plateau_inner() const { return r1_; }

  // worst |int K_n x^j| over levels and |j|_s <= annihilation order
  double worst_moment_residual() const;
  // measured sup |D^k K_n| / 2^{n(|s| - beta + |k|_s)} per level
  std::vector<double> scaling_ratios(const MultiIndex& k) const;

 private:
  GridPtr grid_;
  double beta_;
  int r0_;
  double r1_ = 0.125, r2_ = 0.25;  // plateau radii
  int max_deriv_ = 2;
  std::vector<std::map<std::string, Field>> level_fields_;  // [n][k.str()]
  std::map<std::string, Field> total_fields_;
};

}  // namespace rst
