#pragma once

#include <vector>

#include "rst/semigroup.hpp"

namespace rst {

// Local Besov seminorm in the kernel form: ell^q over dyadic levels of
// 2^{n alpha} L^p(K) norms of zeta_n = phi^n * zeta, with the extra base and
// difference terms when alpha >= 0.  p or q <= 0 stand for infinity.
struct BesovParams {
  double alpha = 0;
  double p = 2;     // <= 0: infinity
  double q = -1;    // <= 0: infinity
  int level_lo = 0;
  int level_hi = 6;
};

double besov_kernel_seminorm(const Field& zeta, const SemigroupKernel& sk,
                             const BesovParams& par, const Region& region,
                             const std::vector<TestFunction>& probes);

// Test-function form: the same quantity with sup over the probe family of
// |<zeta, eta_x^lambda>| at dyadic lambda = 2^{-n}.
double besov_testfn_seminorm(const Field& zeta, const BesovParams& par, const Region& region,
                             const std::vector<TestFunction>& probes);

}  // namespace rst
