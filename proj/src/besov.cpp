#include "rst/besov.hpp"

#include <cmath>

namespace rst {

namespace {

double lq_accumulate(const std::vector<double>& terms, double q) {
  if (q <= 0) {
    double m = 0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  double s = 0;
  for (double t : terms) s += std::pow(t, q);
  return std::pow(s, 1.0 / q);
}

double lp_region(const Field& f, double p, const Region& r) {
  return p <= 0 ? sup_norm_region(f, r) : lp_norm_region(f, p, r);
}

// field of probe pairings x -> sup_eta |<zeta, eta_x^lambda>| via convolution
Field probe_sup_field(const Field& zeta, const std::vector<TestFunction>& probes,
                      double lambda) {
  Field sup(zeta.grid());
  std::vector<double> origin(zeta.grid()->d, 0.0);
  for (const auto& eta : probes) {
    Field placed = eta.place(origin, lambda);
    // <zeta, eta_x^lambda> = (eta~^lambda * zeta)(x) with eta~(y) = eta(-y)
    Field reflected(zeta.grid());
    const Grid& g = *zeta.grid();
    for (std::size_t i = 0; i < placed.size(); ++i) {
      auto ix = g.unflat(i);
      std::vector<int> neg(g.d);
      for (std::size_t a = 0; a < g.d; ++a) neg[a] = -ix[a];
      reflected[g.flat(neg)] = placed[i];
    }
    Field pair = convolve(reflected, zeta);
    for (std::size_t i = 0; i < sup.size(); ++i)
      sup[i] = std::max(sup[i], std::fabs(pair[i]));
  }
  return sup;
}

}  // namespace

double besov_kernel_seminorm(const Field& zeta, const SemigroupKernel& sk,
                             const BesovParams& par, const Region& region,
                             const std::vector<TestFunction>& probes) {
  std::vector<double> terms;
  if (par.alpha < 0) {
    for (int n = par.level_lo; n <= par.level_hi; ++n) {
      Field zn = sk.smooth(zeta, n);
      terms.push_back(std::pow(2.0, n * par.alpha) * lp_region(zn, par.p, region));
    }
    return lq_accumulate(terms, par.q);
  }
  // alpha >= 0: base term + probe sup at matching scale + level differences
  Field z0 = sk.smooth(zeta, par.level_lo);
  double base = lp_region(z0, par.p, region);
  for (int n = par.level_lo; n <= par.level_hi; ++n) {
    Field zn = sk.smooth(zeta, n);
    double t = 0;
    if (!probes.empty()) {
      Field sup = probe_sup_field(zn, probes, std::pow(2.0, -n));
      t += std::pow(2.0, n * par.alpha) * lp_region(sup, par.p, region);
    }
    if (n < par.level_hi) {
      Field diff = sk.smooth(zeta, n + 1) - zn;
      t += std::pow(2.0, n * par.alpha) * lp_region(diff, par.p, region);
    }
    terms.push_back(t);
  }
  return base + lq_accumulate(terms, par.q);
}

double besov_testfn_seminorm(const Field& zeta, const BesovParams& par, const Region& region,
                             const std::vector<TestFunction>& probes) {
  std::vector<double> terms;
  for (int n = par.level_lo; n <= par.level_hi; ++n) {
    Field sup = probe_sup_field(zeta, probes, std::pow(2.0, -n));
    // lambda^{-alpha} with lambda = 2^{-n}
    terms.push_back(std::pow(2.0, n * par.alpha) * lp_region(sup, par.p, region));
  }
  return lq_accumulate(terms, par.q);
}

}  // namespace rst
