#include "rst/kernel.hpp"

#include <Eigen/Dense>

#include <stdexcept>

#include "rst/profiles.hpp"
#include "rst/semigroup.hpp"

namespace rst {

namespace {

Dual2 scaled_radius_dual(const Grid& g, const std::vector<Dual2>& x) {
  Dual2 t = Dual2::constant(0.0);
  for (std::size_t a = 0; a < g.d; ++a) t = t + abs_pow(x[a], 1.0 / g.s[a]);
  return t;
}

}  // namespace

SingularKernel::SingularKernel(GridPtr grid, double beta, int annihilation_order)
    : grid_(std::move(grid)), beta_(beta), r0_(annihilation_order) {
  if (beta <= 0) throw std::invalid_argument("SingularKernel: beta must be positive");
  const Grid& g = *grid_;
  const double abs_s = g.total_s();
  double h = g.h(0);
  for (std::size_t a = 1; a < g.d; ++a) h = std::max(h, g.h(a));

  // finest level: the bump at scale 2^{-n-1} must stay resolved and its
  // support must sit inside the 4h comparison collar
  int n_max = 0;
  while (r2_ * std::pow(0.5, n_max + 1) > 4.0 * h) ++n_max;

  auto pows = moment_powers(g, r0_);

  // P_n profiles: bump of radius r2 * 2^{-n} with prescribed moments
  std::vector<std::vector<double>> p_coeffs(std::size_t(n_max) + 2);
  std::vector<double> prev_targets(pows.size(), 0.0);  // moments of P_n (P_0 = 0)

  auto ring_field = [&](int n, const MultiIndex& k) {
    // D^k of G * w_n evaluated analytically; w_n = chi(2^n .) - chi(2^{n+1} .)
    ProfileND prof([&, n](const std::vector<Dual2>& x) {
      Dual2 t = scaled_radius_dual(*grid_, x);
      if (t.v <= 1e-14) return Dual2::constant(0.0);
      double s1 = std::pow(2.0, n), s2 = std::pow(2.0, n + 1);
      Dual2 w = plateau(Dual2::constant(s1) * t, r1_, r2_) -
                plateau(Dual2::constant(s2) * t, r1_, r2_);
      if (w.v == 0.0 && w.d1 == 0.0 && w.d2 == 0.0) return Dual2::constant(0.0);
      Dual2 G = abs_pow(t, beta_ - abs_s);
      return G * w;
    });
    return Field::sample(grid_, [&](const std::vector<double>& xx) {
      std::vector<double> w(grid_->d);
      for (std::size_t a = 0; a < grid_->d; ++a) w[a] = grid_->wrap(xx[a], a);
      double t = 0;
      for (std::size_t a = 0; a < grid_->d; ++a)
        t += std::pow(std::fabs(w[a]), 1.0 / grid_->s[a]);
      // quick support test for the ring at level n
      double lo = r1_ * std::pow(0.5, n + 1), hi = r2_ * std::pow(0.5, n);
      if (t < lo || t > hi) return 0.0;
      return prof.deriv(w, k);
    });
  };

  auto bump_basis_field = [&](int n, const MultiIndex& j, const MultiIndex& k) {
    // D^k [ x^j b(|x|/(r2 2^{-n})) ]
    double radius = r2_ * std::pow(0.5, n);
    ProfileND prof([&, radius, j](const std::vector<Dual2>& x) {
      Dual2 t = scaled_radius_dual(*grid_, x) * Dual2::constant(1.0 / radius);
      Dual2 bv = bump(t);
      Dual2 q = Dual2::constant(1.0);
      for (std::size_t a = 0; a < x.size(); ++a)
        for (int p = 0; p < j[a]; ++p) q = q * x[a];
      return bv * q;
    });
    return Field::sample(grid_, [&](const std::vector<double>& xx) {
      std::vector<double> w(grid_->d);
      for (std::size_t a = 0; a < grid_->d; ++a) w[a] = grid_->wrap(xx[a], a);
      double t = 0;
      for (std::size_t a = 0; a < grid_->d; ++a)
        t += std::pow(std::fabs(w[a]), 1.0 / grid_->s[a]);
      if (t >= radius) return 0.0;
      return prof.deriv(w, k);
    });
  };

  // moment bookkeeping (k = 0 fields)
  std::vector<Field> ring0(std::size_t(n_max) + 1, Field(grid_));
  for (int n = 0; n <= n_max; ++n) ring0[std::size_t(n)] = ring_field(n, MultiIndex(g.d));

  std::vector<std::vector<Field>> pbasis0(std::size_t(n_max) + 2);
  for (int n = 1; n <= n_max + 1; ++n) {
    pbasis0[std::size_t(n)].reserve(pows.size());
    for (const auto& j : pows) pbasis0[std::size_t(n)].push_back(bump_basis_field(n, j, MultiIndex(g.d)));
  }

  for (int n = 0; n <= n_max; ++n) {
    // targets for P_{n+1}: moments of G w_n + P_n
    std::vector<double> targets(pows.size(), 0.0);
    for (std::size_t i = 0; i < pows.size(); ++i) {
      double m = ring0[std::size_t(n)].hadamard(monomial_field(grid_, pows[i])).integral();
      targets[i] = m + prev_targets[i];
    }
    // solve coefficients of P_{n+1} in its bump basis
    const auto& basis = pbasis0[std::size_t(n + 1)];
    Eigen::MatrixXd A(pows.size(), pows.size());
    for (std::size_t i = 0; i < pows.size(); ++i) {
      Field xi = monomial_field(grid_, pows[i]);
      for (std::size_t j = 0; j < pows.size(); ++j)
        A(Eigen::Index(i), Eigen::Index(j)) = basis[j].hadamard(xi).integral();
    }
    Eigen::VectorXd b(pows.size());
    for (std::size_t i = 0; i < pows.size(); ++i) b(Eigen::Index(i)) = targets[i];
    Eigen::VectorXd c = A.fullPivLu().solve(b);
    p_coeffs[std::size_t(n + 1)].resize(pows.size());
    for (std::size_t i = 0; i < pows.size(); ++i) p_coeffs[std::size_t(n + 1)][i] = c(Eigen::Index(i));
    prev_targets = targets;
  }

  // assemble K_n = G w_n + P_n - P_{n+1} and derivatives
  level_fields_.resize(std::size_t(n_max) + 1);
  std::vector<MultiIndex> derivs;
  {
    MultiIndex z(g.d);
    derivs.push_back(z);
    for (std::size_t a = 0; a < g.d; ++a) derivs.push_back(MultiIndex::unit(g.d, a));
    for (std::size_t a = 0; a < g.d; ++a) {
      MultiIndex two(g.d);
      two[a] = 2;
      derivs.push_back(two);
    }
  }
  for (const auto& k : derivs) {
    Field tot(grid_);
    for (int n = 0; n <= n_max; ++n) {
      Field Kn = k.is_zero() ? ring0[std::size_t(n)] : ring_field(n, k);
      if (n >= 1) {
        const auto& coef = p_coeffs[std::size_t(n)];
        for (std::size_t j = 0; j < pows.size(); ++j)
          if (coef[j] != 0.0) Kn += bump_basis_field(n, pows[j], k) * coef[j];
      }
      {
        const auto& coef = p_coeffs[std::size_t(n + 1)];
        for (std::size_t j = 0; j < pows.size(); ++j)
          if (coef[j] != 0.0) Kn += bump_basis_field(n + 1, pows[j], k) * (-coef[j]);
      }
      level_fields_[std::size_t(n)].emplace(k.str(), Kn);
      tot += Kn;
    }
    total_fields_.emplace(k.str(), tot);
  }
}

const Field& SingularKernel::level(int n, const MultiIndex& k) const {
  return level_fields_.at(std::size_t(n)).at(k.str());
}

const Field& SingularKernel::total(const MultiIndex& k) const {
  auto it = total_fields_.find(k.str());
  if (it == total_fields_.end())
    throw std::invalid_argument("SingularKernel: derivative " + k.str() + " not precomputed");
  return it->second;
}

double SingularKernel::reference_at(const std::vector<double>& x) const {
  const Grid& g = *grid_;
  double t = 0;
  for (std::size_t a = 0; a < g.d; ++a) t += std::pow(std::fabs(g.wrap(x[a], a)), 1.0 / g.s[a]);
  if (t <= 1e-14) return 0.0;
  double G = std::pow(t, beta_ - g.total_s());
  // outer plateau chi(t)
  double u = (t - r1_) / (r2_ - r1_);
  double chi;
  if (u <= 0)
    chi = 1.0;
  else if (u >= 1)
    chi = 0.0;
  else {
    double ea = std::exp(-1.0 / (1.0 - u));
    double eb = std::exp(-1.0 / u);
    chi = ea / (ea + eb);
  }
  return G * chi;
}

double SingularKernel::worst_moment_residual() const {
  auto pows = moment_powers(*grid_, r0_);
  double worst = 0;
  MultiIndex z(grid_->d);
  for (int n = 0; n < levels(); ++n) {
    for (const auto& j : pows) {
      double m = level(n, z).hadamard(monomial_field(grid_, j)).integral();
      worst = std::max(worst, std::fabs(m));
    }
  }
  return worst;
}

std::vector<double> SingularKernel::scaling_ratios(const MultiIndex& k) const {
  std::vector<double> out;
  const double abs_s = grid_->total_s();
  double kdeg = 0;
  for (std::size_t a = 0; a < grid_->d; ++a) kdeg += grid_->s[a] * k[a];
  for (int n = 0; n < levels(); ++n) {
    double bound = std::pow(2.0, n * (abs_s - beta_ + kdeg));
    out.push_back(level(n, k).sup_norm() / bound);
  }
  return out;
}

}  // namespace rst
