#include "rst/semigroup.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace rst {

Region Region::centered_fraction(const Grid& g, double frac) {
  Region r;
  r.lo.resize(g.d);
  r.hi.resize(g.d);
  for (std::size_t a = 0; a < g.d; ++a) {
    int w = std::max(1, int(g.n[a] * frac / 2));
    // centered at 0 with wrap: use [0, w) plus [n-w, n) folded into lo<hi via
    // a shifted window starting at -w
    r.lo[a] = -w;
    r.hi[a] = w;
  }
  return r;
}

namespace {
template <class Fn>
void for_each_region_index(const Grid& g, const Region& r, Fn&& fn) {
  std::vector<int> ix(g.d);
  std::function<void(std::size_t)> rec = [&](std::size_t axis) {
    if (axis == g.d) {
      fn(ix);
      return;
    }
    for (int v = r.lo[axis]; v < r.hi[axis]; ++v) {
      ix[axis] = v;
      rec(axis + 1);
    }
  };
  rec(0);
}
}  // namespace

double lp_norm_region(const Field& f, double p, const Region& r) {
  const Grid& g = *f.grid();
  double s = 0;
  for_each_region_index(g, r, [&](const std::vector<int>& ix) {
    s += std::pow(std::fabs(f.at(ix)), p);
  });
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

double sup_norm_region(const Field& f, const Region& r) {
  const Grid& g = *f.grid();
  double m = 0;
  for_each_region_index(g, r, [&](const std::vector<int>& ix) {
    m = std::max(m, std::fabs(f.at(ix)));
  });
  return m;
}

Field monomial_field(GridPtr g, const MultiIndex& k) {
  return Field::sample(g, [&](const std::vector<double>& x) {
    double v = 1;
    for (std::size_t a = 0; a < g->d; ++a) {
      double w = g->wrap(x[a], a);
      for (int p = 0; p < k[a]; ++p) v *= w;
    }
    return v;
  });
}

std::vector<MultiIndex> moment_powers(const Grid& g, int r) {
  std::vector<MultiIndex> pows;
  MultiIndex cur(g.d);
  std::function<void(std::size_t, double)> rec = [&](std::size_t axis, double acc) {
    if (axis == g.d) {
      pows.push_back(cur);
      return;
    }
    for (int v = 0;; ++v) {
      cur[axis] = v;
      double deg = acc + v * g.s[axis];
      if (deg > r + 1e-9) break;
      rec(axis + 1, deg);
    }
    cur[axis] = 0;
  };
  rec(0, 0.0);
  return pows;
}

std::vector<double> solve_moment_multiplier(const Field& bump_field,
                                            const std::vector<MultiIndex>& pows,
                                            const std::vector<double>& targets) {
  const GridPtr& g = bump_field.grid();
  const std::size_t m = pows.size();
  Eigen::MatrixXd A(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    Field xi = monomial_field(g, pows[i]);
    for (std::size_t j = 0; j < m; ++j) {
      Field xj = monomial_field(g, pows[j]);
      A(Eigen::Index(i), Eigen::Index(j)) = bump_field.hadamard(xi).hadamard(xj).integral();
    }
  }
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) b(Eigen::Index(i)) = targets[i];
  Eigen::VectorXd c = A.fullPivLu().solve(b);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = c(Eigen::Index(i));
  return out;
}

// --- TestFunction -------------------------------------------------------------

namespace {

double scaled_radius(const Grid& g, const std::vector<double>& arg) {
  double t = 0;
  for (std::size_t a = 0; a < g.d; ++a) t += std::pow(std::fabs(arg[a]), 1.0 / g.s[a]);
  return t;
}

double bump_value(double t) {  // supported on t < 1
  if (t >= 1.0 - 1e-12) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

}  // namespace

double TestFunction::value(const std::vector<double>& arg) const {
  double b = bump_value(scaled_radius(*grid_, arg) / radius_);
  if (b == 0.0) return 0.0;
  double poly = 0;
  for (std::size_t j = 0; j < pows_.size(); ++j) {
    double q = 1;
    for (std::size_t a = 0; a < grid_->d; ++a)
      for (int p = 0; p < pows_[j][a]; ++p) q *= arg[a];
    poly += coeffs_[j] * q;
  }
  return norm_scale_ * b * poly;
}

void TestFunction::normalize_cr() {
  // bound the profile and its first r axis-0 difference quotients on a fine
  // slice; this pins the C^r constant once and for all probes
  norm_scale_ = 1.0;
  const int probes = 4096;
  std::vector<double> vals(probes);
  for (int i = 0; i < probes; ++i) {
    std::vector<double> x(grid_->d, 0.0);
    x[0] = -1.0 + 2.0 * (i + 0.5) / probes;
    vals[std::size_t(i)] = value(x);
  }
  double dx = 2.0 / probes;
  double m = 0;
  for (int order = 0; order <= r_; ++order) {
    for (double v : vals) m = std::max(m, std::fabs(v));
    if (int(vals.size()) < 2) break;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) vals[i] = (vals[i + 1] - vals[i]) / dx;
    vals.pop_back();
  }
  if (m > 0) norm_scale_ = 1.0 / m;
}

TestFunction TestFunction::bump_profile(GridPtr grid, int smoothness) {
  return shaped_profile(grid, smoothness, MultiIndex(grid->d));
}

TestFunction TestFunction::shaped_profile(GridPtr grid, int smoothness, const MultiIndex& shape) {
  TestFunction f;
  f.grid_ = grid;
  f.r_ = smoothness;
  f.radius_ = 1.0;
  f.pows_ = {shape};
  f.coeffs_ = {1.0};
  f.normalize_cr();
  return f;
}

TestFunction TestFunction::annihilating_profile(GridPtr grid, int smoothness, int annihilation) {
  TestFunction f;
  f.grid_ = grid;
  f.r_ = smoothness;
  f.annihilation_ = annihilation;
  f.radius_ = 0.5;  // leave quadrature room inside the unit ball
  f.pows_ = moment_powers(*grid, annihilation + 1);
  Field b = Field::sample(grid, [&](const std::vector<double>& x) {
    std::vector<double> w(grid->d);
    for (std::size_t a = 0; a < grid->d; ++a) w[a] = grid->wrap(x[a], a);
    return bump_value(scaled_radius(*grid, w) / f.radius_);
  });
  // vanishing moments up to |k|_s <= annihilation, unit mass against the
  // first power beyond them
  std::vector<double> targets(f.pows_.size(), 0.0);
  for (std::size_t j = 0; j < f.pows_.size(); ++j) {
    double deg = 0;
    for (std::size_t a = 0; a < grid->d; ++a) deg += grid->s[a] * f.pows_[j][a];
    if (deg > annihilation + 1e-9) {
      targets[j] = 1.0;
      break;
    }
  }
  f.coeffs_ = solve_moment_multiplier(b, f.pows_, targets);
  f.normalize_cr();
  return f;
}

std::vector<TestFunction> TestFunction::family(GridPtr grid, int smoothness, int annihilation) {
  std::vector<TestFunction> fam;
  if (annihilation < 0) {
    fam.push_back(bump_profile(grid, smoothness));
    fam.push_back(shaped_profile(grid, smoothness, MultiIndex::unit(grid->d, 0)));
    MultiIndex two(grid->d);
    two[0] = 2;
    fam.push_back(shaped_profile(grid, smoothness, two));
  } else {
    fam.push_back(annihilating_profile(grid, smoothness, annihilation));
  }
  return fam;
}

Field TestFunction::place(const std::vector<double>& x, double lambda) const {
  const Grid& g = *grid_;
  for (std::size_t a = 0; a < g.d; ++a) {
    double support = std::pow(lambda, g.s[a]);
    if (support < 2.0 * g.h(a))
      throw std::invalid_argument("TestFunction: scale below the grid resolution guard");
    if (support > g.len[a] / 2)
      throw std::invalid_argument("TestFunction: scale exceeds the period");
  }
  double amp = 1.0;
  for (std::size_t a = 0; a < g.d; ++a) amp /= std::pow(lambda, g.s[a]);
  return Field::sample(grid_, [&](const std::vector<double>& y) {
    std::vector<double> arg(g.d);
    for (std::size_t a = 0; a < g.d; ++a)
      arg[a] = g.wrap(y[a] - x[a], a) / std::pow(lambda, g.s[a]);
    return amp * value(arg);
  });
}

// --- SemigroupKernel ----------------------------------------------------------

namespace {

// moment-corrected bump at dyadic level: radius_factor * 2^{-level} in the
// scaled norm, grid moments int f x^k = delta_{k0} for |k|_s <= r
Field corrected_level_bump(const GridPtr& g, int level, int r, double radius_factor) {
  double radius = radius_factor * std::pow(0.5, level);
  Field b = Field::sample(g, [&](const std::vector<double>& x) {
    std::vector<double> w(g->d);
    for (std::size_t a = 0; a < g->d; ++a) w[a] = g->wrap(x[a], a);
    return bump_value(scaled_radius(*g, w) / radius);
  });
  auto pows = moment_powers(*g, r);
  std::vector<double> targets(pows.size(), 0.0);
  targets[0] = 1.0;  // pows[0] is the zero multi-index (lexicographic first)
  auto coef = solve_moment_multiplier(b, pows, targets);
  Field out(g);
  for (std::size_t j = 0; j < pows.size(); ++j) {
    Field xj = monomial_field(g, pows[j]);
    Field term = b.hadamard(xj);
    out += term * coef[j];
  }
  return out;
}

}  // namespace

SemigroupKernel::SemigroupKernel(GridPtr grid, int moment_order)
    : grid_(std::move(grid)), r_(moment_order) {
  int n0 = grid_->n[0];
  for (std::size_t a = 1; a < grid_->d; ++a) n0 = std::min(n0, grid_->n[a]);
  max_level_ = 0;
  while ((0.5 * std::pow(0.5, max_level_ + 1)) >= 2.0 * (grid_->len[0] / n0) &&
         max_level_ < 30)
    ++max_level_;
  // rho^n for n = 0..P, each with exact grid moments at its own level
  for (int n = 0; n <= max_level_; ++n)
    rho_.push_back(corrected_level_bump(grid_, n, r_, 0.5));
  // phi^P = rho^P; phi^n = rho^n * phi^{n+1}
  phi_.assign(rho_.begin(), rho_.end());
  for (int n = max_level_ - 1; n >= 0; --n) phi_[std::size_t(n)] = convolve(rho_[std::size_t(n)], phi_[std::size_t(n + 1)]);
}

Field SemigroupKernel::smooth(const Field& zeta, int level) const {
  return convolve(phi(level), zeta);
}

double SemigroupKernel::worst_moment_residual() const {
  auto pows = moment_powers(*grid_, r_);
  double worst = 0;
  for (int n = 0; n <= max_level_; ++n) {
    for (std::size_t j = 0; j < pows.size(); ++j) {
      double m = rho_[std::size_t(n)].hadamard(monomial_field(grid_, pows[j])).integral();
      double target = pows[j].is_zero() ? 1.0 : 0.0;
      worst = std::max(worst, std::fabs(m - target));
    }
  }
  return worst;
}

// --- Mollifier ----------------------------------------------------------------

// Smooth spectral low-pass at dyadic cutoffs: the level-n multiplier is
// exp(-(q / q_n)^8) on the integer frequency index q with q_n = 2^n / radius
// factor.  The multiplier is exactly 1 at q = 0 (unit mass), bounded by 1
// (never amplifies), and flat at the origin (reproduces low polynomials away
// from the wrap seam).
Mollifier::Mollifier(GridPtr grid, int moment_order, double radius_factor)
    : grid_(std::move(grid)), r_(moment_order), radius_factor_(radius_factor) {
  int n0 = grid_->n[0];
  for (std::size_t a = 1; a < grid_->d; ++a) n0 = std::min(n0, grid_->n[a]);
  // the top level's soft cutoff may sit up to twice the Nyquist index
  int max_level = 0;
  while (std::pow(2.0, max_level + 1) / radius_factor_ <= double(n0) && max_level < 30)
    ++max_level;
  Field delta(grid_);
  delta[0] = 1.0 / grid_->cell_volume();
  for (int n = 0; n <= max_level; ++n) {
    const double qn = std::pow(2.0, n) / radius_factor_;
    Field rho = spectral_filter(delta, [&](const std::vector<double>& omega) {
      double q2 = 0;
      for (std::size_t a = 0; a < omega.size(); ++a) {
        double q = omega[a] * grid_->len[a] / (2.0 * M_PI);
        q2 += q * q;
      }
      double u = std::sqrt(q2) / qn;
      double u8 = u * u;
      u8 = u8 * u8;
      u8 = u8 * u8;
      return std::exp(-u8);
    });
    rho_.push_back(std::move(rho));
  }
}

Field Mollifier::deriv_level(int n, const MultiIndex& k) const {
  return spectral_derivative(rho_.at(std::size_t(n)), k);
}

}  // namespace rst