#include "rst/mdist.hpp"

#include <algorithm>
#include <cmath>

#include "rst/besov.hpp"
#include "rst/profiles.hpp"
#include "rst/util.hpp"

namespace rst {

void ModelledField::set(const TreePtr& tau, Field coeff) {
  coeffs_[tau->key()] = {tau, std::move(coeff)};
}

void ModelledField::add(const TreePtr& tau, const Field& coeff, double scale) {
  auto it = coeffs_.find(tau->key());
  if (it == coeffs_.end()) {
    coeffs_[tau->key()] = {tau, coeff * scale};
  } else {
    it->second.second += coeff * scale;
  }
}

const Field* ModelledField::coeff(const std::string& key) const {
  auto it = coeffs_.find(key);
  return it == coeffs_.end() ? nullptr : &it->second.second;
}

ModelledField ModelledField::projected(double bound) const {
  ModelledField out(model_, std::min(gamma_, bound));
  for (const auto& [k, tc] : coeffs_)
    if (tc.first->degree().to_double() < bound - 1e-12) out.set(tc.first, tc.second);
  return out;
}

ModelledField ModelledField::operator*(double c) const {
  ModelledField out(model_, gamma_);
  for (const auto& [k, tc] : coeffs_) out.set(tc.first, tc.second * c);
  return out;
}

ModelledField ModelledField::operator+(const ModelledField& o) const {
  ModelledField out(model_, std::max(gamma_, o.gamma_));
  for (const auto& [k, tc] : coeffs_) out.set(tc.first, tc.second);
  for (const auto& [k, tc] : o.coeffs_) out.add(tc.first, tc.second);
  return out;
}

ModelledField ModelledField::operator-(const ModelledField& o) const {
  return *this + (o * -1.0);
}

std::vector<double> ModelledField::degrees() const {
  std::vector<double> out;
  for (const auto& [k, tc] : coeffs_) {
    double d = tc.first->degree().to_double();
    bool found = false;
    for (double v : out)
      if (std::fabs(v - d) < 1e-12) found = true;
    if (!found) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Field ModelledField::component_norm(double zeta) const {
  Field out(model_->grid());
  for (const auto& [k, tc] : coeffs_) {
    if (std::fabs(tc.first->degree().to_double() - zeta) > 1e-12) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += tc.second[i] * tc.second[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(out[i]);
  return out;
}

// --- structure matrix machinery ------------------------------------------------

namespace {

struct StructureMatrix {
  // F_x tau = tau + sum_sigma c[tau][sigma](x) sigma over the leg closure;
  // trees ordered by ascending degree for the triangular solves
  std::vector<TreePtr> trees;                       // ascending degree
  std::map<std::string, std::size_t> index;
  std::vector<std::map<std::size_t, Field>> rows;   // rows[tau][sigma] = c field
};

Field character_monomial_field(const Model& model, const TPlusMonomial& mono) {
  const GridPtr& g = model.grid();
  Field out = Field::sample(g, [](const std::vector<double>&) { return 1.0; });
  // f_x(X^m) = (-wrap(x))^m
  if (!mono.x().is_zero()) {
    Field coords = Field::sample(g, [&](const std::vector<double>& x) {
      double v = 1;
      for (std::size_t a = 0; a < g->d; ++a)
        for (int p = 0; p < mono.x()[a]; ++p) v *= -g->wrap(x[a], a);
      return v;
    });
    out = out.hadamard(coords);
  }
  for (const auto& f : mono.factors()) out = out.hadamard(model.fx_field(f));
  return out;
}

StructureMatrix build_structure_matrix(const Model& model,
                                       const std::vector<TreePtr>& seed_trees) {
  StructureMatrix sm;
  auto& H = *model.hopf();
  // leg closure
  std::map<std::string, TreePtr> pool;
  std::vector<TreePtr> queue = seed_trees;
  while (!queue.empty()) {
    TreePtr t = queue.back();
    queue.pop_back();
    if (pool.count(t->key())) continue;
    pool.emplace(t->key(), t);
    H.delta(t).for_each([&](const TensorKey& key, const double&) {
      if (!pool.count(key.left->key())) queue.push_back(key.left);
    });
  }
  for (auto& [k, t] : pool) sm.trees.push_back(t);
  std::sort(sm.trees.begin(), sm.trees.end(), [](const TreePtr& a, const TreePtr& b) {
    if (a->degree() != b->degree()) return a->degree() < b->degree();
    return a->key() < b->key();
  });
  for (std::size_t i = 0; i < sm.trees.size(); ++i) sm.index[sm.trees[i]->key()] = i;

  sm.rows.resize(sm.trees.size());
  for (std::size_t i = 0; i < sm.trees.size(); ++i) {
    H.delta(sm.trees[i]).for_each([&](const TensorKey& key, const double& c) {
      std::size_t j = sm.index.at(key.left->key());
      if (j == i && key.right.is_one()) return;  // unit diagonal
      Field contrib = character_monomial_field(model, key.right) * c;
      auto it = sm.rows[i].find(j);
      if (it == sm.rows[i].end())
        sm.rows[i].emplace(j, std::move(contrib));
      else
        it->second += contrib;
    });
  }
  return sm;
}

// coefficients of F_x applied to f: u_sigma = f_sigma + sum_tau f_tau c[tau][sigma]
std::vector<Field> matrix_apply(const StructureMatrix& sm, const std::vector<Field>& f) {
  std::vector<Field> u = f;
  for (std::size_t i = 0; i < sm.trees.size(); ++i) {
    if (f[i].size() == 0) continue;
    for (const auto& [j, c] : sm.rows[i]) {
      Field add = f[i].hadamard(c);
      if (u[j].size() == 0)
        u[j] = std::move(add);
      else
        u[j] += add;
    }
  }
  return u;
}

// solve F(x+h) w = u with the matrix fields shifted by the offset
std::vector<Field> matrix_solve_shifted(const StructureMatrix& sm, const std::vector<Field>& u,
                                        const std::vector<int>& offset) {
  std::vector<Field> w = u;
  // descending degree: subtract w_tau * shifted c[tau][sigma]
  for (std::size_t ii = sm.trees.size(); ii-- > 0;) {
    if (w[ii].size() == 0) continue;
    for (const auto& [j, c] : sm.rows[ii]) {
      Field sub = w[ii].hadamard(shift_field(c, offset));
      if (w[j].size() == 0)
        w[j] = sub * -1.0;
      else
        w[j] -= sub;
    }
  }
  return w;
}

// Delta_h f(x) = f(x+h) - Gamma_{x+h,x} f(x) as a modelled field over x
ModelledField translation_difference(const ModelledField& f, const StructureMatrix& sm,
                                     const std::vector<int>& offset) {
  const auto& model = *f.model();
  std::vector<Field> vec(sm.trees.size());
  for (const auto& [k, tc] : f.coeffs()) vec[sm.index.at(k)] = tc.second;
  std::vector<Field> u = matrix_apply(sm, vec);
  std::vector<Field> w = matrix_solve_shifted(sm, u, offset);
  ModelledField out(f.model(), f.gamma());
  for (std::size_t i = 0; i < sm.trees.size(); ++i) {
    Field shifted = f.coeff(sm.trees[i]->key())
                        ? shift_field(*f.coeff(sm.trees[i]->key()), offset)
                        : Field(model.grid());
    if (w[i].size() == 0 && shifted.size() == 0) continue;
    Field diff = shifted.size() == 0 ? w[i] * -1.0
                                     : (w[i].size() == 0 ? shifted : shifted - w[i]);
    out.set(sm.trees[i], std::move(diff));
  }
  return out;
}

std::vector<std::vector<int>> shell_offsets(const Grid& g, int shell, int per_direction) {
  // integer offsets h with |h|_s in [2^{-shell-1}, 2^{-shell})
  std::vector<std::vector<int>> out;
  double lo = std::pow(0.5, shell + 1), hi = std::pow(0.5, shell);
  if (g.d == 1) {
    int jlo = std::max(1, int(std::ceil(lo / g.h(0))));
    int jhi = std::max(jlo, int(std::floor(hi / g.h(0))) - 1);
    int count = std::max(1, per_direction);
    for (int c = 0; c < count; ++c) {
      int j = jlo + (jhi - jlo) * c / std::max(1, count - 1);
      out.push_back({j});
      out.push_back({-j});
    }
  } else {
    // axis-aligned offsets per axis
    for (std::size_t a = 0; a < g.d; ++a) {
      double step = g.h(a);
      int j = std::max(1, int(std::floor(0.75 * hi / step)));
      std::vector<int> off(g.d, 0);
      off[a] = j;
      out.push_back(off);
      off[a] = -j;
      out.push_back(off);
    }
  }
  // dedupe
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ModelledField gamma_lift(std::shared_ptr<const Model> model, const TreePtr& tau,
                         const std::vector<double>& x, double gamma) {
  StructureMatrix sm = build_structure_matrix(*model, {tau});
  const GridPtr& g = model->grid();
  std::vector<int> xi(g->d);
  for (std::size_t a = 0; a < g->d; ++a) xi[a] = int(std::llround(x[a] / g->h(a)));
  // v = coefficients of F_x tau at the fixed point x
  std::vector<double> v(sm.trees.size(), 0.0);
  v[sm.index.at(tau->key())] = 1.0;
  {
    std::size_t i = sm.index.at(tau->key());
    for (const auto& [j, c] : sm.rows[i]) v[j] += c.at(xi);
  }
  // solve F(y) w(y) = v fieldwise, descending degree
  std::vector<Field> w(sm.trees.size());
  for (std::size_t i = 0; i < sm.trees.size(); ++i)
    if (v[i] != 0.0) w[i] = Field::sample(g, [&](const std::vector<double>&) { return v[i]; });
  for (std::size_t ii = sm.trees.size(); ii-- > 0;) {
    if (w[ii].size() == 0) continue;
    for (const auto& [j, c] : sm.rows[ii]) {
      Field sub = w[ii].hadamard(c);
      if (w[j].size() == 0)
        w[j] = sub * -1.0;
      else
        w[j] -= sub;
    }
  }
  ModelledField out(model, gamma);
  for (std::size_t i = 0; i < sm.trees.size(); ++i) {
    if (w[i].size() == 0) continue;
    if (sm.trees[i]->degree().to_double() >= gamma - 1e-12) continue;
    out.set(sm.trees[i], std::move(w[i]));
  }
  return out;
}

ModelledField taylor_lift(std::shared_ptr<const Model> model, const Field& g,
                          double gamma) {
  const GridPtr& grid = model->grid();
  ModelledField out(model, gamma);
  const auto& ctx = model->structure().context();
  Rational bound(std::llround(gamma * 1000000), 1000000);
  for_each_multiindex_below(ctx->scaling.s, bound, [&](const MultiIndex& k) {
    Field dk = k.is_zero() ? g : spectral_derivative(g, k);
    out.set(Tree::poly(ctx, k), dk * (1.0 / k.factorial().to_double()));
  });
  return out;
}

MdNorm md_norm(const ModelledField& f, double p, double q, const Region& region, int shell_lo,
               int shell_hi) {
  MdNorm out;
  for (double zeta : f.degrees()) {
    Field cn = f.component_norm(zeta);
    double v = p <= 0 ? sup_norm_region(cn, region) : lp_norm_region(cn, p, region);
    out.local = std::max(out.local, v);
  }

  StructureMatrix sm = build_structure_matrix(*f.model(), [&] {
    std::vector<TreePtr> seeds;
    for (const auto& [k, tc] : f.coeffs()) seeds.push_back(tc.first);
    return seeds;
  }());
  const Grid& g = *f.model()->grid();
  std::vector<double> shell_terms;
  for (int m = shell_lo; m <= shell_hi; ++m) {
    double shell_acc = 0;
    int shell_n = 0;
    for (const auto& off : shell_offsets(g, m, 2)) {
      std::vector<double> hvec(g.d);
      for (std::size_t a = 0; a < g.d; ++a) hvec[a] = off[a] * g.h(a);
      double hnorm = g.snorm(hvec);
      if (hnorm <= 0) continue;
      ModelledField diff = translation_difference(f, sm, off);
      double worst = 0;
      for (double zeta : f.degrees()) {
        Field cn = diff.component_norm(zeta);
        double v = p <= 0 ? sup_norm_region(cn, region) : lp_norm_region(cn, p, region);
        worst = std::max(worst, v / std::pow(hnorm, f.gamma() - zeta));
      }
      shell_acc += worst;
      ++shell_n;
    }
    if (shell_n) shell_terms.push_back(shell_acc / shell_n);
  }
  if (q <= 0) {
    for (double t : shell_terms) out.translation = std::max(out.translation, t);
  } else {
    double s = 0;
    for (double t : shell_terms) s += std::pow(t, q);
    out.translation = std::pow(s, 1.0 / q);
  }
  return out;
}

namespace {

double lp_ball(const Field& f, double p, const std::vector<double>& x, double lambda) {
  const Grid& g = *f.grid();
  double acc = 0, sup = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto y = g.point(g.unflat(i));
    if (g.snorm(g.displacement(y, x)) > lambda) continue;
    acc += std::pow(std::fabs(f[i]), p);
    sup = std::max(sup, std::fabs(f[i]));
  }
  return p <= 0 ? sup : std::pow(acc * g.cell_volume(), 1.0 / p);
}

}  // namespace

double pointed_norm(const ModelledField& f, const PointedSpec& spec, int level_lo,
                    int level_hi) {
  double out = 0;
  const Grid& g = *f.model()->grid();
  StructureMatrix sm = build_structure_matrix(*f.model(), [&] {
    std::vector<TreePtr> seeds;
    for (const auto& [k, tc] : f.coeffs()) seeds.push_back(tc.first);
    return seeds;
  }());
  for (int m = level_lo; m <= level_hi; ++m) {
    double lambda = std::pow(0.5, m);
    // local bound
    for (double zeta : f.degrees()) {
      Field cn = f.component_norm(zeta);
      double v = lp_ball(cn, spec.p, spec.x, lambda);
      out = std::max(out, v / std::pow(lambda, spec.nu - zeta));
    }
    // translation bound over |h|_s <= lambda
    for (int shell = m; shell <= std::min(level_hi + 1, m + 2); ++shell) {
      for (const auto& off : shell_offsets(g, shell, 1)) {
        std::vector<double> hvec(g.d);
        for (std::size_t a = 0; a < g.d; ++a) hvec[a] = off[a] * g.h(a);
        double hnorm = g.snorm(hvec);
        if (hnorm <= 0 || hnorm > lambda) continue;
        ModelledField diff = translation_difference(f, sm, off);
        for (double zeta : f.degrees()) {
          Field cn = diff.component_norm(zeta);
          double v = lp_ball(cn, spec.p, spec.x, lambda);
          out = std::max(out, v / (std::pow(hnorm, f.gamma() - zeta) *
                                   std::pow(lambda, spec.nu - f.gamma())));
        }
      }
    }
  }
  return out;
}

Field reconstruct(const ModelledField& f, const SemigroupKernel& sk, int level) {
  Field out(f.model()->grid());
  for (const auto& [k, tc] : f.coeffs()) {
    Field pf = f.model()->renormalised_terms(tc.first).pair_kernel(sk.phi(level));
    out += tc.second.hadamard(pf);
  }
  return out;
}

Field reconstruct_pointwise(const ModelledField& f) {
  Field out(f.model()->grid());
  for (const auto& [k, tc] : f.coeffs()) {
    Field diag = f.model()->renormalised_terms(tc.first).diagonal();
    out += tc.second.hadamard(diag);
  }
  return out;
}

double pair_distribution(const Field& rf, const Field& placed_psi) {
  return rf.hadamard(placed_psi).integral();
}

CandidateReport candidate_check(const ModelledField& f, double gamma, const Field& zeta,
                                const std::vector<TestFunction>& probes, double p,
                                const Region& region, int level_lo, int level_hi) {
  CandidateReport rep;
  const GridPtr& g = f.model()->grid();
  std::vector<double> origin(g->d, 0.0);
  for (int n = level_lo; n <= level_hi; ++n) {
    double lambda = std::pow(0.5, n);
    Field sup(g);
    for (const auto& eta : probes) {
      // <zeta, eta_x^lambda>
      Field placed = eta.place(origin, lambda);
      Field reflected(g);
      const Grid& gg = *g;
      for (std::size_t i = 0; i < placed.size(); ++i) {
        auto ix = gg.unflat(i);
        std::vector<int> neg(gg.d);
        for (std::size_t a = 0; a < gg.d; ++a) neg[a] = -ix[a];
        reflected[gg.flat(neg)] = placed[i];
      }
      Field pairing = convolve(reflected, zeta);
      // <Pi_x f(x), eta_x^lambda>
      for (const auto& [key, tc] : f.coeffs()) {
        Field pc = f.model()->renormalised_terms(tc.first).pair_centered(eta, lambda);
        pairing -= tc.second.hadamard(pc);
      }
      for (std::size_t i = 0; i < sup.size(); ++i)
        sup[i] = std::max(sup[i], std::fabs(pairing[i]));
    }
    double v = p <= 0 ? sup_norm_region(sup, region) : lp_norm_region(sup, p, region);
    rep.per_level.push_back(v / std::pow(lambda, gamma));
  }
  for (double v : rep.per_level) rep.constant = std::max(rep.constant, v);
  // a candidate needs bounded constants: flag sustained geometric growth of
  // the tail, not the pre-saturation rise of the first levels
  if (rep.per_level.size() >= 3) {
    std::size_t n = rep.per_level.size();
    double tail = std::log2(std::max(rep.per_level[n - 1], 1e-300)) -
                  std::log2(std::max(rep.per_level[n - 2], 1e-300));
    rep.growing = tail > 0.3 && rep.per_level[n - 1] > 1e-8;
  }
  return rep;
}

ModelledField pointed_multiply(const ModelledField& f1, const ModelledField& f2) {
  auto min_degree = [](const ModelledField& f) {
    double a = 0;
    bool first = true;
    for (const auto& [k, tc] : f.coeffs()) {
      double d = tc.first->degree().to_double();
      if (first || d < a) a = d;
      first = false;
    }
    return first ? 0.0 : std::min(a, 0.0);
  };
  double alpha1 = min_degree(f1), alpha2 = min_degree(f2);
  double gamma = std::min(f1.gamma() + alpha2, f2.gamma() + alpha1);
  ModelledField out(f1.model(), gamma);
  for (const auto& [k1, tc1] : f1.coeffs()) {
    for (const auto& [k2, tc2] : f2.coeffs()) {
      TreePtr prod;
      try {
        prod = tree_product(tc1.first, tc2.first);
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument("pointed_multiply: undefined tree product " + k1 + " * " +
                                    k2);
      }
      if (prod->degree().to_double() >= gamma - 1e-12) continue;
      out.add(prod, tc1.second.hadamard(tc2.second));
    }
  }
  return out;
}

ModelledField localize(const ModelledField& f, double lambda, const std::vector<double>& x,
                       int jet_order) {
  const GridPtr& g = f.model()->grid();
  const auto& ctx = f.model()->structure().context();
  // chi plateau: 1 for |u|_s <= 2, 0 beyond 4, evaluated at u = (y-x)/lambda
  ProfileND chi([&](const std::vector<Dual2>& u) {
    Dual2 t = Dual2::constant(0.0);
    for (std::size_t a = 0; a < u.size(); ++a) t = t + abs_pow(u[a], 1.0 / g->s[a]);
    return plateau(t, 2.0, 4.0);
  });
  ModelledField lift(f.model(), double(jet_order));
  for_each_multiindex_below(ctx->scaling.s, Rational(jet_order), [&](const MultiIndex& k) {
    double scale = 1.0;
    for (std::size_t a = 0; a < g->d; ++a)
      scale /= std::pow(std::pow(lambda, g->s[a]), double(k[a]));
    Field coeff = Field::sample(g, [&](const std::vector<double>& y) {
      std::vector<double> u(g->d);
      for (std::size_t a = 0; a < g->d; ++a)
        u[a] = g->wrap(y[a] - x[a], a) / std::pow(lambda, g->s[a]);
      return chi.deriv(u, k);
    });
    lift.add(Tree::poly(ctx, k), coeff * (scale / k.factorial().to_double()));
  });
  ModelledField out(f.model(), f.gamma());
  for (const auto& [k1, tc1] : f.coeffs()) {
    for (const auto& [k2, tc2] : lift.coeffs()) {
      TreePtr prod = tree_product(tc1.first, tc2.first);
      if (prod->degree().to_double() >= f.gamma() - 1e-12) continue;
      out.add(prod, tc1.second.hadamard(tc2.second));
    }
  }
  return out;
}

ModelledField pointed_schauder(const ModelledField& f, const std::string& kernel_label,
                               const PointedSpec& spec, const Field& rf) {
  const Model& model = *f.model();
  const auto& ctx = model.structure().context();
  const GridPtr& g = model.grid();
  LabelId label = ctx->labels.find(kernel_label);
  const SingularKernel& K = model.kernels().of(kernel_label);
  const double beta = ctx->labels[label].degree.to_double();
  const double abs_s = g->total_s();
  const double out_gamma = spec.gamma + beta;
  const double jet_bound = spec.nu + beta - abs_s / spec.p;

  ModelledField out(f.model(), out_gamma);

  // I part: plant each non-polynomial component
  for (const auto& [key, tc] : f.coeffs()) {
    if (tc.first->is_polynomial()) continue;
    TreePtr planted = plant(label, MultiIndex(g->d), tc.first);
    if (planted && planted->degree().to_double() < out_gamma - 1e-12)
      out.add(planted, tc.second);
  }

  // J part: sum_{|k| < |tau| + beta} X^k/k! (D^k K * Pi_y tau)(y) f_tau(y)
  for (const auto& [key, tc] : f.coeffs()) {
    Rational jb = tc.first->degree() + ctx->labels[label].degree;
    if (!jb.is_positive()) continue;
    for_each_multiindex_below(ctx->scaling.s, jb, [&](const MultiIndex& k) {
      if (ctx->scaling.degree(k).to_double() >= out_gamma - 1e-12) return;
      Field diag = model.kernel_diag(label, k, tc.first);
      out.add(Tree::poly(ctx, k),
              tc.second.hadamard(diag) * (1.0 / k.factorial().to_double()));
    });
  }

  // N_gamma part: X^k/k! [D^k K * (R f - Pi_y f(y))](y)
  {
    Rational nb(std::llround((spec.gamma + beta) * 1000000), 1000000);
    for_each_multiindex_below(ctx->scaling.s, nb, [&](const MultiIndex& k) {
      Field term = convolve(K.total(k), rf);
      for (const auto& [key, tc] : f.coeffs()) {
        Field diag = model.kernel_diag(label, k, tc.first);
        term -= tc.second.hadamard(diag);
      }
      out.add(Tree::poly(ctx, k), term * (1.0 / k.factorial().to_double()));
    });
  }

  // T^x part: -Q_{<out_gamma} sum_{|k| < jet_bound} (X + y - x)^k / k! (D^k K * R f)(x)
  {
    std::vector<int> xi(g->d);
    for (std::size_t a = 0; a < g->d; ++a) xi[a] = int(std::llround(spec.x[a] / g->h(a)));
    Rational tb(std::llround(jet_bound * 1000000), 1000000);
    if (tb.is_positive()) {
      for_each_multiindex_below(ctx->scaling.s, tb, [&](const MultiIndex& k) {
        double vk = convolve(K.total(k), rf).at(xi);
        // expand (X + y - x)^k binomially into X^a (y-x)^{k-a}
        MultiIndex a(g->d);
        std::function<void(std::size_t)> rec = [&](std::size_t axis) {
          if (axis == g->d) {
            if (ctx->scaling.degree(a).to_double() >= out_gamma - 1e-12) return;
            MultiIndex rem = k - a;
            Field mono = Field::sample(g, [&](const std::vector<double>& y) {
              double v = 1;
              for (std::size_t ax = 0; ax < g->d; ++ax) {
                double dy = g->wrap(y[ax] - spec.x[ax], ax);
                for (int p = 0; p < rem[ax]; ++p) v *= dy;
              }
              return v;
            });
            double c = k.binomial(a).to_double() / k.factorial().to_double();
            out.add(Tree::poly(ctx, a), mono * (-c * vk));
            return;
          }
          for (int v = 0; v <= k[axis]; ++v) {
            a[axis] = v;
            rec(axis + 1);
          }
          a[axis] = 0;
        };
        rec(0);
      });
    }
  }
  return out;
}

ModelledField abstract_gradient(const ModelledField& f, const MultiIndex& k) {
  const auto& ctx = f.model()->structure().context();
  ModelledField out(f.model(), f.gamma() - ctx->scaling.degree(k).to_double());
  for (const auto& [key, tc] : f.coeffs()) {
    const TreePtr& t = tc.first;
    if (t->is_polynomial()) {
      const MultiIndex& j = t->root_dec();
      if (!j.dominates(k)) continue;
      double factor = 1;
      for (std::size_t a = 0; a < j.dim(); ++a)
        for (int p = 0; p < k[a]; ++p) factor *= double(j[a] - p);
      out.add(Tree::poly(ctx, j - k), tc.second * factor);
      continue;
    }
    if (t->branches().size() == 1 && t->root_dec().is_zero() &&
        ctx->labels[t->branches()[0].label].kind == LabelKind::Kernel) {
      const auto& b = t->branches()[0];
      out.add(graft(b.label, b.edge_dec + k, b.child), tc.second);
      continue;
    }
    throw std::invalid_argument("abstract_gradient: component outside the planted/polynomial "
                                "sector: " + key);
  }
  return out;
}

double sobolev_coeff_norm(const ModelledField& f, const SemigroupKernel& sk, double kappa,
                          double p, const Region& region, int level_hi) {
  BesovParams par;
  par.alpha = -kappa;
  par.p = p;
  par.q = p;
  par.level_lo = 0;
  par.level_hi = level_hi;
  double out = 0;
  for (const auto& [key, tc] : f.coeffs())
    out = std::max(out, besov_kernel_seminorm(tc.second, sk, par, region, {}));
  return out;
}

}  // namespace rst
