#include "rst/frechet.hpp"

#include <cmath>

#include "rst/util.hpp"

namespace rst {

TreeDegrees tree_degrees(const Model& model, const TreePtr& tau, double kappa_bar) {
  TreeDegrees td;
  const double abs_s = model.grid()->total_s();
  double alpha = 1e300;
  model.hopf()->delta(tau).for_each([&](const TensorKey& key, const double&) {
    if (key.left->is_polynomial()) return;
    alpha = std::min(alpha, key.left->degree().to_double());
  });
  if (alpha > 1e299) alpha = 1e300;  // purely polynomial sector
  td.alpha = alpha;
  td.gamma_tau = alpha + abs_s / 2.0 - tau->noise_count() * kappa_bar;
  td.deg2 = tau->degree().to_double() + abs_s / 2.0;
  // no integer may sit in [gamma_tau, alpha + |s|/2)
  if (alpha < 1e299) {
    double hi = alpha + abs_s / 2.0;
    double k = std::ceil(td.gamma_tau);
    if (k < hi && k >= td.gamma_tau && std::fabs(k - std::round(k)) < 1e-12)
      throw std::invalid_argument("tree_degrees: kappa_bar puts an integer inside [gamma_tau, "
                                  "alpha + |s|/2) for " + tau->key());
  }
  return td;
}

bool is_bad_tree(const Model& model, const TreePtr& tau) {
  const auto& ctx = model.structure().context();
  const double half_s = model.grid()->total_s() / 2.0;
  int bad_noises = 0;
  for (const auto& b : tau->branches()) {
    const Label& lab = ctx->labels[b.label];
    if (lab.kind == LabelKind::Noise) {
      if (lab.degree.to_double() - ctx->scaling.degree(b.edge_dec).to_double() < -half_s)
        ++bad_noises;
      else
        return false;  // a tame noise at the root breaks the pattern
    }
    // kernel branches are allowed arbitrarily (the I(sigma_i) factors)
  }
  return bad_noises == 1;
}

HFamily::HFamily(std::shared_ptr<const Model> model, const SemigroupKernel* sk, Direction eta,
                 std::vector<double> base_point, double kappa_bar)
    : model_(std::move(model)),
      sk_(sk),
      eta_(std::move(eta)),
      x_(std::move(base_point)),
      kappa_bar_(kappa_bar) {}

Field HFamily::eta_level(const std::string& label) {
  auto it = eta_smooth_.find(label);
  if (it != eta_smooth_.end()) return it->second;
  Field f = model_->mollifier()->apply(eta_.fields.at(label), model_->mollification_level());
  eta_smooth_.emplace(label, f);
  return f;
}

const HResult& HFamily::of(const TreePtr& tau) {
  auto it = memo_.find(tau->key());
  if (it != memo_.end()) return it->second;
  HResult r = build(tau);
  return memo_.emplace(tau->key(), std::move(r)).first->second;
}

Field HFamily::reconstruction(const TreePtr& tau) {
  const HResult& r = of(tau);
  if (r.has_candidate) return r.candidate;
  return reconstruct_pointwise(r.field);
}

HResult HFamily::build(const TreePtr& tau) {
  const auto& ctx = model_->structure().context();
  const GridPtr& g = model_->grid();
  TreeDegrees td = tree_degrees(*model_, tau, kappa_bar_);

  HResult out;
  out.spec = PointedSpec{td.gamma_tau, td.deg2, x_, 2.0};
  out.field = ModelledField(model_, td.gamma_tau);

  // polynomials: H = 0
  if (tau->is_polynomial()) return out;

  // bare noise
  if (tau->is_bare_noise()) {
    const auto& b = tau->branches()[0];
    const Label& lab = ctx->labels[b.label];
    Field etan = b.edge_dec.is_zero()
                     ? eta_level(lab.name)
                     : convolve(model_->mollifier()->deriv_level(model_->mollification_level(),
                                                                 b.edge_dec),
                                eta_.fields.at(lab.name));
    if (td.gamma_tau <= 0) {
      out.has_candidate = true;
      out.candidate = etan;
      return out;
    }
    // H = sum_{|k| < gamma} X^k/k! [D^k eta^n - P_x^{|t|} jet]
    std::vector<int> xi(g->d);
    for (std::size_t a = 0; a < g->d; ++a) xi[a] = int(std::llround(x_[a] / g->h(a)));
    Rational gbound(std::llround(td.gamma_tau * 1000000), 1000000);
    double noise_deg = lab.degree.to_double() - ctx->scaling.degree(b.edge_dec).to_double();
    for_each_multiindex_below(ctx->scaling.s, gbound, [&](const MultiIndex& k) {
      Field dk = k.is_zero() ? etan : spectral_derivative(etan, k);
      // subtract the Taylor jet of D^k eta^n at x up to degree |t| - |k|
      double jet_order = noise_deg - ctx->scaling.degree(k).to_double();
      if (jet_order > 0) {
        Rational jb(std::llround(jet_order * 1000000), 1000000);
        for_each_multiindex_below(ctx->scaling.s, jb, [&](const MultiIndex& j) {
          Field dj = spectral_derivative(etan, k + j);
          double djx = dj.at(xi);
          Field mono = Field::sample(g, [&](const std::vector<double>& y) {
            double v = 1;
            for (std::size_t a = 0; a < g->d; ++a) {
              double dy = g->wrap(y[a] - x_[a], a);
              for (int p = 0; p < j[a]; ++p) v *= dy;
            }
            return v;
          });
          dk -= mono * (djx / j.factorial().to_double());
        });
      }
      out.field.add(Tree::poly(ctx, k), dk * (1.0 / k.factorial().to_double()));
    });
    return out;
  }

  // single planted branch: pointed integration (derivatives of the planted
  // symbol via the abstract gradient)
  if (tau->branches().size() == 1 && tau->root_dec().is_zero() &&
      ctx->labels[tau->branches()[0].label].kind == LabelKind::Kernel) {
    const auto& b = tau->branches()[0];
    const HResult& child = of(b.child);
    Field rf = child.has_candidate ? child.candidate : reconstruct_pointwise(child.field);
    ModelledField integrated = pointed_schauder(
        child.field, ctx->labels[b.label].name, child.spec, rf);
    if (!b.edge_dec.is_zero()) integrated = abstract_gradient(integrated, b.edge_dec);
    out.field = integrated.projected(td.gamma_tau);
    if (td.gamma_tau <= 0) {
      out.has_candidate = true;
      out.candidate = convolve(model_->kernels().of(ctx->labels[b.label].name).total(b.edge_dec),
                               rf);
    }
    return out;
  }

  // product case: peel the first branch
  TreePtr first = Tree::make(ctx, MultiIndex(ctx->dim()),
                             std::vector<Tree::Branch>{tau->branches()[0]});
  std::vector<Tree::Branch> rest_branches(tau->branches().begin() + 1, tau->branches().end());
  TreePtr rest = Tree::make(ctx, tau->root_dec(), std::move(rest_branches));

  const HResult& ha = of(first);
  const HResult& hb = of(rest);
  ModelledField fa = gamma_lift(model_, first, x_, 1e6);
  ModelledField fb = gamma_lift(model_, rest, x_, 1e6);

  ModelledField term1 = ha.field.empty() ? ModelledField(model_, td.gamma_tau)
                                         : pointed_multiply(ha.field, fb);
  ModelledField term2 = hb.field.empty() ? ModelledField(model_, td.gamma_tau)
                                         : pointed_multiply(fa, hb.field);
  out.field = (term1 + term2).projected(td.gamma_tau);

  if (td.gamma_tau <= 0) {
    if (!is_bad_tree(*model_, tau))
      throw std::runtime_error("HFamily: gamma_tau <= 0 outside the classified pattern for " +
                               tau->key());
    // candidate: R(f^{Xi} . H_{tau-bar}) + eta^n . Pi_x tau-bar, where Xi is
    // the bad noise factor
    std::size_t noise_idx = 0;
    for (std::size_t i = 0; i < tau->branches().size(); ++i)
      if (ctx->labels[tau->branches()[i].label].kind == LabelKind::Noise) noise_idx = i;
    TreePtr xi_tree = Tree::make(ctx, MultiIndex(ctx->dim()),
                                 std::vector<Tree::Branch>{tau->branches()[noise_idx]});
    std::vector<Tree::Branch> bar_branches;
    for (std::size_t i = 0; i < tau->branches().size(); ++i)
      if (i != noise_idx) bar_branches.push_back(tau->branches()[i]);
    TreePtr bar = Tree::make(ctx, tau->root_dec(), std::move(bar_branches));

    const HResult& hbar = of(bar);
    ModelledField fxi = gamma_lift(model_, xi_tree, x_, 1e6);
    Field part1(g);
    if (!hbar.field.empty()) {
      ModelledField prod = pointed_multiply(fxi, hbar.field);
      part1 = reconstruct_pointwise(prod);
    }
    const Label& noise_lab = ctx->labels[tau->branches()[noise_idx].label];
    Field etan = tau->branches()[noise_idx].edge_dec.is_zero()
                     ? eta_level(noise_lab.name)
                     : convolve(model_->mollifier()->deriv_level(
                                    model_->mollification_level(),
                                    tau->branches()[noise_idx].edge_dec),
                                eta_.fields.at(noise_lab.name));
    Field pibar = model_->renormalised_terms(bar).realise(x_);
    out.has_candidate = true;
    out.candidate = part1 + etan.hadamard(pibar);
  }
  return out;
}

HNormReport h_norm_report(std::shared_ptr<const Model> model, const SemigroupKernel& sk,
                          const TreePtr& tau, const std::vector<double>& x, double kappa_bar,
                          int directions, std::uint64_t seed) {
  HNormReport rep;
  rep.tree = tau->key();
  const auto& labels = model->structure().context()->labels;
  for (int i = 0; i < directions; ++i) {
    Direction eta = sample_smooth_direction(model->grid(), labels,
                                            stream_seed(seed, std::uint64_t(i)));
    HFamily fam(model, &sk, eta, x, kappa_bar);
    const HResult& r = fam.of(tau);
    double v = r.field.empty() ? 0.0 : pointed_norm(r.field, r.spec, 1, 4);
    rep.per_direction.push_back(v);
    rep.sup_norm = std::max(rep.sup_norm, v);
  }
  return rep;
}

FdReport frechet_fd_check(const ModelFactory& factory, const SemigroupKernel& sk,
                          std::uint64_t noise_seed, int moll_level,
                          const NegCharacter<double>& g, const TreePtr& tau,
                          const Direction& eta, const Field& placed_psi,
                          const std::vector<double>& eps_list, double kappa_bar) {
  FdReport rep;
  rep.tree = tau->key();

  NoiseRealisation base =
      sample_noise(factory.grid, factory.structure.context()->labels, noise_seed);
  RenormMap<double> M(g, factory.structure.negative_keys());
  auto base_model = std::make_shared<Model>(factory.lift(base, moll_level, M));
  std::vector<double> origin(factory.grid->d, 0.0);
  double base_val = base_model->pair(tau, origin, placed_psi);

  HFamily fam(base_model, &sk, eta, origin, kappa_bar);
  double rh = pair_distribution(fam.reconstruction(tau), placed_psi);

  for (double eps : eps_list) {
    NoiseRealisation shifted = base;
    for (auto& [name, f] : shifted.fields) f += eta.fields.at(name) * eps;
    Model pert = factory.lift(shifted, moll_level, M);
    double fd = (pert.pair(tau, origin, placed_psi) - base_val) / eps;
    rep.rows.push_back(FdRow{eps, fd, rh, fd - rh});
  }
  const double floor = 1e-9 * std::max(1.0, std::fabs(base_val));
  bool all_floor = true;
  for (const auto& r : rep.rows)
    if (std::fabs(r.discrepancy) > floor) all_floor = false;
  rep.linear_exact = all_floor;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    double denom = rep.rows[i + 1].discrepancy;
    rep.ratios.push_back(denom == 0.0 ? 0.0 : rep.rows[i].discrepancy / denom);
  }
  return rep;
}

}  // namespace rst
