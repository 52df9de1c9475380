#include "rst/model.hpp"

#include <cmath>

#include "rst/util.hpp"

namespace rst {

namespace {

Field ones_field(const GridPtr& g) {
  return Field::sample(g, [](const std::vector<double>&) { return 1.0; });
}

// (-1)^{|a|} x^a as a grid field (minimal image)
Field signed_monomial(const GridPtr& g, const MultiIndex& a) {
  Field m = monomial_field(g, a);
  if (a.total() % 2 == 1) m *= -1.0;
  return m;
}

std::vector<double> wrapped_coord(const Grid& g, const std::vector<double>& x) {
  std::vector<double> out(g.d);
  for (std::size_t i = 0; i < g.d; ++i) out[i] = g.wrap(x[i], i);
  return out;
}

}  // namespace

Field ModelTermList::diagonal() const {
  const GridPtr& g = terms.empty() ? nullptr : terms[0].coeff.grid();
  Field out(g);
  for (const auto& t : terms) {
    if (!t.poly.is_zero()) continue;
    Field prod = t.coeff.hadamard(t.base);
    out += prod;
  }
  return out;
}

Field ModelTermList::pair_centered(const TestFunction& psi, double lambda) const {
  const GridPtr& g = terms[0].coeff.grid();
  std::vector<double> origin(g->d, 0.0);
  Field placed = psi.place(origin, lambda);
  Field out(g);
  for (const auto& t : terms) {
    Field R = placed.hadamard(monomial_field(g, t.poly));
    // reflect: A(x) = R(-x)
    Field A(g);
    for (std::size_t i = 0; i < R.size(); ++i) {
      auto ix = g->unflat(i);
      std::vector<int> neg(g->d);
      for (std::size_t a = 0; a < g->d; ++a) neg[a] = -ix[a];
      A[g->flat(neg)] = R[i];
    }
    out += t.coeff.hadamard(convolve(A, t.base));
  }
  return out;
}

Field ModelTermList::pair_kernel(const Field& even_kernel) const {
  const GridPtr& g = terms[0].coeff.grid();
  Field out(g);
  for (const auto& t : terms) {
    Field A = even_kernel.hadamard(signed_monomial(g, t.poly));
    out += t.coeff.hadamard(convolve(A, t.base));
  }
  return out;
}

Field ModelTermList::realise(const std::vector<double>& z) const {
  const GridPtr& g = terms[0].coeff.grid();
  std::vector<int> zi(g->d);
  for (std::size_t a = 0; a < g->d; ++a)
    zi[a] = int(std::llround(z[a] / g->h(a)));
  Field out(g);
  for (const auto& t : terms) {
    double c = t.coeff.at(zi);
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) {
      auto w = g->point(g->unflat(i));
      double mono = 1;
      for (std::size_t a = 0; a < g->d; ++a) {
        double dx = g->wrap(w[a] - z[a], a);
        for (int p = 0; p < t.poly[a]; ++p) mono *= dx;
      }
      out[i] += c * mono * t.base[i];
    }
  }
  return out;
}

double ModelTermList::pair_at(const std::vector<double>& z, const Field& placed) const {
  const GridPtr& g = terms[0].coeff.grid();
  std::vector<int> zi(g->d);
  for (std::size_t a = 0; a < g->d; ++a) zi[a] = int(std::llround(z[a] / g->h(a)));
  double total = 0;
  for (const auto& t : terms) {
    double c = t.coeff.at(zi);
    if (c == 0.0) continue;
    double acc = 0;
    for (std::size_t i = 0; i < placed.size(); ++i) {
      if (placed[i] == 0.0) continue;
      auto w = g->point(g->unflat(i));
      double mono = 1;
      for (std::size_t a = 0; a < g->d; ++a) {
        double dx = g->wrap(w[a] - z[a], a);
        for (int p = 0; p < t.poly[a]; ++p) mono *= dx;
      }
      acc += placed[i] * mono * t.base[i];
    }
    total += c * acc * g->cell_volume();
  }
  return total;
}

KernelAssignment standard_kernels(const GridPtr& grid, const LabelSet& labels,
                                  int annihilation_order) {
  KernelAssignment ka;
  for (LabelId l : labels.kernel_labels()) {
    const Label& lab = labels[l];
    ka.kernels.emplace(lab.name, std::make_shared<SingularKernel>(grid, lab.degree.to_double(),
                                                                  annihilation_order));
  }
  return ka;
}

Model::Model(StructureSpec structure, GridPtr grid, KernelAssignment kernels,
             std::shared_ptr<const Mollifier> mollifier, NoiseRealisation noise, int moll_level,
             std::optional<RenormMap<double>> renorm)
    : structure_(std::move(structure)),
      grid_(std::move(grid)),
      kernels_(std::move(kernels)),
      mollifier_(std::move(mollifier)),
      noise_(std::move(noise)),
      moll_level_(moll_level),
      renorm_(std::move(renorm)),
      hopf_(std::make_shared<HopfAlgebra<double>>(structure_.context())) {}

const Field& Model::smooth_noise(const std::string& label) const {
  auto it = smooth_noise_.find(label);
  if (it != smooth_noise_.end()) return it->second;
  Field f = mollifier_->apply(noise_.of(label), moll_level_);
  return smooth_noise_.emplace(label, std::move(f)).first->second;
}

const ModelTermList& Model::canonical(const TreePtr& tau) const {
  auto it = canon_memo_.find(tau->key());
  if (it != canon_memo_.end()) return it->second;
  ModelTermList out = compute_canonical(tau);
  return canon_memo_.emplace(tau->key(), std::move(out)).first->second;
}

ModelTermList Model::compute_canonical(const TreePtr& tau) const {
  const auto& ctx = structure_.context();
  const std::size_t d = grid_->d;

  // root polynomial part: (w - z)^{root_dec}
  ModelTermList acc;
  acc.terms.push_back(ModelTerm{tau->root_dec(), ones_field(grid_), ones_field(grid_)});

  auto multiply_into = [&](const ModelTermList& other) {
    ModelTermList prod;
    for (const auto& t1 : acc.terms)
      for (const auto& t2 : other.terms)
        prod.terms.push_back(ModelTerm{t1.poly + t2.poly, t1.coeff.hadamard(t2.coeff),
                                       t1.base.hadamard(t2.base)});
    acc = std::move(prod);
  };

  for (const auto& b : tau->branches()) {
    const Label& lab = ctx->labels[b.label];
    ModelTermList piece;
    if (lab.kind == LabelKind::Noise) {
      Field dk = b.edge_dec.is_zero()
                     ? smooth_noise(lab.name)
                     : convolve(mollifier_->deriv_level(moll_level_, b.edge_dec),
                                noise_.of(lab.name));
      piece.terms.push_back(ModelTerm{MultiIndex(d), ones_field(grid_), std::move(dk)});
      Rational pos_deg = lab.degree - ctx->scaling.degree(b.edge_dec);
      if (pos_deg.is_positive()) {
        // recentering jet of a positive-degree noise
        for_each_multiindex_below(ctx->scaling.s, pos_deg, [&](const MultiIndex& j) {
          Field dj = convolve(mollifier_->deriv_level(moll_level_, b.edge_dec + j),
                              noise_.of(lab.name));
          piece.terms.push_back(
              ModelTerm{j, dj * (-1.0 / j.factorial().to_double()), ones_field(grid_)});
        });
      }
    } else {
      const ModelTermList& child = canonical(b.child);
      const SingularKernel& K = kernels_.of(lab.name);
      // D^k K * Pi_z(child), expanded in powers of (w - z)
      for (const auto& t : child.terms) {
        std::vector<MultiIndex> splits;
        {
          MultiIndex a(d);
          std::function<void(std::size_t)> rec = [&](std::size_t axis) {
            if (axis == d) {
              splits.push_back(a);
              return;
            }
            for (int v = 0; v <= t.poly[axis]; ++v) {
              a[axis] = v;
              rec(axis + 1);
            }
            a[axis] = 0;
          };
          rec(0);
        }
        for (const auto& a : splits) {
          Field Kka = K.total(b.edge_dec + a).hadamard(signed_monomial(grid_, a));
          Field conv_b = convolve(Kka, t.base);
          double binom = t.poly.binomial(a).to_double();
          piece.terms.push_back(ModelTerm{t.poly - a, t.coeff * binom, std::move(conv_b)});
        }
      }
      // admissibility jets: -(w-z)^j/j! (D^{k+j} K * Pi_z child)(z)
      JFactor jf{b.label, b.edge_dec, b.child};
      Rational bound = jf.degree();
      if (bound.is_positive()) {
        for_each_multiindex_below(ctx->scaling.s, bound, [&](const MultiIndex& j) {
          Field V(grid_);
          for (const auto& t : child.terms) {
            Field Kjm =
                K.total(b.edge_dec + j + t.poly).hadamard(signed_monomial(grid_, t.poly));
            V += t.coeff.hadamard(convolve(Kjm, t.base));
          }
          piece.terms.push_back(
              ModelTerm{j, V * (-1.0 / j.factorial().to_double()), ones_field(grid_)});
        });
      }
    }
    multiply_into(piece);
  }
  return acc;
}

ModelTermList Model::renormalised_terms(const TreePtr& tau) const {
  if (!renorm_) return canonical(tau);
  ModelTermList out;
  renorm_->apply(tau).for_each([&](const TreeKey& k, const double& c) {
    const ModelTermList& src = canonical(k.tree);
    for (const auto& t : src.terms)
      out.terms.push_back(ModelTerm{t.poly, t.coeff * c, t.base});
  });
  if (out.terms.empty())
    out.terms.push_back(ModelTerm{MultiIndex(grid_->d), Field(grid_), ones_field(grid_)});
  return out;
}

Field Model::pair_field(const TreePtr& tau, const SemigroupKernel& sk, int level) const {
  return renormalised_terms(tau).pair_kernel(sk.phi(level));
}

double Model::pair(const TreePtr& tau, const std::vector<double>& z,
                   const Field& placed) const {
  return renormalised_terms(tau).pair_at(z, placed);
}

const Field& Model::fx_field(const JFactor& f) const {
  auto it = fx_memo_.find(f.key_string());
  if (it != fx_memo_.end()) return it->second;

  const auto& ctx = structure_.context();
  Field jt(grid_);
  if (ctx->labels[f.label].kind == LabelKind::Noise) {
    // f_x(Jtilde_k^t 1) = -D^k xi_t(x)
    jt = f.k.is_zero() ? smooth_noise(ctx->labels[f.label].name) * (-1.0)
                       : convolve(mollifier_->deriv_level(moll_level_, f.k),
                                  noise_.of(ctx->labels[f.label].name)) *
                             (-1.0);
  } else {
    // f_x(Jtilde_k tau) = -(D^k K * Pi_x tau)(x)
    const ModelTermList& terms = renormalised_terms(f.tree);
    const SingularKernel& K = kernels_.of(ctx->labels[f.label].name);
    for (const auto& t : terms.terms) {
      Field Kjm = K.total(f.k + t.poly).hadamard(signed_monomial(grid_, t.poly));
      jt -= t.coeff.hadamard(convolve(Kjm, t.base));
    }
  }
  // convert Jtilde values to the J generator table:
  // f(Jtilde_k tau) = sum_{|m|_s < |J_k tau|} (x^m / m!) f(J_{k+m} tau)
  Field out = jt;
  JFactor self{f.label, f.k, f.tree};
  Rational bound = self.degree();
  for_each_multiindex_below(ctx->scaling.s, bound, [&](const MultiIndex& m) {
    if (m.is_zero()) return;
    JFactor higher{f.label, f.k + m, f.tree};
    if (!higher.degree().is_positive()) return;
    Field xm = monomial_field(grid_, m);
    out -= xm.hadamard(fx_field(higher)) * (1.0 / m.factorial().to_double());
  });
  return fx_memo_.emplace(f.key_string(), std::move(out)).first->second;
}

Field Model::kernel_diag(LabelId label, const MultiIndex& k, const TreePtr& tau) const {
  const auto& ctx = structure_.context();
  const SingularKernel& K = kernels_.of(ctx->labels[label].name);
  if (tau->is_polynomial()) {
    // (D^k K * (. - y)^j)(y) is the constant (-1)^{|j|+|k|} j!/(j-k)! int K v^{j-k}
    const MultiIndex& j = tau->root_dec();
    if (!j.dominates(k)) return Field(grid_);
    double fac = 1;
    for (std::size_t a = 0; a < j.dim(); ++a)
      for (int p = 0; p < k[a]; ++p) fac *= double(j[a] - p);
    double mom = K.total(MultiIndex(grid_->d)).hadamard(monomial_field(grid_, j - k)).integral();
    double sign = ((j.total() + k.total()) % 2 == 0) ? 1.0 : -1.0;
    return Field::sample(grid_, [v = sign * fac * mom](const std::vector<double>&) { return v; });
  }
  ModelTermList terms = renormalised_terms(tau);
  Field out(grid_);
  for (const auto& t : terms.terms) {
    Field Kjm = K.total(k + t.poly).hadamard(signed_monomial(grid_, t.poly));
    out += t.coeff.hadamard(convolve(Kjm, t.base));
  }
  return out;
}

Character<double> Model::fx_at(const std::vector<double>& x) const {
  std::vector<int> xi(grid_->d);
  for (std::size_t a = 0; a < grid_->d; ++a) xi[a] = int(std::llround(x[a] / grid_->h(a)));
  std::vector<double> xw = wrapped_coord(*grid_, x);
  const Model* self = this;
  auto xfn = [xw](std::size_t axis) { return -xw[axis]; };
  auto jfn = [self, xi](const JFactor& f) { return self->fx_field(f).at(xi); };
  return Character<double>(xfn, jfn);
}

Character<double> Model::gamma_xy(const std::vector<double>& x,
                                  const std::vector<double>& y) const {
  return compose_characters(hopf_, invert_character(hopf_, fx_at(x)), fx_at(y));
}

ModelFactory::ModelFactory(StructureSpec s, GridPtr g, int kernel_annihilation)
    : structure(std::move(s)), grid(std::move(g)) {
  kernels = standard_kernels(grid, structure.context()->labels, kernel_annihilation);
  // mollifier moments follow the kernel annihilation order plus the top
  // polynomial degree in the structure
  int r = 2;
  mollifier = std::make_shared<Mollifier>(grid, r);
}

Model ModelFactory::lift(const NoiseRealisation& noise, int moll_level,
                         std::optional<RenormMap<double>> renorm) const {
  return Model(structure, grid, kernels, mollifier, noise, moll_level, std::move(renorm));
}

Model ModelFactory::lift_seed(std::uint64_t seed, int moll_level, bool antithetic,
                              std::optional<RenormMap<double>> renorm) const {
  return lift(sample_noise(grid, structure.context()->labels, seed, antithetic), moll_level,
              std::move(renorm));
}

ModelNormReport model_norms(const Model& model, double gamma_cut, const Region& region,
                            const std::vector<double>& lambdas, int probe_budget,
                            std::uint64_t seed) {
  ModelNormReport rep;
  const auto& g = model.grid();
  auto probes = TestFunction::family(model.grid(), 2);
  std::uint64_t state = seed;
  const auto& basis = model.structure().basis;
  auto& H = *model.hopf();

  for (int p = 0; p < probe_budget; ++p) {
    // random base point in the region (grid-aligned)
    std::vector<double> x(g->d), y(g->d);
    for (std::size_t a = 0; a < g->d; ++a) {
      int span = region.hi[a] - region.lo[a];
      x[a] = g->h(a) * double(region.lo[a] + int(splitmix64(state) % std::uint64_t(span)));
      y[a] = g->h(a) * double(region.lo[a] + int(splitmix64(state) % std::uint64_t(span)));
    }
    for (const auto& tau : basis) {
      if (tau->degree().to_double() >= gamma_cut) continue;
      for (double lambda : lambdas) {
        for (const auto& psi : probes) {
          Field placed = psi.place(x, lambda);
          double v = model.pair(tau, x, placed);
          rep.pi_norm = std::max(
              rep.pi_norm, std::fabs(v) / std::pow(lambda, tau->degree().to_double()));
        }
      }
      // Gamma part
      Character<double> gxy = model.gamma_xy(x, y);
      TreePoly<double> gt = gamma_of_character(H, gxy, tau);
      double dist = g->snorm(g->displacement(x, y));
      if (dist <= 0) continue;
      gt.for_each([&](const TreeKey& k, const double& c) {
        if (k.tree->key() == tau->key()) return;
        double beta = k.tree->degree().to_double();
        rep.gamma_norm = std::max(
            rep.gamma_norm, std::fabs(c) / std::pow(dist, tau->degree().to_double() - beta));
      });
    }
  }
  return rep;
}

}  // namespace rst
