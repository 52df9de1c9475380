// Acceptance suite: one pass/fail line per criterion.
//
//  1  exact symbolic identities on the desk-scale basis
//  2  kernel constructions (semigroup identity, moments, norm equivalence)
//  3  model identities and stationarity
//  4  b-BPHZ centering on held-out seeds
//  5  moment scaling slopes, uniformly over mollification
//  6  reconstruction bounds on the derivative family
//  7  finite-difference derivative identity
//  8  convergence under mollification
//  9  character transfer
// 10  byte-level determinism of the reports
//
// Usage: acceptance [--criterion N] [--rule FILE] [--jobs N]

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rst/basis.hpp"
#include "rst/besov.hpp"
#include "rst/delta_m.hpp"
#include "rst/frechet.hpp"
#include "rst/pipeline.hpp"
#include "rst/util.hpp"

using namespace rst;
using Q = Rational;

std::uint64_t porting_seed();

namespace {

struct Options {
  int criterion = 0;  // 0 = all
  std::string rule_file = "configs/t1.rules";
  std::string calib_file = "configs/calibration.ini";
  int jobs = 4;
  std::string scratch = "acceptance-out";
};

Options opt;

const StructureSpec& structure() {
  static StructureSpec s = generate_basis(parse_rule_file(opt.rule_file));
  return s;
}

std::map<std::string, double> calibration() {
  static std::map<std::string, double> kv = [] {
    std::map<std::string, double> out;
    std::ifstream is(opt.calib_file);
    std::string line;
    while (std::getline(is, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      out[trim(line.substr(0, eq))] = std::stod(trim(line.substr(eq + 1)));
    }
    return out;
  }();
  return kv;
}

TreePtr T(const std::string& s) { return parse_tree(structure().context(), s); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

NegCharacter<Q> random_neg_q(std::uint64_t seed) {
  NegCharacter<Q> g;
  for (const auto& t : structure().negatives) {
    std::uint64_t s = stream_seed(seed, fnv1a(t->key()));
    g.set(t, Rational(std::int64_t(splitmix64(s) % 9) - 4, 1 + std::int64_t(splitmix64(s) % 3)));
  }
  return g;
}

// ---------- criterion 1: symbolic suite ------------------------------------------

Outcome criterion1() {
  Outcome out;
  auto H = std::make_shared<const HopfAlgebra<Q>>(structure().context());
  const auto& basis = structure().basis;
  out.require(basis.size() <= 40, "basis larger than the desk-scale budget");

  // coproduct multiplicativity on all defined products
  for (const auto& a : basis) {
    for (const auto& b : basis) {
      TreePtr p;
      try {
        p = tree_product(a, b);
      } catch (const std::invalid_argument&) {
        continue;
      }
      TensorPoly<Q> lhs = H->delta(p);
      TensorPoly<Q> rhs = H->tensor_mul(H->delta(a), H->delta(b));
      if (!(lhs == rhs)) {
        out.require(false, "Delta multiplicativity fails on " + p->key());
        break;
      }
    }
  }

  // triangularity of Gamma_f for randomized rational characters
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    auto f = random_rational_character(seed);
    for (const auto& tau : basis) {
      TreePoly<Q> v = gamma_of_character(*H, f, tau);
      v.add(tree_single<Q>(tau), Q(-1));
      v.for_each([&](const TreeKey& k, const Q& c) {
        if (!(c == Q(0)) && !(k.tree->degree() < tau->degree()))
          out.require(false, "triangularity fails on " + tau->key());
      });
    }
  }

  // character group axioms
  {
    auto f = random_rational_character(21);
    auto g = random_rational_character(22);
    auto h = random_rational_character(23);
    auto finv = invert_character(H, f);
    std::map<std::string, JFactor> gens;
    for (const auto& tau : basis)
      H->delta(tau).for_each([&](const TensorKey& key, const Q&) {
        for (const auto& fac : key.right.factors()) gens.emplace(fac.key_string(), fac);
      });
    auto e1 = compose_characters(H, f, finv);
    auto e2 = compose_characters(H, finv, f);
    for (const auto& [k, gen] : gens) {
      out.require(e1.j(gen) == Q(0) && e2.j(gen) == Q(0), "inverse axiom fails on " + k);
    }
    auto ab_c = compose_characters(H, compose_characters(H, f, g), h);
    auto a_bc = compose_characters(H, f, compose_characters(H, g, h));
    for (const auto& tau : basis)
      out.require(gamma_of_character(*H, ab_c, tau) == gamma_of_character(*H, a_bc, tau),
                  "associativity fails on " + tau->key());
    for (const auto& tau : basis)
      out.require(gamma_of_character(*H, compose_characters(H, f, g), tau) ==
                      gamma_of_character(*H, f, gamma_of_character(*H, g, tau)),
                  "composition law fails on " + tau->key());
  }

  // sector chain span checks
  {
    ValidationReport rep = verify_sector_closure(structure(), *H, 99, 3);
    out.require(rep.ok(), "sector closure: " + rep.str());
    ValidationReport ass = validate_assumptions(structure(), *H);
    out.require(ass.ok(), "assumptions: " + ass.str());
  }

  // the three coproduct identities for renormalisation maps
  {
    NegCharacter<Q> gq = random_neg_q(31);
    RenormMap<Q> M(gq, structure().negative_keys());
    auto mfn = [&M](const TreePtr& t) { return M.apply(t); };
    DeltaM<Q> dm(H, mfn);
    out.require(dm.membership_violation(basis).empty(), "membership of M_g fails");

    // integration identity
    const auto& ctx = structure().context();
    LabelId l = ctx->labels.kernel_labels()[0];
    const Rational beta = ctx->labels[l].degree;
    for (const auto& tau : basis) {
      TreePtr planted = plant(l, MultiIndex(ctx->dim()), tau);
      if (!planted || !structure().in_basis(planted)) continue;
      const TensorPoly<Q>& lhs = dm.delta_m(planted);
      TensorPoly<Q> rhs;
      dm.delta_m(tau).for_each([&](const TensorKey& key, const Q& c) {
        TreePtr p = plant(l, MultiIndex(ctx->dim()), key.left);
        if (p) rhs.add(TensorKey{p, key.right}, c);
        Rational upper = key.left->degree() + beta;
        for_each_multiindex_below(ctx->scaling.s, upper, [&](const MultiIndex& k) {
          if (!(ctx->scaling.degree(k) > tau->degree() + beta)) return;
          jbar<Q>(l, k, key.left).for_each([&](const TPlusMonomial& mono, const Q& jc) {
            rhs.add(TensorKey{Tree::poly(ctx, k), mono * key.right},
                    Q(0) - c * jc / k.factorial());
          });
        });
      });
      out.require(lhs == rhs, "integration coproduct identity fails on " + planted->key());
    }

    // multiplication identity wherever the hypothesis holds
    for (const auto& a : basis) {
      for (const auto& b : basis) {
        TreePtr p;
        try {
          p = tree_product(a, b);
        } catch (const std::invalid_argument&) {
          continue;
        }
        if (!structure().in_basis(p)) continue;
        TreePoly<Q> prod;
        M.apply(a).for_each([&](const TreeKey& ka, const Q& ca) {
          M.apply(b).for_each([&](const TreeKey& kb, const Q& cb) {
            prod.add(TreeKey{tree_product(ka.tree, kb.tree)}, ca * cb);
          });
        });
        if (!(M.apply(p) == prod)) continue;
        out.require(dm.delta_m(p) == H->tensor_mul(dm.delta_m(a), dm.delta_m(b)),
                    "multiplication coproduct identity fails on " + p->key());
      }
    }

    // commutativity identity for commuting pairs (M, M^2) and (M, id)
    auto compose_maps = [](LinearTreeMap<Q> f, LinearTreeMap<Q> g) {
      return [f, g](const TreePtr& t) {
        TreePoly<Q> o;
        g(t).for_each([&](const TreeKey& k, const Q& c) { o.add(f(k.tree) * c); });
        return o;
      };
    };
    LinearTreeMap<Q> m1 = mfn;
    std::vector<LinearTreeMap<Q>> partners = {
        mfn, compose_maps(mfn, mfn),
        [](const TreePtr& t) { return tree_single<Q>(t); }};
    for (const auto& m2 : partners) {
      DeltaM<Q> d1(H, m1), d2(H, m2);
      for (const auto& tau : basis) {
        std::map<std::string, Q> lhs, rhs;
        auto accumulate = [&](std::map<std::string, Q>& acc, DeltaM<Q>& outer,
                              DeltaM<Q>& inner) {
          inner.delta_m(tau).for_each([&](const TensorKey& k1, const Q& c1) {
            TPlusPoly<Q> hat = outer.mhat(k1.right);
            outer.delta_m(k1.left).for_each([&](const TensorKey& k2, const Q& c2) {
              hat.for_each([&](const TPlusMonomial& m, const Q& c3) {
                std::string key =
                    k2.left->key() + "|" + k2.right.key_string() + "|" + m.key_string();
                auto it = acc.find(key);
                Q add = c1 * c2 * c3;
                if (it == acc.end()) {
                  if (!(add == Q(0))) acc[key] = add;
                } else {
                  it->second += add;
                  if (it->second == Q(0)) acc.erase(it);
                }
              });
            });
          });
        };
        accumulate(lhs, d1, d2);
        accumulate(rhs, d2, d1);
        out.require(lhs == rhs, "commutativity coproduct identity fails on " + tau->key());
      }
    }
  }
  return out;
}

// ---------- criterion 2: kernel suite --------------------------------------------

Outcome criterion2() {
  Outcome out;
  auto g = Grid::make(structure().context()->scaling, 512);
  SemigroupKernel sk(g, 2);

  out.require(sk.worst_moment_residual() < 1e-8, "rho moment residual too large");
  for (int n = 2; n <= 6; ++n) {
    Field rhs = convolve_direct(sk.rho(n), sk.phi(n + 1));
    double resid = (sk.phi(n) - rhs).sup_norm();
    out.require(resid < 1e-6,
                "semigroup identity residual " + format_double(resid) + " at level " +
                    std::to_string(n));
  }

  auto calib = calibration();
  auto probes = TestFunction::family(g, 2);
  Region region = Region::full(*g);
  BesovParams par;
  par.alpha = -0.57;
  par.p = 2;
  par.q = -1;
  par.level_lo = 2;
  par.level_hi = 6;
  for (int i = 0; i < 20; ++i) {
    Field xi = sample_white_noise_field(g, stream_seed(424242, std::uint64_t(i)));
    double ratio = besov_testfn_seminorm(xi, par, region, probes) /
                   besov_kernel_seminorm(xi, sk, par, region, probes);
    out.require(ratio >= calib.at("kernel_swap_lo") && ratio <= calib.at("kernel_swap_hi"),
                "norm equivalence ratio " + format_double(ratio) + " outside the frozen band");
  }
  return out;
}

// ---------- criterion 3: model suite ---------------------------------------------

Outcome criterion3() {
  Outcome out;
  auto g = Grid::make(structure().context()->scaling, 512);
  ModelFactory factory(structure(), g);
  SemigroupKernel sk(g, 2);

  // admissibility recursion against the direct-sum oracle
  {
    Model m = factory.lift_seed(porting_seed(), 3);
    const SingularKernel& K = factory.kernels.of(
        structure().context()->labels[structure().context()->labels.kernel_labels()[0]].name);
    Field conv = convolve_direct(K.total(MultiIndex(1)), m.smooth_noise("Xi"));
    for (double z : {0.0, 0.25, 0.625}) {
      Field v = m.canonical(T("I[l,0](Xi)")).realise({z});
      std::vector<int> zi{int(std::llround(z * g->n[0]))};
      double worst = 0;
      for (std::size_t i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::fabs(v[i] - (conv[i] - conv.at(zi))));
      out.require(worst < 1e-9, "admissibility recursion residual " + format_double(worst));
    }
  }

  // Pi_x Gamma_xy = Pi_y within 1e-6 relative on 100 probes
  {
    Model m = factory.lift_seed(porting_seed() + 1, 3);
    auto& H = *m.hopf();
    TestFunction psi = TestFunction::bump_profile(g, 2);
    std::uint64_t state = 4242;
    for (int probe = 0; probe < 100; ++probe) {
      std::vector<double> x{g->h(0) * double(64 + splitmix64(state) % 128)};
      std::vector<double> y{g->h(0) * double(64 + splitmix64(state) % 128)};
      double lambda = 0.0625 * (1.0 + double(splitmix64(state) % 3));
      const TreePtr& tau = structure().basis[splitmix64(state) % structure().basis.size()];
      Field placed = psi.place(x, lambda);
      double rhs = m.pair(tau, y, placed);
      double lhs = 0;
      gamma_of_character(H, m.gamma_xy(x, y), tau).for_each([&](const TreeKey& k, const double& c) {
        lhs += c * m.pair(k.tree, x, placed);
      });
      double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-6});
      out.require(std::fabs(lhs - rhs) / scale < 1e-6, "model recentering identity fails");
    }
  }

  // stationarity of ensemble statistics across 5 base points
  {
    const int seeds = 10000;
    TestFunction psi = TestFunction::bump_profile(g, 2);
    std::vector<std::vector<double>> points{{0.0}, {0.1875}, {0.40625}, {0.59375}, {0.828125}};
    std::vector<Field> placed;
    for (const auto& x : points) placed.push_back(psi.place(x, 0.125));
    std::vector<TreePtr> taus{T("Xi"), T("I[l,0](Xi)*Xi")};
    // per point, per tau: mean of squared pairings
    std::vector<std::vector<double>> sums(points.size(), std::vector<double>(taus.size(), 0)),
        sqs(points.size(), std::vector<double>(taus.size(), 0));
    for (int i = 0; i < seeds; ++i) {
      Model m = factory.lift_seed(stream_seed(porting_seed() + 2, std::uint64_t(i / 2)), 3,
                                  i % 2 == 1);
      for (std::size_t pi = 0; pi < points.size(); ++pi) {
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
          double v = m.pair(taus[ti], points[pi], placed[pi]);
          sums[pi][ti] += v * v;
          sqs[pi][ti] += v * v * v * v;
        }
      }
    }
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      for (std::size_t pi = 1; pi < points.size(); ++pi) {
        double m0 = sums[0][ti] / seeds, mp = sums[pi][ti] / seeds;
        double v0 = sqs[0][ti] / seeds - m0 * m0, vp = sqs[pi][ti] / seeds - mp * mp;
        double se = std::sqrt(std::max(v0, 0.0) / seeds + std::max(vp, 0.0) / seeds);
        out.require(std::fabs(m0 - mp) <= 3.0 * se + 1e-12,
                    "stationarity breaks for " + taus[ti]->key() + " at base point " +
                        std::to_string(pi));
      }
    }
  }
  return out;
}

// ---------- criterion 4: b-BPHZ centering ----------------------------------------

Outcome criterion4() {
  Outcome out;
  auto g = Grid::make(structure().context()->scaling, 512);
  ModelFactory factory(structure(), g);
  SemigroupKernel sk(g, 2);

  EnsemblePlan solve_plan;
  solve_plan.seed = porting_seed() + 110;
  solve_plan.count = 10000;
  solve_plan.moll_level = 3;
  solve_plan.phi_levels = {0};
  solve_plan.jobs = opt.jobs;
  auto solve_bank = run_ensemble(factory, sk, solve_plan);
  CharSolveReport rep = solve_bbphz(structure(), solve_bank, 0);
  for (const auto& n : rep.notes) out.require(false, n);

  EnsemblePlan fresh_plan = solve_plan;
  fresh_plan.seed = porting_seed() + 111;
  auto fresh = run_ensemble(factory, sk, fresh_plan);
  auto cs = centered_expectations(structure(), rep.character, fresh, 0);
  for (const auto& [key, st] : cs) {
    out.require(std::fabs(st.mean) <= 3.0 * st.se + 1e-12,
                "held-out centering fails for " + key + " (mean " + format_double(st.mean) +
                    ", se " + format_double(st.se) + ")");
  }
  return out;
}

// ---------- criterion 5: moment scaling ------------------------------------------

Outcome criterion5() {
  Outcome out;
  ExperimentPlan plan;
  plan.rule_file = opt.rule_file;
  plan.grid_points = 4096;
  plan.seed = porting_seed() + 20;
  plan.samples = 4000;
  plan.jobs = opt.jobs;
  plan.moll_levels = {3, 4, 5};
  plan.phi_levels = {2, 3, 4, 5, 6};
  plan.slope_band = 0.1 * plan.p;  // +- 0.1 * 2
  plan.out_dir = opt.scratch + "/c5";
  UniformReport rep = run_uniform_bounds(plan, structure());
  emit_uniform_report(plan, structure(), rep);
  for (const auto& step : rep.steps) {
    if (!step.negative) continue;
    for (std::size_t mi = 0; mi < step.fits.size(); ++mi) {
      const MomentFit& f = step.fits[mi];
      out.require(f.pass, step.tree + " at mollification " +
                              std::to_string(plan.moll_levels[mi]) + ": slope " +
                              format_double(f.slope) + " vs target " + format_double(f.target));
    }
    out.require(!step.aborted, step.tree + ": aborted by an upstream chain failure");
  }
  return out;
}

// ---------- criterion 6: reconstruction bounds -----------------------------------

Outcome criterion6() {
  Outcome out;
  auto g = Grid::make(structure().context()->scaling, 512);
  ModelFactory factory(structure(), g);
  SemigroupKernel sk(g, 2);
  double kb = structure().rule.kappa_bar.to_double();

  EnsemblePlan ep;
  ep.seed = porting_seed() + 30;
  ep.count = 1000;
  ep.moll_level = 3;
  ep.phi_levels = {0};
  ep.jobs = opt.jobs;
  auto bank = run_ensemble(factory, sk, ep);
  NegCharacter<double> gchar = solve_bbphz(structure(), bank, 0).character;

  auto model = std::make_shared<Model>(factory.lift_seed(
      porting_seed() + 31, 3, false, RenormMap<double>(gchar, structure().negative_keys())));
  Direction eta = sample_smooth_direction(g, structure().context()->labels,
                                          porting_seed() + 32);
  HFamily fam(model, &sk, eta, {0.0}, kb);

  TestFunction psi = TestFunction::bump_profile(g, 2);
  Region region = Region::centered_fraction(*g, 0.4);

  for (const char* key : {"I[l,0](Xi)", "I[l,0](Xi)*I[l,0](Xi)",
                          "I[l,0](Xi)*I[l,0](Xi)*I[l,0](Xi)"}) {
    const HResult& h = fam.of(T(key));
    out.require(!h.has_candidate, std::string(key) + ": expected a positive-order member");
    Field rf = reconstruct_pointwise(h.field);

    // plain reconstruction bound: || <Rf - Pi_y f(y), phi_y^n> ||_{L^2} ~ 2^{-n gamma}
    std::vector<double> xs, ys;
    for (int n = 2; n <= 5; ++n) {
      Field pf(g);
      for (const auto& [k, tc] : h.field.coeffs()) {
        Field pc = model->renormalised_terms(tc.first).pair_kernel(sk.phi(n));
        pf += tc.second.hadamard(pc);
      }
      Field err = convolve(sk.phi(n), rf) - pf;
      xs.push_back(n);
      ys.push_back(std::log2(std::max(lp_norm_region(err, 2, region), 1e-300)));
    }
    double decay = -fit_line(xs, ys).slope;
    out.require(decay >= h.spec.gamma - 0.1, std::string(key) + ": reconstruction slope " +
                                                 format_double(decay) + " < gamma - 0.1 = " +
                                                 format_double(h.spec.gamma - 0.1));

    // pointed bound: |<Rf, psi_0^lambda>| ~ lambda^{nu - |s|/p}
    std::vector<double> lx, ly;
    for (int n = 2; n <= 5; ++n) {
      double lambda = std::pow(0.5, n);
      Field placed = psi.place({0.0}, lambda);
      double v = std::fabs(pair_distribution(rf, placed));
      lx.push_back(std::log2(lambda));
      ly.push_back(std::log2(std::max(v, 1e-300)));
    }
    double slope = fit_line(lx, ly).slope;
    double target = h.spec.nu - 0.5 - 0.1;
    out.require(slope >= target, std::string(key) + ": pointed slope " + format_double(slope) +
                                     " < " + format_double(target));
  }
  return out;
}

// ---------- criterion 7: derivative identity --------------------------------------

Outcome criterion7() {
  Outcome out;
  auto g = Grid::make(structure().context()->scaling, 512);
  ModelFactory factory(structure(), g);
  SemigroupKernel sk(g, 2);
  double kb = structure().rule.kappa_bar.to_double();

  EnsemblePlan ep;
  ep.seed = porting_seed() + 40;
  ep.count = 800;
  ep.moll_level = 3;
  ep.phi_levels = {0};
  ep.jobs = opt.jobs;
  auto bank = run_ensemble(factory, sk, ep);
  NegCharacter<double> gchar = solve_bbphz(structure(), bank, 0).character;

  TestFunction psi = TestFunction::bump_profile(g, 2);
  Field placed = psi.place({0.0}, 0.125);
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};

  for (const auto& tau : structure().negatives) {
    for (int d = 0; d < 3; ++d) {
      Direction eta = sample_smooth_direction(g, structure().context()->labels,
                                              stream_seed(porting_seed() + 41, std::uint64_t(d)));
      FdReport rep = frechet_fd_check(factory, sk, porting_seed() + 42, 3, gchar, tau, eta,
                                      placed, eps, kb);
      if (rep.linear_exact) continue;  // linear symbols are exact at every eps
      for (double r : rep.ratios) {
        out.require(r >= 1.5 && r <= 2.5,
                    tau->key() + " direction " + std::to_string(d) + ": halving ratio " +
                        format_double(r));
      }
    }
  }
  return out;
}

// ---------- criterion 8: convergence ----------------------------------------------

Outcome criterion8() {
  Outcome out;
  ExperimentPlan plan;
  plan.rule_file = opt.rule_file;
  plan.grid_points = 4096;
  plan.seed = porting_seed() + 50;
  plan.samples = 2000;
  plan.jobs = opt.jobs;
  plan.conv_fine = 6;
  plan.conv_coarse = {3, 4, 5};
  plan.phi_levels = {2, 3, 4, 5};
  auto calib = calibration();
  plan.moll_rate_constant = calib.at("moll_rate_C");
  plan.moll_rate_kappa = calib.at("moll_rate_kappa");
  plan.out_dir = opt.scratch + "/c8";
  ConvergenceReport rep = run_convergence(plan, structure());
  emit_convergence_report(plan, structure(), rep);
  out.require(rep.gate_pass, "mollification-rate gate: worst " + format_double(rep.gate_worst));
  for (const auto& row : rep.rows)
    out.require(row.pass, row.tree + ": theta " + format_double(row.theta) + " (se " +
                              format_double(row.theta_se) + ")");
  return out;
}

// ---------- criterion 9: character transfer ---------------------------------------

Outcome criterion9() {
  Outcome out;
  ExperimentPlan plan;
  plan.rule_file = opt.rule_file;
  plan.grid_points = 4096;
  plan.seed = porting_seed() + 60;
  plan.samples = 1500;
  plan.jobs = opt.jobs;
  plan.conv_coarse = {3, 4, 5};  // transfer levels become {2,3,4,5}
  plan.out_dir = opt.scratch + "/c9";
  TransferReport rep = transfer_bphz(plan, structure());
  emit_transfer_report(plan, structure(), rep);
  for (const auto& row : rep.rows) {
    out.require(row.cauchy, row.tree + ": successive character differences not decreasing");
    out.require(row.centered, row.tree + ": final-level centering " +
                                  format_double(row.final_mean) + " vs se " +
                                  format_double(row.final_se));
  }
  return out;
}

// ---------- criterion 10: determinism ----------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome criterion10() {
  Outcome out;
  ExperimentPlan plan;
  plan.rule_file = opt.rule_file;
  plan.grid_points = 512;
  plan.seed = porting_seed() + 70;
  plan.samples = 120;
  plan.jobs = opt.jobs;
  plan.moll_levels = {3};
  plan.phi_levels = {2, 3, 4, 5};

  plan.out_dir = opt.scratch + "/c10a";
  UniformReport r1 = run_uniform_bounds(plan, structure());
  auto paths1 = emit_uniform_report(plan, structure(), r1);

  plan.out_dir = opt.scratch + "/c10b";
  UniformReport r2 = run_uniform_bounds(plan, structure());
  auto paths2 = emit_uniform_report(plan, structure(), r2);

  for (std::size_t i = 0; i < paths1.size(); ++i) {
    out.require(slurp(paths1[i]) == slurp(paths2[i]),
                "outputs differ between identical runs: " + paths1[i]);
  }

  plan.seed += 1;
  plan.out_dir = opt.scratch + "/c10c";
  UniformReport r3 = run_uniform_bounds(plan, structure());
  auto paths3 = emit_uniform_report(plan, structure(), r3);
  bool any_diff = false;
  for (std::size_t i = 0; i < paths3.size(); ++i)
    if (slurp(paths1[i]) != slurp(paths3[i])) any_diff = true;
  out.require(any_diff, "changing the seed left every output identical");
  return out;
}

}  // namespace

// master seed shared by all statistical criteria; fixed so the suite is
// reproducible run-to-run
std::uint64_t porting_seed() { return 918273645; }

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string { return i + 1 < argc ? argv[++i] : ""; };
    if (arg == "--criterion") opt.criterion = std::stoi(next());
    else if (arg == "--rule") opt.rule_file = next();
    else if (arg == "--calib") opt.calib_file = next();
    else if (arg == "--jobs") opt.jobs = std::stoi(next());
    else if (arg == "--scratch") opt.scratch = next();
  }

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  std::vector<Entry> entries{
      {1, "symbolic identities (exact)", criterion1},
      {2, "kernel constructions", criterion2},
      {3, "model identities and stationarity", criterion3},
      {4, "b-BPHZ centering on held-out seeds", criterion4},
      {5, "moment scaling, uniform over mollification", criterion5},
      {6, "reconstruction bounds", criterion6},
      {7, "derivative identity (finite differences)", criterion7},
      {8, "convergence under mollification", criterion8},
      {9, "character transfer", criterion9},
      {10, "determinism of reports", criterion10},
  };

  int failures = 0;
  for (const auto& e : entries) {
    if (opt.criterion != 0 && opt.criterion != e.id) continue;
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.id << ": " << e.name;
    if (!o.detail.empty()) std::cout << " -- " << o.detail;
    std::cout << std::endl;
    if (!o.pass) ++failures;
  }
  return failures;
}
