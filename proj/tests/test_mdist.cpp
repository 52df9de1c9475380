#include <cmath>

#include "doctest.h"
#include "rst/frechet.hpp"
#include "rst/mdist.hpp"
#include "rst/util.hpp"
#include "t1.hpp"

using namespace rst;

namespace {

GridPtr grid256() {
  static GridPtr g = Grid::make(ScalingSpec::isotropic(1), 256);
  return g;
}

const ModelFactory& factory() {
  static ModelFactory f(t1::structure(), grid256());
  return f;
}

const SemigroupKernel& sk256() {
  static SemigroupKernel sk(grid256(), 2);
  return sk;
}

std::shared_ptr<const Model> model42() {
  static auto m = std::make_shared<Model>(factory().lift_seed(42, 2));
  return m;
}

Field smooth_sample() {
  return Field::sample(grid256(), [](const std::vector<double>& x) {
    return std::sin(2 * M_PI * x[0]) + 0.4 * std::cos(4 * M_PI * x[0]);
  });
}

}  // namespace

TEST_CASE("md_norm: constant primitive field has zero translation part") {
  ModelledField f(model42(), 0.0);
  f.set(t1::T("Xi"), Field::sample(grid256(), [](const std::vector<double>&) { return 2.0; }));
  MdNorm n = md_norm(f, 2, -1, Region::full(*grid256()), 2, 5);
  CHECK(n.local == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(n.translation < 1e-10);
}

TEST_CASE("md_norm: Taylor lift has bounded scaled translation differences") {
  Field g = smooth_sample();
  ModelledField f = taylor_lift(model42(), g, 2.0);
  MdNorm n = md_norm(f, 2, -1, Region::full(*grid256()), 2, 5);
  CHECK(n.local > 0);
  CHECK(n.translation > 0);
  CHECK(n.translation < 1e4);  // Taylor remainder of order gamma - zeta stays bounded
}

TEST_CASE("gamma lift reconstructs to the frozen base model field") {
  auto m = model42();
  std::vector<double> x0{0.25};
  auto tau = t1::T("I[l,0](Xi)");
  ModelledField f = gamma_lift(m, tau, x0, 2.0);

  // f(y) = Gamma_{y x0} tau: reconstruction must equal Pi_{x0} tau
  Field r = reconstruct_pointwise(f);
  Field direct = m->canonical(tau).realise(x0);
  CHECK((r - direct).sup_norm() < 1e-8);

  // pairings through the level-N reconstruction agree to quadrature accuracy
  TestFunction psi = TestFunction::bump_profile(grid256(), 2);
  Field placed = psi.place({0.25}, 0.125);
  Field rN = reconstruct(f, sk256(), sk256().top_usable_level());
  double a = pair_distribution(rN, placed);
  double b = m->pair(tau, x0, placed);
  CHECK(std::fabs(a - b) < 2e-3 * std::max(1.0, std::fabs(b)));
}

TEST_CASE("Taylor lift reconstructs the function itself") {
  Field g = smooth_sample();
  ModelledField f = taylor_lift(model42(), g, 2.0);
  Field r = reconstruct_pointwise(f);
  CHECK((r - g).sup_norm() < 1e-10);
}

TEST_CASE("reconstruction error decays at rate gamma") {
  // f = Taylor lift to order 2 of a smooth function: the level-n pairing
  // <R f - Pi_x f(x), phi_x^n> must decay at least like 2^{-2n}
  Field g = smooth_sample();
  ModelledField f = taylor_lift(model42(), g, 2.0);
  Field rf = reconstruct_pointwise(f);
  std::vector<double> xs, ys;
  for (int n = 2; n <= 5; ++n) {
    Field pf(grid256());
    for (const auto& [k, tc] : f.coeffs()) {
      Field pc = model42()->renormalised_terms(tc.first).pair_kernel(sk256().phi(n));
      pf += tc.second.hadamard(pc);
    }
    Field err = convolve(sk256().phi(n), rf) - pf;
    xs.push_back(n);
    ys.push_back(std::log2(std::max(lp_norm_region(err, 2, Region::full(*grid256())), 1e-300)));
  }
  LineFit fit = fit_line(xs, ys);
  CHECK(fit.slope <= -(2.0 - 0.1));
}

TEST_CASE("pointed multiply: unit factor projects, Taylor algebra multiplies") {
  Field g1 = smooth_sample();
  Field g2 = Field::sample(grid256(), [](const std::vector<double>& x) {
    return std::cos(2 * M_PI * x[0]);
  });
  ModelledField f1 = taylor_lift(model42(), g1, 2.0);

  ModelledField one(model42(), 2.0);
  one.set(Tree::unit(t1::ctx()),
          Field::sample(grid256(), [](const std::vector<double>&) { return 1.0; }));
  ModelledField p = pointed_multiply(f1, one);
  for (const auto& [k, tc] : p.coeffs()) {
    const Field* orig = f1.coeff(k);
    REQUIRE(orig != nullptr);
    CHECK((tc.second - *orig).sup_norm() < 1e-12);
  }

  ModelledField f2 = taylor_lift(model42(), g2, 2.0);
  ModelledField prod = pointed_multiply(f1, f2);
  ModelledField expect = taylor_lift(model42(), g1.hadamard(g2), prod.gamma());
  for (const auto& [k, tc] : prod.coeffs()) {
    const Field* e = expect.coeff(k);
    REQUIRE(e != nullptr);
    CHECK((tc.second - *e).sup_norm() < 1e-6);
  }
}

TEST_CASE("localize: support control and plateau identity") {
  Field g = smooth_sample();
  ModelledField f = taylor_lift(model42(), g, 2.0);
  std::vector<double> x0{0.5};
  double lambda = 1.0 / 32;
  ModelledField loc = localize(f, lambda, x0, 2);
  const Grid& gr = *grid256();
  for (const auto& [k, tc] : loc.coeffs()) {
    for (std::size_t i = 0; i < tc.second.size(); ++i) {
      auto y = gr.point(gr.unflat(i));
      double dist = gr.snorm(gr.displacement(y, x0));
      if (dist > 4 * lambda + 1e-12) CHECK(tc.second[i] == 0.0);
    }
  }
  // equality with f on the inner plateau
  const Field* f0 = f.coeff("1");
  const Field* l0 = loc.coeff("1");
  REQUIRE(f0);
  REQUIRE(l0);
  for (std::size_t i = 0; i < f0->size(); ++i) {
    auto y = gr.point(gr.unflat(i));
    if (gr.snorm(gr.displacement(y, x0)) < 2 * lambda - 1e-9)
      CHECK((*l0)[i] == doctest::Approx((*f0)[i]).epsilon(1e-9));
  }
}

TEST_CASE("pointed norm: zero field, and blow-up flags for constants") {
  ModelledField z(model42(), 1.0);
  PointedSpec spec{1.0, 1.5, {0.25}, 2.0};
  CHECK(pointed_norm(z, spec, 2, 5) == 0.0);

  // constant coefficient in a direction of degree 0 < nu makes the local
  // bound blow up as lambda -> 0: the sup grows with the level range
  ModelledField c(model42(), 1.0);
  c.set(Tree::unit(t1::ctx()),
        Field::sample(grid256(), [](const std::vector<double>&) { return 1.0; }));
  double shallow = pointed_norm(c, spec, 2, 3);
  double deep = pointed_norm(c, spec, 2, 5);
  CHECK(deep > 2.0 * shallow);
}

TEST_CASE("pointed schauder on a polynomial lift matches direct quadrature") {
  Field g = smooth_sample();
  ModelledField f = taylor_lift(model42(), g, 1.9);
  std::vector<double> x0{0.25};
  PointedSpec spec{1.9, 1.9, x0, 2.0};
  Field rf = reconstruct_pointwise(f);
  ModelledField out = pointed_schauder(f, "l", spec, rf);

  // the X^0 coefficient is (K * g)(y) - jets at x0; compare against direct
  // convolution off the jet part
  const SingularKernel& K = factory().kernels.of("l");
  Field kg = convolve_direct(K.total(MultiIndex(1)), g);
  const Field* c0 = out.coeff("1");
  REQUIRE(c0);
  // jets at x0: sum_{|k| < nu + beta - 1/2} (y-x)^k/k! D^k(K*g)(x0)
  Field jet(grid256());
  const Grid& gr = *grid256();
  std::vector<int> xi{int(std::llround(0.25 * gr.n[0]))};
  double bound = spec.nu + 0.75 - 0.5;
  for (int k = 0; k * 1.0 < bound; ++k) {
    Field dk = k == 0 ? kg : convolve(K.total(MultiIndex(std::vector<int>{k})), g);
    double v = dk.at(xi);
    double fact = 1;
    for (int t = 2; t <= k; ++t) fact *= t;
    Field mono = Field::sample(grid256(), [&](const std::vector<double>& y) {
      double dy = gr.wrap(y[0] - 0.25, 0);
      double m = 1;
      for (int p = 0; p < k; ++p) m *= dy;
      return m;
    });
    jet += mono * (v / fact);
  }
  Field expect = kg - jet;
  double sup = 0;
  for (std::size_t i = 0; i < expect.size(); ++i)
    sup = std::max(sup, std::fabs((*c0)[i] - expect[i]));
  CHECK(sup < 1e-4);

  // K * R f is a candidate for the output's reconstruction
  Field cand = convolve(K.total(MultiIndex(1)), rf);
  auto probes = TestFunction::family(grid256(), 2);
  CandidateReport rep = candidate_check(out, out.gamma(), cand, probes, 2.0,
                                        Region::centered_fraction(gr, 0.4), 2, 5);
  CHECK(!rep.growing);
  CHECK(rep.constant < 1e3);
}

TEST_CASE("candidate check accepts the zero candidate for the zero field") {
  ModelledField z(model42(), -0.5);
  Field zero(grid256());
  auto probes = TestFunction::family(grid256(), 2);
  CandidateReport rep =
      candidate_check(z, -0.5, zero, probes, 2.0, Region::full(*grid256()), 2, 5);
  CHECK(rep.constant == 0.0);
}

TEST_CASE("sobolev coefficient norm: zero, white noise finite, Lp comparison") {
  ModelledField z(model42(), 1.0);
  CHECK(sobolev_coeff_norm(z, sk256(), 0.6, 2, Region::full(*grid256()), 5) == 0.0);

  ModelledField f(model42(), 1.0);
  Field xi = sample_white_noise_field(grid256(), 99);
  f.set(Tree::unit(t1::ctx()), xi);
  double nrm = sobolev_coeff_norm(f, sk256(), 0.6, 2, Region::full(*grid256()), 5);
  CHECK(nrm > 0);
  CHECK(std::isfinite(nrm));
  // controlled by the plain L^2 norm of the coefficient (up to the level-0 factor)
  CHECK(nrm < 4.0 * xi.l2_norm());
}
