#include <cmath>

#include "doctest.h"
#include "rst/frechet.hpp"
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

NegCharacter<double> fixed_char() {
  NegCharacter<double> g;
  g.set(t1::T("I[l,0](Xi)*Xi"), -0.4);
  g.set(t1::T("I[l,0](Xi)*I[l,0](Xi)*Xi"), 0.15);
  return g;
}

std::shared_ptr<const Model> renorm_model() {
  static auto m = std::make_shared<Model>(factory().lift_seed(
      91, 2, false, RenormMap<double>(fixed_char(), t1::structure().negative_keys())));
  return m;
}

const double kb = 1.0 / 64;

Direction dir(std::uint64_t seed) {
  return sample_smooth_direction(grid256(), t1::ctx()->labels, seed);
}

}  // namespace

TEST_CASE("degree bookkeeping of the pointed family") {
  auto m = renorm_model();
  TreeDegrees dg = tree_degrees(*m, t1::T("Xi"), kb);
  CHECK(dg.alpha == doctest::Approx(-0.57));
  CHECK(dg.gamma_tau == doctest::Approx(-0.07 - kb));
  CHECK(dg.deg2 == doctest::Approx(-0.07));

  TreeDegrees di = tree_degrees(*m, t1::T("I[l,0](Xi)"), kb);
  CHECK(di.alpha == doctest::Approx(0.18));
  CHECK(di.gamma_tau == doctest::Approx(0.68 - kb));

  TreeDegrees dp = tree_degrees(*m, t1::T("I[l,0](Xi)*Xi"), kb);
  CHECK(dp.alpha == doctest::Approx(-0.57));
  CHECK(dp.gamma_tau == doctest::Approx(-0.07 - 2 * kb));

  CHECK(is_bad_tree(*m, t1::T("Xi")));
  CHECK(is_bad_tree(*m, t1::T("I[l,0](Xi)*Xi")));
  CHECK(!is_bad_tree(*m, t1::T("I[l,0](Xi)")));
}

TEST_CASE("base cases: H_1 = H_X = 0, H_Xi carries the mollified direction") {
  auto m = renorm_model();
  HFamily fam(m, &sk256(), dir(5), {0.0}, kb);
  CHECK(fam.of(Tree::unit(t1::ctx())).field.empty());
  CHECK(fam.of(t1::T("X")).field.empty());

  const HResult& hxi = fam.of(t1::T("Xi"));
  CHECK(hxi.field.empty());
  REQUIRE(hxi.has_candidate);
  Field expect = m->mollifier()->apply(dir(5).fields.at("Xi"), m->mollification_level());
  CHECK((hxi.candidate - expect).sup_norm() < 1e-12);
}

TEST_CASE("H_{I(Xi)} is the recentered kernel convolution of the direction") {
  auto m = renorm_model();
  Direction eta = dir(6);
  HFamily fam(m, &sk256(), eta, {0.0}, kb);
  const HResult& h = fam.of(t1::T("I[l,0](Xi)"));
  REQUIRE(!h.field.empty());
  CHECK(!h.has_candidate);
  const Field* c0 = h.field.coeff("1");
  REQUIRE(c0);
  Field etan = m->mollifier()->apply(eta.fields.at("Xi"), m->mollification_level());
  Field conv = convolve(factory().kernels.of("l").total(MultiIndex(1)), etan);
  Field expect = conv;
  double at0 = conv[0];
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] -= at0;
  CHECK((*c0 - expect).sup_norm() < 1e-9);
}

TEST_CASE("linearity of the family in the direction") {
  auto m = renorm_model();
  Direction e1 = dir(7), e2 = dir(8);
  Direction combo;
  for (const auto& [k, f] : e1.fields) combo.fields.emplace(k, f * 2.0 + e2.fields.at(k) * (-0.5));

  HFamily f1(m, &sk256(), e1, {0.0}, kb);
  HFamily f2(m, &sk256(), e2, {0.0}, kb);
  HFamily fc(m, &sk256(), combo, {0.0}, kb);

  for (const char* key : {"I[l,0](Xi)", "I[l,0](Xi)*Xi", "I[l,0](Xi)*I[l,0](Xi)"}) {
    auto tau = t1::T(key);
    const HResult& a = f1.of(tau);
    const HResult& b = f2.of(tau);
    const HResult& c = fc.of(tau);
    for (const auto& [ck, tc] : c.field.coeffs()) {
      Field expect = (a.field.coeff(ck) ? *a.field.coeff(ck) * 2.0 : Field(grid256())) +
                     (b.field.coeff(ck) ? *b.field.coeff(ck) * (-0.5) : Field(grid256()));
      CHECK((tc.second - expect).sup_norm() < 1e-10);
    }
  }
}

TEST_CASE("values-in-sector: H_{tau_j} is supported on V^(j-1)") {
  auto m = renorm_model();
  HFamily fam(m, &sk256(), dir(9), {0.0}, kb);
  const auto& spec = t1::structure();
  for (std::size_t j = 0; j < spec.chain.size(); ++j) {
    const HResult& h = fam.of(spec.chain[j]);
    for (const auto& [k, tc] : h.field.coeffs()) {
      INFO("chain step ", j + 1, " component ", k);
      CHECK(spec.in_sector(tc.first, j));
    }
  }
}

TEST_CASE("candidates for the gamma <= 0 members pass the candidate check") {
  auto m = renorm_model();
  HFamily fam(m, &sk256(), dir(10), {0.0}, kb);
  auto probes = TestFunction::family(grid256(), 2);
  Region region = Region::centered_fraction(*grid256(), 0.4);
  for (const char* key : {"Xi", "I[l,0](Xi)*Xi", "I[l,0](Xi)*I[l,0](Xi)*Xi"}) {
    auto tau = t1::T(key);
    const HResult& h = fam.of(tau);
    REQUIRE(h.has_candidate);
    CandidateReport rep =
        candidate_check(h.field, h.spec.gamma, h.candidate, probes, 2.0, region, 2, 5);
    INFO(std::string(key), " constants per level");
    CHECK(!rep.growing);
    CHECK(std::isfinite(rep.constant));
  }
}

TEST_CASE("gamma-covariance: the lift agrees with the model recentering") {
  auto m = renorm_model();
  auto tau = t1::T("I[l,0](Xi)");
  std::vector<double> x0{0.25};
  ModelledField lift = gamma_lift(m, tau, x0, 5.0);
  auto& H = *m->hopf();
  for (double y : {0.3125, 0.1875}) {
    Character<double> gyx = m->gamma_xy({y}, x0);
    TreePoly<double> expect = gamma_of_character(H, gyx, tau);
    std::vector<int> yi{int(std::llround(y * 256))};
    expect.for_each([&](const TreeKey& k, const double& c) {
      const Field* cf = lift.coeff(k.tree->key());
      REQUIRE(cf != nullptr);
      CHECK(cf->at(yi) == doctest::Approx(c).epsilon(1e-8));
    });
  }
}

TEST_CASE("h-norm report: zero directions give zero, doubling doubles") {
  auto m = renorm_model();
  Direction eta = dir(11);
  HFamily f1(m, &sk256(), eta, {0.0}, kb);
  HFamily f2(m, &sk256(), eta.scaled(2.0), {0.0}, kb);
  auto tau = t1::T("I[l,0](Xi)");
  const HResult& a = f1.of(tau);
  const HResult& b = f2.of(tau);
  const Field* ca = a.field.coeff("1");
  const Field* cb = b.field.coeff("1");
  REQUIRE(ca);
  REQUIRE(cb);
  CHECK((*cb - *ca * 2.0).sup_norm() < 1e-10);

  Direction zero;
  for (const auto& [k, f] : eta.fields) zero.fields.emplace(k, Field(grid256()));
  HFamily fz(m, &sk256(), zero, {0.0}, kb);
  const HResult& z = fz.of(t1::T("I[l,0](Xi)*Xi"));
  for (const auto& [k, tc] : z.field.coeffs()) CHECK(tc.second.sup_norm() < 1e-14);

  HNormReport rep = h_norm_report(m, sk256(), tau, {0.0}, kb, 2, 321);
  CHECK(rep.sup_norm > 0);
  CHECK(std::isfinite(rep.sup_norm));
}

TEST_CASE("finite differences: exactness for the noise, halving for composites") {
  TestFunction psi = TestFunction::bump_profile(grid256(), 2);
  Field placed = psi.place({0.0}, 0.125);
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};

  // tau = Xi: the model is linear in the noise, discrepancy at the floor
  FdReport r0 = frechet_fd_check(factory(), sk256(), 1001, 2, fixed_char(), t1::T("Xi"),
                                 dir(21), placed, eps, kb);
  CHECK(r0.linear_exact);

  // eta = 0: zero discrepancy
  Direction zero;
  for (LabelId t : t1::ctx()->labels.noise_labels())
    zero.fields.emplace(t1::ctx()->labels[t].name, Field(grid256()));
  FdReport rz = frechet_fd_check(factory(), sk256(), 1001, 2, fixed_char(),
                                 t1::T("I[l,0](Xi)*Xi"), zero, placed, eps, kb);
  for (const auto& row : rz.rows) CHECK(std::fabs(row.fd) < 1e-12);

  // composite trees: discrepancy halves under eps-halving
  for (const char* key : {"I[l,0](Xi)*Xi", "I[l,0](Xi)*I[l,0](Xi)*Xi"}) {
    FdReport r = frechet_fd_check(factory(), sk256(), 1001, 2, fixed_char(), t1::T(key),
                                  dir(22), placed, eps, kb);
    INFO(key);
    REQUIRE(r.ratios.size() == 2);
    if (!r.linear_exact) {
      for (double ratio : r.ratios) {
        CHECK(ratio > 1.5);
        CHECK(ratio < 2.5);
      }
    }
  }
}
