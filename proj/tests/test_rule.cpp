#include <set>

#include "doctest.h"
#include "rst/basis.hpp"
#include "rst/rule.hpp"
#include "t1.hpp"

using namespace rst;

TEST_CASE("rule file parses to the expected labels") {
  const RuleSpec& r = t1::rule();
  CHECK(r.ctx->dim() == 1);
  const Label& xi = r.ctx->labels[r.ctx->labels.find("Xi")];
  CHECK(xi.kind == LabelKind::Noise);
  CHECK(xi.degree == Rational(-57, 100));
  const Label& l = r.ctx->labels[r.ctx->labels.find("l")];
  CHECK(l.kind == LabelKind::Kernel);
  CHECK(l.degree == Rational(3, 4));
  CHECK(r.truncation == Rational(1));
  CHECK(r.max_noise == 4);
}

TEST_CASE("label-level admissibility violations are a distinct error class") {
  std::string bad_noise = t1::rule_text();
  // noise degree -1.2 with |s| = 1 violates -|s| < degree
  auto pos = bad_noise.find("deg=-0.57");
  bad_noise.replace(pos, 9, "deg=-1.2 ");
  CHECK_THROWS_AS((void)parse_rule(bad_noise), AlgebraicAssumptionError);

  std::string bad_kernel = t1::rule_text();
  pos = bad_kernel.find("deg=0.75");
  bad_kernel.replace(pos, 8, "deg=-0.5");
  CHECK_THROWS_AS((void)parse_rule(bad_kernel), RuleSchemaError);  // rejected at label add

  std::string bad_key = t1::rule_text();
  pos = bad_key.find("max_noise");
  bad_key.replace(pos, 9, "max_bogus");
  CHECK_THROWS_AS((void)parse_rule(bad_key), RuleSchemaError);
}

namespace {

// Independent brute-force enumeration of the desk-scale closure: trees of the
// shape X^c * Xi^b * prod_{i<=a} I(Xi), a <= 3, b <= 1, c <= 1, filtered by
// degree <= 1 and noise count <= 4.  Written without the rule engine.
std::set<std::string> oracle_basis_keys() {
  std::set<std::string> keys;
  auto ctx = t1::ctx();
  auto l = ctx->labels.find("l");
  auto xi = ctx->labels.find("Xi");
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; b <= 1; ++b) {
      for (int c = 0; c <= 1; ++c) {
        double deg = 0.18 * a - 0.57 * b + 1.0 * c;
        if (deg > 1.0 + 1e-12) continue;
        if (a + b > 4) continue;
        TreePtr t = Tree::poly(ctx, MultiIndex(std::vector<int>{c}));
        for (int i = 0; i < a; ++i)
          t = tree_product(t, graft(l, MultiIndex(1), Tree::noise(ctx, xi)));
        if (b) t = tree_product(t, Tree::noise(ctx, xi));
        keys.insert(t->key());
      }
    }
  }
  return keys;
}

}  // namespace

TEST_CASE("basis generation matches the brute-force oracle") {
  const StructureSpec& s = t1::structure();
  std::set<std::string> got;
  for (const auto& t : s.basis) got.insert(t->key());
  CHECK(got == oracle_basis_keys());

  // spot membership as listed in the overview examples
  for (const char* k : {"1", "X", "Xi", "I[l,0](Xi)", "I[l,0](Xi)*Xi",
                        "I[l,0](Xi)*I[l,0](Xi)*Xi", "I[l,0](Xi)*I[l,0](Xi)*I[l,0](Xi)*Xi"})
    CHECK(got.count(k) == 1);
}

TEST_CASE("negative subset is exactly the four expected trees") {
  const StructureSpec& s = t1::structure();
  std::set<std::string> neg;
  for (const auto& t : s.negatives) neg.insert(t->key());
  std::set<std::string> expect = {"Xi", "I[l,0](Xi)*Xi", "I[l,0](Xi)*I[l,0](Xi)*Xi",
                                  "I[l,0](Xi)*I[l,0](Xi)*I[l,0](Xi)*Xi"};
  CHECK(neg == expect);
  CHECK(s.negatives[0]->degree() == Rational(-57, 100));
  CHECK(s.negatives[1]->degree() == Rational(-39, 100));
  CHECK(s.negatives[2]->degree() == Rational(-21, 100));
  CHECK(s.negatives[3]->degree() == Rational(-3, 100));
}

TEST_CASE("max noise count 1 cuts the negative set to the bare noise") {
  std::string text = t1::rule_text();
  auto pos = text.find("max_noise = 4");
  text.replace(pos, 13, "max_noise = 1");
  StructureSpec s = generate_basis(parse_rule(text));
  CHECK(s.negatives.size() == 1);
  CHECK(s.negatives[0]->key() == "Xi");
}

TEST_CASE("chain order is (noise count, degree) lexicographic") {
  const StructureSpec& s = t1::structure();
  REQUIRE(s.chain.size() == 7);
  CHECK(s.chain[0]->key() == "Xi");
  CHECK(s.chain[1]->key() == "I[l,0](Xi)");
  CHECK(s.chain[2]->key() == "I[l,0](Xi)*Xi");
  CHECK(s.chain[3]->key() == "I[l,0](Xi)*I[l,0](Xi)");
  CHECK(s.chain[4]->key() == "I[l,0](Xi)*I[l,0](Xi)*Xi");
  CHECK(s.chain[5]->key() == "I[l,0](Xi)*I[l,0](Xi)*I[l,0](Xi)");
  CHECK(s.chain[6]->key() == "I[l,0](Xi)*I[l,0](Xi)*I[l,0](Xi)*Xi");
}

TEST_CASE("basis generation is deterministic and idempotent") {
  StructureSpec a = generate_basis(t1::rule());
  StructureSpec b = generate_basis(t1::rule());
  REQUIRE(a.basis.size() == b.basis.size());
  for (std::size_t i = 0; i < a.basis.size(); ++i)
    CHECK(a.basis[i]->key() == b.basis[i]->key());
}

TEST_CASE("assumption validation passes on the desk-scale structure") {
  HopfAlgebra<Rational> H(t1::ctx());
  ValidationReport rep = validate_assumptions(t1::structure(), H);
  INFO(rep.str());
  CHECK(rep.ok());
}

TEST_CASE("kernel degree 0.57 creates a reportable two-edge violation") {
  // with beta = 0.57, |I(Xi)*Xi| = -0.57 < -1/2
  std::string text = t1::rule_text();
  auto pos = text.find("deg=0.75");
  text.replace(pos, 8, "deg=0.57");
  RuleSpec r = parse_rule(text);
  StructureSpec s = generate_basis(r);
  HopfAlgebra<Rational> H(r.ctx);
  ValidationReport rep = validate_assumptions(s, H);
  CHECK(!rep.ok());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.find(">=2 edges") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("sector closure holds for randomized characters") {
  HopfAlgebra<Rational> H(t1::ctx());
  ValidationReport rep = verify_sector_closure(t1::structure(), H, 12345u, 3);
  INFO(rep.str());
  CHECK(rep.ok());
}

TEST_CASE("empty negative set yields an empty chain") {
  // positive-degree noise: deg + |s|/2 = 0.8 and reg = 0.85 share a sign,
  // and deg < reg - |s|/2 holds
  std::string text =
      "[scaling]\nd = 1\ns = 1\n"
      "[labels]\nXi = noise deg=0.30 reg=0.85\nl = kernel deg=0.75\n"
      "[rule]\nroot = l{0..1} Xi{0..1} dec<=0\nunder(l) = Xi{1..1} dec<=0\nmax_edge_dec = 0\n"
      "[truncation]\nR = 1.0\nmax_noise = 2\nbasis_cap = 1000\n"
      "[constants]\nkappa = 0.001\nkappa_bar = 1/64\nN = 8\n";
  StructureSpec s = generate_basis(parse_rule(text));
  CHECK(s.negatives.empty());
  CHECK(s.chain.empty());
}
