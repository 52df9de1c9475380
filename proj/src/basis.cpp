#include "rst/basis.hpp"

#include <algorithm>

#include "rst/util.hpp"

namespace rst {

std::string ValidationReport::str() const {
  if (violations.empty()) return "ok";
  std::string s;
  for (const auto& v : violations) s += v + "\n";
  return s;
}

std::set<std::string> StructureSpec::negative_keys() const {
  std::set<std::string> out;
  for (const auto& t : negatives) out.insert(t->key());
  return out;
}

std::map<Rational, std::vector<TreePtr>> StructureSpec::grades() const {
  std::map<Rational, std::vector<TreePtr>> out;
  for (const auto& t : basis) out[t->degree()].push_back(t);
  return out;
}

std::set<std::string> StructureSpec::sector_keys(std::size_t j) const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < j && i < chain.size(); ++i) out.insert(chain[i]->key());
  return out;
}

bool StructureSpec::in_sector(const TreePtr& t, std::size_t j) const {
  if (t->is_polynomial()) return true;
  auto keys = sector_keys(j);
  return keys.count(t->key()) != 0;
}

std::size_t StructureSpec::chain_position(const TreePtr& tau) const {
  if (tau->is_polynomial()) return 0;
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (chain[i]->key() == tau->key()) return i + 1;
  throw std::invalid_argument("StructureSpec: tree " + tau->key() + " not in the chain");
}

namespace {

bool tree_order(const TreePtr& a, const TreePtr& b) {
  if (a->degree() != b->degree()) return a->degree() < b->degree();
  if (a->noise_count() != b->noise_count()) return a->noise_count() < b->noise_count();
  return a->key() < b->key();
}

bool chain_order(const TreePtr& a, const TreePtr& b) {
  if (a->noise_count() != b->noise_count()) return a->noise_count() < b->noise_count();
  if (a->degree() != b->degree()) return a->degree() < b->degree();
  return a->key() < b->key();
}

}  // namespace

StructureSpec generate_basis(const RuleSpec& rule) {
  const ContextPtr& ctx = rule.ctx;
  std::map<std::string, TreePtr> pool;

  auto admit = [&](const TreePtr& t) -> bool {
    if (t->degree() > rule.truncation) return false;
    if (t->noise_count() > rule.max_noise) return false;
    if (!rule.conforms(t)) return false;
    return true;
  };
  auto insert = [&](const TreePtr& t) -> bool {
    if (!admit(t)) return false;
    if (pool.count(t->key())) return false;
    pool.emplace(t->key(), t);
    if (int(pool.size()) > rule.basis_cap)
      throw std::runtime_error("generate_basis: basis size exceeded cap " +
                               std::to_string(rule.basis_cap) +
                               " (rule appears supercritical at this truncation)");
    return true;
  };

  // seeds: conforming polynomials and noise symbols
  for_each_multiindex_below(ctx->scaling.s, rule.truncation + Rational(1, 1000000),
                            [&](const MultiIndex& k) { insert(Tree::poly(ctx, k)); });
  for (LabelId t : ctx->labels.noise_labels()) {
    for_each_multiindex_below(ctx->scaling.s, rule.max_edge_dec + Rational(1, 1000000),
                              [&](const MultiIndex& k) { insert(Tree::noise(ctx, t, k)); });
  }

  // closure under planting and products
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<TreePtr> snapshot;
    for (const auto& [k, t] : pool) snapshot.push_back(t);
    for (const auto& t : snapshot) {
      for (LabelId l : ctx->labels.kernel_labels()) {
        for_each_multiindex_below(ctx->scaling.s, rule.max_edge_dec + Rational(1, 1000000),
                                  [&](const MultiIndex& k) {
                                    TreePtr p = plant(l, k, t);
                                    if (p && insert(p)) grew = true;
                                  });
      }
      for (const auto& u : snapshot) {
        if (u->key() < t->key()) continue;  // unordered pairs once
        try {
          TreePtr p = tree_product(t, u);
          if (insert(p)) grew = true;
        } catch (const std::invalid_argument&) {
          // two noise edges at the joined root: not a typed tree
        }
      }
    }
  }

  StructureSpec spec;
  spec.rule = rule;
  for (const auto& [k, t] : pool) spec.basis.push_back(t);
  std::sort(spec.basis.begin(), spec.basis.end(), tree_order);
  for (std::size_t i = 0; i < spec.basis.size(); ++i)
    spec.basis_index[spec.basis[i]->key()] = i;
  for (const auto& t : spec.basis)
    if (t->degree().is_negative()) spec.negatives.push_back(t);

  // chain: negative trees plus their non-polynomial subtrees with fewer
  // noise edges, (noise count, degree)-lexicographic
  std::map<std::string, TreePtr> chain_pool;
  for (const auto& t : spec.negatives) {
    chain_pool.emplace(t->key(), t);
    for (const auto& s : enumerate_subtrees(t))
      if (s->noise_count() < t->noise_count() && !s->is_polynomial() && !tree_is_zero_symbol(s))
        chain_pool.emplace(s->key(), s);
  }
  for (const auto& [k, t] : chain_pool) spec.chain.push_back(t);
  std::sort(spec.chain.begin(), spec.chain.end(), chain_order);
  return spec;
}

Character<Rational> random_rational_character(std::uint64_t seed) {
  auto xfn = [seed](std::size_t axis) {
    std::uint64_t s = stream_seed(seed, 0x58a1u + axis);
    std::int64_t num = std::int64_t(splitmix64(s) % 7) - 3;
    std::int64_t den = 1 + std::int64_t(splitmix64(s) % 2);
    return Rational(num, den);
  };
  auto jfn = [seed](const JFactor& f) {
    std::uint64_t s = stream_seed(seed, fnv1a(f.key_string()));
    std::int64_t num = std::int64_t(splitmix64(s) % 9) - 4;
    std::int64_t den = 1 + std::int64_t(splitmix64(s) % 3);
    return Rational(num, den);
  };
  return Character<Rational>(xfn, jfn);
}

ValidationReport validate_assumptions(const StructureSpec& spec,
                                      const HopfAlgebra<Rational>& hopf) {
  ValidationReport rep;
  const auto& ctx = spec.context();
  const Rational abs_s = ctx->scaling.total();
  const Rational half = abs_s / Rational(2);

  // per-tree lower bound for trees with >= 2 edges (base and shifted degrees;
  // shifts only increase the degree, so the base check suffices but both ends
  // are reported for clarity)
  for (const auto& t : spec.basis) {
    if (t->edge_count() >= 2 && !(t->degree() > Rational(0) - half))
      rep.violations.push_back("tree " + t->key() + " with >=2 edges has degree " +
                               t->degree().str() + " <= -|s|/2");
  }

  // equal degree => equal noise count
  for (const auto& [deg, trees] : spec.grades()) {
    for (std::size_t i = 1; i < trees.size(); ++i)
      if (trees[i]->noise_count() != trees[0]->noise_count())
        rep.violations.push_back("degree collision with unequal noise count: " +
                                 trees[0]->key() + " vs " + trees[i]->key());
  }

  // shifted label assumptions for all k <= N
  for (std::size_t i = 0; i < ctx->labels.size(); ++i) {
    const Label& l = ctx->labels[LabelId(i)];
    if (l.kind != LabelKind::Noise) continue;
    for (int k : {1, spec.rule.shift_budget}) {
      Rational dk = l.degree + Rational(k) * spec.rule.kappa;
      if (!(Rational(0) - abs_s < dk) || !(dk < l.reg - half))
        rep.violations.push_back("shifted degree |" + l.name + "|^(" + std::to_string(k) +
                                 ") = " + dk.str() + " violates the label bounds");
      Rational hs = dk + half;
      bool same_sign = (hs.is_positive() && l.reg.is_positive()) ||
                       (hs.is_negative() && l.reg.is_negative());
      if (!same_sign)
        rep.violations.push_back("shifted degree |" + l.name + "|^(" + std::to_string(k) +
                                 ") breaks the sign condition");
    }
  }

  // order stability under shifts: check k = 0 and k = N (linear in k)
  {
    std::vector<TreePtr> all = spec.basis;
    for (const auto& t : spec.chain)
      if (!spec.basis_index.count(t->key())) all.push_back(t);
    const Rational kap = spec.rule.kappa;
    const int N = spec.rule.shift_budget;
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        Rational d0 = all[i]->degree() - all[j]->degree();
        Rational dN = all[i]->degree(N, kap) - all[j]->degree(N, kap);
        if ((d0.is_negative() && dN.is_positive()) || (d0.is_positive() && dN.is_negative()))
          rep.violations.push_back("shifted degrees reorder " + all[i]->key() + " and " +
                                   all[j]->key());
      }
    }
  }

  // closure of the basis under the left output of Delta (a posteriori
  // completeness of the extensional rule)
  for (const auto& t : spec.basis) {
    hopf.delta(t).for_each([&](const TensorKey& key, const Rational&) {
      if (key.left->is_polynomial()) return;
      if (!spec.basis_index.count(key.left->key()))
        rep.violations.push_back("Delta left output " + key.left->key() + " of " + t->key() +
                                 " is outside the basis");
    });
  }
  std::sort(rep.violations.begin(), rep.violations.end());
  rep.violations.erase(std::unique(rep.violations.begin(), rep.violations.end()),
                       rep.violations.end());
  return rep;
}

ValidationReport verify_sector_closure(const StructureSpec& spec,
                                       const HopfAlgebra<Rational>& hopf, std::uint64_t seed,
                                       int n_characters) {
  ValidationReport rep;
  for (int c = 0; c < n_characters; ++c) {
    Character<Rational> f = random_rational_character(stream_seed(seed, std::uint64_t(c)));
    for (std::size_t j = 0; j < spec.chain.size(); ++j) {
      const TreePtr& tau = spec.chain[j];
      TreePoly<Rational> v = gamma_of_character(hopf, f, tau);
      v.add(tree_single<Rational>(tau), Rational(-1));
      v.for_each([&](const TreeKey& k, const Rational& coef) {
        if (coef == Rational(0)) return;
        if (!spec.in_sector(k.tree, j))
          rep.violations.push_back("Gamma tau_" + std::to_string(j + 1) + " - tau leaves V^(" +
                                   std::to_string(j) + "): term " + k.tree->key());
      });
    }
  }
  std::sort(rep.violations.begin(), rep.violations.end());
  rep.violations.erase(std::unique(rep.violations.begin(), rep.violations.end()),
                       rep.violations.end());
  return rep;
}

}  // namespace rst
