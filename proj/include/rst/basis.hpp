#pragma once

#include <map>
#include <set>
#include <vector>

#include "rst/hopf.hpp"
#include "rst/rule.hpp"

namespace rst {

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

// Rule-generated truncated basis with graded components and the sector chain.
class StructureSpec {
 public:
  RuleSpec rule;
  std::vector<TreePtr> basis;             // sorted by (degree, noise count, key)
  std::vector<TreePtr> negatives;         // negative-degree basis trees
  std::vector<TreePtr> chain;             // tau_1 ... tau_{n0}, (noise, degree) lex
  std::map<std::string, std::size_t> basis_index;

  const ContextPtr& context() const { return rule.ctx; }
  bool in_basis(const TreePtr& t) const { return basis_index.count(t->key()) != 0; }
  std::set<std::string> negative_keys() const;

  // graded components: degree -> basis subset
  std::map<Rational, std::vector<TreePtr>> grades() const;

  // span of V^(j) = {tau_1..tau_j} + polynomials, as a key set (polynomials
  // are implicit members of every sector)
  std::set<std::string> sector_keys(std::size_t j) const;
  bool in_sector(const TreePtr& t, std::size_t j) const;

  // smallest index j such that tau lies in V^(j); throws if tau is not in the
  // chain closure
  std::size_t chain_position(const TreePtr& tau) const;
};

StructureSpec generate_basis(const RuleSpec& rule);

// Assumption checks that need the generated basis: per-tree lower bounds,
// degree-collision/noise-count consistency, shifted-degree order stability,
// and closure of the basis under the left output of Delta.
ValidationReport validate_assumptions(const StructureSpec& spec,
                                      const HopfAlgebra<Rational>& hopf);

// Sector-closure check of the chain: for each j and a few deterministic
// random rational characters f, Gamma_f tau_j - tau_j lies in span V^(j-1).
ValidationReport verify_sector_closure(const StructureSpec& spec,
                                       const HopfAlgebra<Rational>& hopf,
                                       std::uint64_t seed, int n_characters);

// deterministic rational-valued character for symbolic property tests
Character<Rational> random_rational_character(std::uint64_t seed);

}  // namespace rst
