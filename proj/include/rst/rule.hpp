#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rst/tree.hpp"

namespace rst {

// Schema problems in a rule file (bad keys, malformed values, ...)
struct RuleSchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Violations of the algebraic admissibility constraints on labels
struct AlgebraicAssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multiplicity window for one edge label below a node; labels not listed are
// forbidden at that node.
struct NodeRule {
  std::map<LabelId, std::pair<int, int>> multiplicity;  // label -> [min,max]
  Rational max_node_dec;                                // bound on |n|_s

  bool allows(LabelId l, int count) const {
    auto it = multiplicity.find(l);
    if (it == multiplicity.end()) return count == 0;
    return count >= it->second.first && count <= it->second.second;
  }
};

// Extensional rule: an explicit node rule for the root position and for the
// node below each kernel edge.  Completeness is checked a posteriori through
// the Delta-closure of the generated basis.
struct RuleSpec {
  ContextPtr ctx;
  NodeRule root_rule;
  std::map<LabelId, NodeRule> under_rule;  // per kernel label
  Rational max_edge_dec;                   // bound on |e|_s for edge decorations

  Rational truncation;  // R
  int max_noise = 0;
  int basis_cap = 100000;

  Rational kappa;      // shift unit for |.|^(k)
  Rational kappa_bar;  // loss used by the gamma_tau offsets
  int shift_budget = 0;  // N

  std::string source_text;  // raw file contents (hashed into reports)

  const NodeRule& rule_at(LabelId incoming_kernel) const {
    auto it = under_rule.find(incoming_kernel);
    if (it == under_rule.end())
      throw std::invalid_argument("RuleSpec: no node rule under label " +
                                  ctx->labels[incoming_kernel].name);
    return it->second;
  }

  // whole-tree conformity (root against root rule, inner nodes against the
  // rule of their incoming kernel edge)
  bool conforms(const TreePtr& tau) const;

 private:
  bool conforms_node(const TreePtr& node, const NodeRule& rule) const;
};

// Parse the sectioned key-value format documented in docs/rule-format.md.
RuleSpec parse_rule(const std::string& text);
RuleSpec parse_rule_file(const std::string& path);

}  // namespace rst
