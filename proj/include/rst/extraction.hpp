#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rst/hopf.hpp"
#include "rst/tplus.hpp"

namespace rst {

// Multiset of trees, canonically sorted.  Empty forest = unit.
struct Forest {
  std::vector<TreePtr> components;  // sorted by key

  static Forest empty() { return Forest{}; }
  std::string key_string() const {
    if (components.empty()) return "()";
    std::string s = "(";
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i) s += " . ";
      s += components[i]->key();
    }
    return s + ")";
  }
};

// Character on negative-degree trees, extended multiplicatively to forests.
template <class S>
class NegCharacter {
 public:
  NegCharacter() = default;

  void set(const TreePtr& tau, const S& v) { values_[tau->key()] = v; }
  S on_tree(const TreePtr& tau) const {
    auto it = values_.find(tau->key());
    return it == values_.end() ? S(0) : it->second;
  }
  S on_forest(const Forest& f) const {
    S v(1);
    for (const auto& t : f.components) v = v * on_tree(t);
    return v;
  }
  const std::map<std::string, S>& table() const { return values_; }

 private:
  std::map<std::string, S> values_;  // tree key -> value
};

// Term of the reduced extraction-contraction coproduct: the extracted forest
// together with the contracted remainder (kept raw; symbols of the form
// I_k(polynomial) are normalized to zero only when a renormalisation map is
// assembled from these terms).
struct ExtractionTerm {
  Forest extracted;
  TreePtr contracted;
};

// All ways of extracting a disjoint collection of negative-degree subtrees
// drawn from `negatives` (keys of admissible negative trees), each collection
// member containing every noise edge attached at its covered nodes.  Includes
// the empty extraction.  Deterministic order.
std::vector<ExtractionTerm> extraction_coproduct(const TreePtr& tau,
                                                 const std::set<std::string>& negatives);

// M_g tau = (g (x) 1) Delta^- tau, as a linear map on trees.
template <class S>
class RenormMap {
 public:
  RenormMap() = default;
  RenormMap(NegCharacter<S> g, std::set<std::string> negatives)
      : g_(std::move(g)), negatives_(std::move(negatives)) {}

  const NegCharacter<S>& character() const { return g_; }

  TreePoly<S> apply(const TreePtr& tau) const {
    auto it = memo_.find(tau->key());
    if (it != memo_.end()) return it->second;
    TreePoly<S> out;
    for (const auto& term : extraction_coproduct(tau, negatives_)) {
      if (tree_is_zero_symbol(term.contracted)) continue;
      S w = g_.on_forest(term.extracted);
      out.add(TreeKey{term.contracted}, w);
    }
    memo_.emplace(tau->key(), out);
    return out;
  }

  TreePoly<S> apply(const TreePoly<S>& v) const {
    TreePoly<S> out;
    v.for_each([&](const TreeKey& k, const S& c) { out.add(apply(k.tree) * c); });
    return out;
  }

 private:
  NegCharacter<S> g_;
  std::set<std::string> negatives_;
  mutable std::map<std::string, TreePoly<S>> memo_;
};

}  // namespace rst
