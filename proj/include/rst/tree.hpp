#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rst/labels.hpp"
#include "rst/multiindex.hpp"
#include "rst/scaling.hpp"

namespace rst {

class Tree;
using TreePtr = std::shared_ptr<const Tree>;

// Context shared by all trees of one structure: scaling + labels.  Trees keep
// a pointer to it so degree computations need no extra arguments threaded
// through the symbolic layer.
struct TreeContext {
  ScalingSpec scaling;
  LabelSet labels;

  std::size_t dim() const { return scaling.dim(); }
};
using ContextPtr = std::shared_ptr<const TreeContext>;

// Typed decorated rooted tree.  Immutable; branches are kept sorted by their
// canonical printed form, so two trees are isomorphic as decorated trees iff
// their keys are equal.  Noise edges always end in a bare leaf.
class Tree {
 public:
  struct Branch {
    LabelId label;
    MultiIndex edge_dec;  // e
    TreePtr child;
  };

  // single node X^k (k may be zero: the unit tree)
  static TreePtr poly(ContextPtr ctx, MultiIndex k);
  static TreePtr unit(ContextPtr ctx) { return poly(ctx, MultiIndex(ctx->dim())); }
  // single noise edge Xi_t^k
  static TreePtr noise(ContextPtr ctx, LabelId t, MultiIndex k);
  static TreePtr noise(ContextPtr ctx, LabelId t) {
    return noise(ctx, t, MultiIndex(ctx->dim()));
  }
  // generic construction from parts (canonicalizes branch order)
  static TreePtr make(ContextPtr ctx, MultiIndex root_dec, std::vector<Branch> branches);

  const ContextPtr& context() const { return ctx_; }
  const MultiIndex& root_dec() const { return root_dec_; }
  const std::vector<Branch>& branches() const { return branches_; }

  bool is_polynomial() const { return branches_.empty(); }
  bool is_unit() const { return branches_.empty() && root_dec_.is_zero(); }
  // single edge with a noise label and bare leaf below
  bool is_bare_noise() const;

  int noise_count() const { return noise_count_; }
  int edge_count() const { return edge_count_; }

  // canonical key; equal iff decorated-tree isomorphic.  This is exactly the
  // printed notation, so parser and printer round-trip through it.
  const std::string& key() const { return key_; }

  // |tau|_s with shifted assignment |tau|^(k) = |tau|_s + k*n_tau*kappa
  Rational degree(int shift = 0, const Rational& kappa = Rational(0)) const;

  friend bool operator==(const Tree& a, const Tree& b) { return a.key_ == b.key_; }

 private:
  Tree() = default;

  ContextPtr ctx_;
  MultiIndex root_dec_;
  std::vector<Branch> branches_;
  std::string key_;
  Rational base_degree_;
  int noise_count_ = 0;
  int edge_count_ = 0;
};

struct TreeLess {
  bool operator()(const TreePtr& a, const TreePtr& b) const { return a->key() < b->key(); }
};

inline bool tree_equal(const TreePtr& a, const TreePtr& b) { return a->key() == b->key(); }

// Root product.  Throws if the joined root would carry two noise edges.
TreePtr tree_product(const TreePtr& a, const TreePtr& b);

// Planting I_k^l(tau): new root with a single kernel edge of type l and
// decoration k to tau's root.  Returns nullptr (the zero element; callers
// wrap it into an empty linear combination) when tau is purely polynomial.
// Throws if l is a noise label.
TreePtr plant(LabelId l, const MultiIndex& k, const TreePtr& tau);

// Same grafting without the kernel-only restriction; used internally where
// Xi_t = I^t(1) is convenient.
TreePtr graft(LabelId l, const MultiIndex& k, const TreePtr& tau);

// All connected rooted subgraphs with at least one edge, keyed canonically.
// Node decorations travel with their nodes.  Used for the sector chain.
std::vector<TreePtr> enumerate_subtrees(const TreePtr& tau);

// True iff the tree contains a kernel edge whose subtree is purely
// polynomial, i.e. represents the zero symbol under I_k(X^m) = 0.
bool tree_is_zero_symbol(const TreePtr& tau);

// --- human-readable notation -------------------------------------------------
// Grammar:  expr   := factor ('*' factor)*
//           factor := '1' | 'X' | 'X^'k | <noise>` | <noise>'^'k
//                   | 'I[' label ',' k '](' expr ')'
// with k a bare integer for d = 1 and '(a,b,...)' otherwise.
std::string tree_to_string(const TreePtr& tau);
TreePtr parse_tree(const ContextPtr& ctx, const std::string& text);

}  // namespace rst
