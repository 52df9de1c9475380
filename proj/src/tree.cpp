#include "rst/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace rst {

namespace {

std::string branch_string(const TreeContext& ctx, const Tree::Branch& b) {
  const Label& lab = ctx.labels[b.label];
  if (lab.kind == LabelKind::Noise) {
    // noise child is a bare leaf; print the noise symbol alone
    if (b.edge_dec.is_zero()) return lab.name;
    return lab.name + "^" + b.edge_dec.str();
  }
  return "I[" + lab.name + "," + b.edge_dec.str() + "](" + b.child->key() + ")";
}

std::string compose_key(const TreeContext& ctx, const MultiIndex& root_dec,
                        const std::vector<Tree::Branch>& branches) {
  std::vector<std::string> parts;
  if (!root_dec.is_zero()) {
    if (root_dec.total() == 1 && ctx.dim() == 1)
      parts.push_back("X");
    else
      parts.push_back("X^" + root_dec.str());
  }
  for (const auto& b : branches) parts.push_back(branch_string(ctx, b));
  if (parts.empty()) return "1";
  std::string s = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) s += "*" + parts[i];
  return s;
}

Rational base_degree_of(const TreeContext& ctx, const MultiIndex& root_dec,
                        const std::vector<Tree::Branch>& branches) {
  // Eq-style sum: edges contribute |t(e)|_s - |e(e)|_s, integration nodes
  // contribute |n(u)|_s; the child node of a noise edge is excluded from the
  // node sum (and is structurally decoration-free here).
  Rational deg = ctx.scaling.degree(root_dec);
  for (const auto& b : branches) {
    const Label& lab = ctx.labels[b.label];
    deg += lab.degree - ctx.scaling.degree(b.edge_dec);
    if (lab.kind == LabelKind::Kernel) deg += b.child->degree();
    // noise child: contributes nothing (bare leaf, excluded node)
  }
  return deg;
}

}  // namespace

TreePtr Tree::poly(ContextPtr ctx, MultiIndex k) {
  return make(std::move(ctx), std::move(k), {});
}

TreePtr Tree::noise(ContextPtr ctx, LabelId t, MultiIndex k) {
  if (ctx->labels[t].kind != LabelKind::Noise)
    throw std::invalid_argument("Tree::noise: label '" + ctx->labels[t].name + "' is not a noise");
  std::vector<Branch> b;
  b.push_back(Branch{t, std::move(k), unit(ctx)});
  return make(ctx, MultiIndex(ctx->dim()), std::move(b));
}

TreePtr Tree::make(ContextPtr ctx, MultiIndex root_dec, std::vector<Branch> branches) {
  if (root_dec.dim() != ctx->dim())
    throw std::invalid_argument("Tree: decoration dimension mismatch");
  int noise_at_root = 0;
  for (const auto& b : branches) {
    if (b.edge_dec.dim() != ctx->dim())
      throw std::invalid_argument("Tree: edge decoration dimension mismatch");
    if (ctx->labels[b.label].kind == LabelKind::Noise) {
      ++noise_at_root;
      if (!b.child->is_unit())
        throw std::invalid_argument("Tree: noise edges must end in a bare leaf");
    }
  }
  if (noise_at_root > 1)
    throw std::invalid_argument("Tree: two noise edges share a parent node");

  auto t = std::shared_ptr<Tree>(new Tree());
  t->ctx_ = std::move(ctx);
  t->root_dec_ = std::move(root_dec);
  t->branches_ = std::move(branches);
  std::sort(t->branches_.begin(), t->branches_.end(), [&](const Branch& a, const Branch& b) {
    return branch_string(*t->ctx_, a) < branch_string(*t->ctx_, b);
  });
  t->key_ = compose_key(*t->ctx_, t->root_dec_, t->branches_);
  t->base_degree_ = base_degree_of(*t->ctx_, t->root_dec_, t->branches_);
  t->edge_count_ = 0;
  t->noise_count_ = 0;
  for (const auto& b : t->branches_) {
    t->edge_count_ += 1 + b.child->edge_count();
    t->noise_count_ += b.child->noise_count();
    if (t->ctx_->labels[b.label].kind == LabelKind::Noise) ++t->noise_count_;
  }
  return t;
}

bool Tree::is_bare_noise() const {
  return root_dec_.is_zero() && branches_.size() == 1 &&
         ctx_->labels[branches_[0].label].kind == LabelKind::Noise;
}

Rational Tree::degree(int shift, const Rational& kappa) const {
  if (shift == 0) return base_degree_;
  return base_degree_ + Rational(shift) * Rational(noise_count_) * kappa;
}

TreePtr tree_product(const TreePtr& a, const TreePtr& b) {
  if (a->context() != b->context())
    throw std::invalid_argument("tree_product: mismatched contexts");
  std::vector<Tree::Branch> branches = a->branches();
  branches.insert(branches.end(), b->branches().begin(), b->branches().end());
  return Tree::make(a->context(), a->root_dec() + b->root_dec(), std::move(branches));
}

TreePtr graft(LabelId l, const MultiIndex& k, const TreePtr& tau) {
  std::vector<Tree::Branch> b;
  b.push_back(Tree::Branch{l, k, tau});
  return Tree::make(tau->context(), MultiIndex(tau->context()->dim()), std::move(b));
}

TreePtr plant(LabelId l, const MultiIndex& k, const TreePtr& tau) {
  if (tau->context()->labels[l].kind != LabelKind::Kernel)
    throw std::invalid_argument("plant: label '" + tau->context()->labels[l].name +
                                "' is not a kernel label");
  if (tau->is_polynomial()) return nullptr;  // I_k(X^m) = 0
  return graft(l, k, tau);
}

namespace {

// enumerate all subsets of branch keep-variants of a subtree rooted here
void subtree_variants(const TreePtr& node, std::vector<TreePtr>& out) {
  // variants of the tree rooted at `node` (keeping node and its decoration,
  // choosing any subset of branches, each branch with any variant of its child)
  std::vector<std::vector<TreePtr>> child_variants;
  for (const auto& b : node->branches()) {
    std::vector<TreePtr> cv;
    subtree_variants(b.child, cv);
    child_variants.push_back(std::move(cv));
  }
  std::vector<TreePtr> acc;
  acc.push_back(Tree::poly(node->context(), node->root_dec()));
  for (std::size_t i = 0; i < node->branches().size(); ++i) {
    std::vector<TreePtr> next;
    for (const auto& base : acc) {
      next.push_back(base);  // skip this branch
      for (const auto& cv : child_variants[i]) {
        std::vector<Tree::Branch> bs = base->branches();
        bs.push_back(Tree::Branch{node->branches()[i].label, node->branches()[i].edge_dec, cv});
        next.push_back(Tree::make(node->context(), base->root_dec(), std::move(bs)));
      }
    }
    acc = std::move(next);
  }
  out = std::move(acc);
}

void collect_nodes(const TreePtr& t, std::vector<TreePtr>& nodes) {
  nodes.push_back(t);
  for (const auto& b : t->branches()) collect_nodes(b.child, nodes);
}

}  // namespace

std::vector<TreePtr> enumerate_subtrees(const TreePtr& tau) {
  std::map<std::string, TreePtr> seen;
  std::vector<TreePtr> nodes;
  collect_nodes(tau, nodes);
  for (const auto& n : nodes) {
    std::vector<TreePtr> vars;
    subtree_variants(n, vars);
    for (const auto& v : vars)
      if (v->edge_count() > 0) seen.emplace(v->key(), v);
  }
  std::vector<TreePtr> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

bool tree_is_zero_symbol(const TreePtr& tau) {
  for (const auto& b : tau->branches()) {
    if (tau->context()->labels[b.label].kind == LabelKind::Kernel && b.child->is_polynomial())
      return true;
    if (tree_is_zero_symbol(b.child)) return true;
  }
  return false;
}

std::string tree_to_string(const TreePtr& tau) { return tau->key(); }

namespace {

struct Parser {
  const ContextPtr& ctx;
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("tree parse error at position " + std::to_string(pos) + ": " +
                                msg + " in '" + text + "'");
  }
  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  bool eat(char c) {
    if (peek() == c) { ++pos; return true; }
    return false;
  }
  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  std::string ident() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected identifier");
    return text.substr(start, pos - start);
  }

  MultiIndex multiindex() {
    skip_ws();
    std::size_t start = pos;
    if (peek() == '(') {
      int depth = 0;
      while (pos < text.size()) {
        if (text[pos] == '(') ++depth;
        if (text[pos] == ')') {
          --depth;
          if (depth == 0) { ++pos; break; }
        }
        ++pos;
      }
    } else {
      if (peek() == '-') ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos == start) fail("expected multi-index");
    return MultiIndex::parse(text.substr(start, pos - start), ctx->dim());
  }

  TreePtr factor() {
    skip_ws();
    if (eat('1')) return Tree::unit(ctx);
    std::string name = ident();
    if (name == "X") {
      skip_ws();
      if (eat('^')) return Tree::poly(ctx, multiindex());
      return Tree::poly(ctx, MultiIndex::unit(ctx->dim(), 0));
    }
    if (name == "I" && peek() == '[') {
      ++pos;  // '['
      skip_ws();
      std::string lab = ident();
      skip_ws();
      if (!eat(',')) fail("expected ',' in I[label,k]");
      MultiIndex k = multiindex();
      skip_ws();
      if (!eat(']')) fail("expected ']'");
      skip_ws();
      if (!eat('(')) fail("expected '('");
      TreePtr arg = expr();
      skip_ws();
      if (!eat(')')) fail("expected ')'");
      LabelId id = ctx->labels.find(lab);
      if (ctx->labels[id].kind == LabelKind::Noise) {
        if (!arg->is_unit()) fail("noise label applied to a non-unit tree");
        return Tree::noise(ctx, id, k);
      }
      TreePtr r = plant(id, k, arg);
      if (!r) fail("I[..](polynomial) is the zero element, not a tree");
      return r;
    }
    // bare noise symbol
    if (ctx->labels.contains(name)) {
      LabelId id = ctx->labels.find(name);
      if (ctx->labels[id].kind != LabelKind::Noise) fail("kernel label needs I[..](..) form");
      MultiIndex k(ctx->dim());
      skip_ws();
      if (eat('^')) k = multiindex();
      return Tree::noise(ctx, id, k);
    }
    fail("unknown symbol '" + name + "'");
  }

  TreePtr expr() {
    TreePtr t = factor();
    skip_ws();
    while (eat('*')) {
      TreePtr u = factor();
      t = tree_product(t, u);
      skip_ws();
    }
    return t;
  }
};

}  // namespace

TreePtr parse_tree(const ContextPtr& ctx, const std::string& text) {
  Parser p{ctx, text};
  TreePtr t = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

}  // namespace rst
