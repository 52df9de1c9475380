#include "rst/extraction.hpp"

#include <algorithm>
#include <functional>

namespace rst {

namespace {

// Flattened view used for placement enumeration.
struct FlatNode {
  int parent = -1;           // node index, -1 for root
  LabelId in_label = -1;     // incoming edge label (valid when parent >= 0)
  MultiIndex in_dec;         // incoming edge decoration
  MultiIndex node_dec;       // n-decoration at this node
  std::vector<int> children; // node indices
  bool noise_leaf = false;   // this node hangs below a noise edge
};

struct FlatTree {
  ContextPtr ctx;
  std::vector<FlatNode> nodes;

  int add(const TreePtr& t, int parent, LabelId lab, const MultiIndex& dec, bool noise_leaf) {
    int idx = int(nodes.size());
    FlatNode n;
    n.parent = parent;
    n.in_label = lab;
    n.in_dec = dec;
    n.node_dec = t->root_dec();
    n.noise_leaf = noise_leaf;
    nodes.push_back(std::move(n));
    for (const auto& b : t->branches()) {
      bool child_is_noise_leaf = ctx->labels[b.label].kind == LabelKind::Noise;
      int c = add(b.child, idx, b.label, b.edge_dec, child_is_noise_leaf);
      nodes[idx].children.push_back(c);
    }
    return idx;
  }
};

// A placement: one extracted subtree rooted at `root`, covering `covered`
// nodes (including root); edges of the placement are exactly the incoming
// edges of covered nodes other than the root.
struct Placement {
  int root;
  std::vector<int> covered;  // sorted
  TreePtr standalone;
};

// Build the standalone tree of a placement recursively.  Node decorations do
// not travel with the extracted subtree: they remain on the contracted node,
// which keeps the renormalisation maps upper-triangular and commuting with
// multiplication by polynomials.
TreePtr placement_tree(const FlatTree& ft, int node, const std::set<int>& covered) {
  std::vector<Tree::Branch> branches;
  for (int c : ft.nodes[node].children) {
    if (!covered.count(c)) continue;
    branches.push_back(Tree::Branch{ft.nodes[c].in_label, ft.nodes[c].in_dec,
                                    placement_tree(ft, c, covered)});
  }
  return Tree::make(ft.ctx, MultiIndex(ft.ctx->dim()), std::move(branches));
}

// Enumerate all connected rooted-at-`root` node sets that contain, for each
// covered node, all of its noise children.
void enumerate_placements_at(const FlatTree& ft, int root, std::vector<std::set<int>>& out) {
  // expansion state: sets of covered nodes; grow over kernel children choices
  std::vector<std::set<int>> acc;
  acc.push_back({root});
  // process nodes breadth-first as they get covered; simpler: recursive over
  // children of each covered node
  std::function<std::vector<std::set<int>>(int)> variants_below =
      [&](int u) -> std::vector<std::set<int>> {
    // all covered-sets of the subtree hanging at u, u included
    std::vector<std::set<int>> res;
    res.push_back({u});
    for (int c : ft.nodes[u].children) {
      const bool is_noise = ft.nodes[c].noise_leaf;
      std::vector<std::set<int>> next;
      if (is_noise) {
        // forced: include the noise child in every variant
        for (auto& base : res) {
          std::set<int> s = base;
          s.insert(c);
          next.push_back(std::move(s));
        }
      } else {
        std::vector<std::set<int>> below = variants_below(c);
        for (auto& base : res) {
          next.push_back(base);  // skip this kernel edge
          for (const auto& bl : below) {
            std::set<int> s = base;
            s.insert(bl.begin(), bl.end());
            next.push_back(std::move(s));
          }
        }
      }
      res = std::move(next);
    }
    return res;
  };
  out = variants_below(root);
}

}  // namespace

std::vector<ExtractionTerm> extraction_coproduct(const TreePtr& tau,
                                                 const std::set<std::string>& negatives) {
  FlatTree ft;
  ft.ctx = tau->context();
  ft.add(tau, -1, -1, MultiIndex(tau->context()->dim()), false);

  // candidate placements: admissible negative subtrees at every root node
  std::vector<Placement> candidates;
  for (int r = 0; r < int(ft.nodes.size()); ++r) {
    if (ft.nodes[r].noise_leaf) continue;  // a noise leaf cannot root a subtree
    std::vector<std::set<int>> sets;
    enumerate_placements_at(ft, r, sets);
    for (const auto& s : sets) {
      if (s.size() < 2) continue;  // at least one edge
      TreePtr standalone = placement_tree(ft, r, s);
      if (!negatives.count(standalone->key())) continue;
      Placement p;
      p.root = r;
      p.covered.assign(s.begin(), s.end());
      p.standalone = standalone;
      candidates.push_back(std::move(p));
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Placement& a, const Placement& b) {
    if (a.root != b.root) return a.root < b.root;
    if (a.covered != b.covered) return a.covered < b.covered;
    return a.standalone->key() < b.standalone->key();
  });

  // enumerate disjoint collections (including the empty one)
  std::vector<std::vector<int>> collections;
  std::vector<int> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    collections.push_back(cur);
    for (std::size_t i = start; i < candidates.size(); ++i) {
      bool disjoint = true;
      for (int idx : cur) {
        const auto& a = candidates[std::size_t(idx)].covered;
        const auto& b = candidates[i].covered;
        std::vector<int> inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
        if (!inter.empty()) { disjoint = false; break; }
      }
      if (!disjoint) continue;
      cur.push_back(int(i));
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);

  // contract each collection
  std::vector<ExtractionTerm> out;
  for (const auto& coll : collections) {
    std::vector<int> owner(ft.nodes.size(), -1);
    for (int ci : coll)
      for (int n : candidates[std::size_t(ci)].covered) owner[std::size_t(n)] = ci;

    // survivor of node u: placement root if owned, else u itself
    auto survivor = [&](int u) { return owner[std::size_t(u)] < 0 ? u
                                   : candidates[std::size_t(owner[std::size_t(u)])].root; };

    // recursive contracted build from survivor classes
    std::function<TreePtr(int)> build = [&](int srv) -> TreePtr {
      // collect class nodes (srv plus, when srv roots a placement, its covered set)
      std::vector<int> cls;
      if (owner[std::size_t(srv)] >= 0 &&
          candidates[std::size_t(owner[std::size_t(srv)])].root == srv)
        cls = candidates[std::size_t(owner[std::size_t(srv)])].covered;
      else
        cls = {srv};

      MultiIndex dec(ft.ctx->dim());
      std::vector<Tree::Branch> branches;
      for (int u : cls) {
        dec = dec + ft.nodes[u].node_dec;
        for (int c : ft.nodes[u].children) {
          if (owner[std::size_t(c)] >= 0 && survivor(c) != c) continue;  // edge inside a placement
          if (std::find(cls.begin(), cls.end(), c) != cls.end()) continue;
          branches.push_back(Tree::Branch{ft.nodes[c].in_label, ft.nodes[c].in_dec, build(c)});
        }
      }
      return Tree::make(ft.ctx, dec, std::move(branches));
    };

    ExtractionTerm term;
    for (int ci : coll) term.extracted.components.push_back(candidates[std::size_t(ci)].standalone);
    std::sort(term.extracted.components.begin(), term.extracted.components.end(),
              [](const TreePtr& a, const TreePtr& b) { return a->key() < b->key(); });
    term.contracted = build(survivor(0));
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace rst
