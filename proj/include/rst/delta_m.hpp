#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "rst/hopf.hpp"

namespace rst {

// A linear map on the model space, given tree-by-tree.
template <class S>
using LinearTreeMap = std::function<TreePoly<S>(const TreePtr&)>;

// Delta^M = D^{-1} (M (x) M-hat) Delta with D = 1 - Dbar nilpotent, and
// M-hat J_k = multiply (J_k (x) 1) Delta^M, built jointly by recursion on the
// number of edges.  Membership of M in the renormalisation group (fixes X^k,
// commutes with planting, upper-triangular Delta^M) is checked on demand.
template <class S>
class DeltaM {
 public:
  DeltaM(std::shared_ptr<const HopfAlgebra<S>> H, LinearTreeMap<S> M)
      : H_(std::move(H)), M_(std::move(M)) {}

  const TensorPoly<S>& delta_m(const TreePtr& tau) const {
    auto it = memo_.find(tau->key());
    if (it != memo_.end()) return it->second;
    TensorPoly<S> y;
    H_->delta(tau).for_each([&](const TensorKey& key, const S& c) {
      TreePoly<S> mleft = M_(key.left);
      TPlusPoly<S> mright = mhat(key.right);
      mleft.for_each([&](const TreeKey& tk, const S& cl) {
        mright.for_each([&](const TPlusMonomial& mono, const S& cr) {
          y.add(TensorKey{tk.tree, mono}, c * cl * cr);
        });
      });
    });
    // Neumann series for D^{-1}
    TensorPoly<S> out = y;
    TensorPoly<S> layer = dbar(y);
    while (!layer.is_zero()) {
      out.add(layer);
      layer = dbar(layer);
    }
    return memo_.emplace(tau->key(), std::move(out)).first->second;
  }

  TPlusPoly<S> mhat(const TPlusMonomial& mono) const {
    TPlusPoly<S> acc = TPlusPoly<S>::single(TPlusMonomial::xpow(mono.x()), S(1));
    for (const auto& f : mono.factors()) acc = tplus_mul(acc, mhat_gen(f));
    return acc;
  }

  // Verifies the membership conditions on the given basis; returns an empty
  // string on success and a description of the violated condition otherwise.
  std::string membership_violation(const std::vector<TreePtr>& basis) const {
    const auto& ctx = H_->context();
    for (const auto& tau : basis) {
      if (tau->is_polynomial()) {
        TreePoly<S> m = M_(tau);
        if (!(m == tree_single<S>(tau)))
          return "M X^k != X^k on " + tau->key();
        continue;
      }
      // commutation with planting
      for (LabelId l : ctx->labels.kernel_labels()) {
        TreePtr planted = plant(l, MultiIndex(ctx->dim()), tau);
        if (!planted) continue;
        TreePoly<S> lhs = M_(planted);
        TreePoly<S> rhs;
        M_(tau).for_each([&](const TreeKey& k, const S& c) {
          TreePtr p = plant(l, MultiIndex(ctx->dim()), k.tree);
          if (p) rhs.add(TreeKey{p}, c);
        });
        if (!(lhs == rhs))
          return "M does not commute with I[" + ctx->labels[l].name + ",0] on " + tau->key();
      }
      // upper triangularity of Delta^M
      const TensorPoly<S>& dm = delta_m(tau);
      S unit_coeff(0);
      bool bad = false;
      std::string bad_key;
      dm.for_each([&](const TensorKey& key, const S& c) {
        if (key.left->key() == tau->key() && key.right.is_one()) {
          unit_coeff = unit_coeff + c;
          return;
        }
        if (!(key.left->degree() > tau->degree())) {
          bad = true;
          bad_key = key.left->key();
        }
      });
      if (bad)
        return "Delta^M not upper-triangular on " + tau->key() + " (term " + bad_key + ")";
      if (!(unit_coeff == S(1)))
        return "Delta^M has non-unit primitive coefficient on " + tau->key();
    }
    return {};
  }

 private:
  TPlusPoly<S> mhat_gen(const JFactor& f) const {
    auto it = mhat_memo_.find(f.key_string());
    if (it != mhat_memo_.end()) return it->second;
    TPlusPoly<S> out;
    delta_m(f.tree).for_each([&](const TensorKey& key, const S& c) {
      TPlusPoly<S> jb = jbar<S>(f.label, f.k, key.left);
      if (jb.is_zero()) return;
      out.add(tplus_mul(jb, TPlusPoly<S>::single(key.right, S(1))), c);
    });
    mhat_memo_.emplace(f.key_string(), out);
    return out;
  }

  // Dbar(t (x) u) = - sum over the non-primitive part of Delta t of t' (x) t'' u
  TensorPoly<S> dbar(const TensorPoly<S>& v) const {
    TensorPoly<S> out;
    v.for_each([&](const TensorKey& key, const S& c) {
      H_->delta(key.left).for_each([&](const TensorKey& d, const S& cd) {
        if (d.left->key() == key.left->key() && d.right.is_one()) return;  // primitive part
        out.add(TensorKey{d.left, d.right * key.right}, S(0) - c * cd);
      });
    });
    return out;
  }

  std::shared_ptr<const HopfAlgebra<S>> H_;
  LinearTreeMap<S> M_;
  mutable std::map<std::string, TensorPoly<S>> memo_;
  mutable std::map<std::string, TPlusPoly<S>> mhat_memo_;
};

}  // namespace rst
