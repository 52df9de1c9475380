#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "rst/lincomb.hpp"
#include "rst/rational.hpp"
#include "rst/tree.hpp"

namespace rst {

// Generator J_k^t(tau) of the positive-degree algebra.  Only kept when
// |J_k tau|_s = |tau|_s + |t|_s - |k|_s > 0 and tau is not purely polynomial;
// construction helpers project everything else to zero.
struct JFactor {
  LabelId label;
  MultiIndex k;
  TreePtr tree;

  Rational degree() const {
    return tree->degree() + tree->context()->labels[label].degree -
           tree->context()->scaling.degree(k);
  }
  std::string key_string() const {
    return "J[" + tree->context()->labels[label].name + "," + k.str() + "](" + tree->key() + ")";
  }
};

// Monomial X^k * prod_i J_{k_i}^{t_i}(tau_i), factors sorted canonically.
class TPlusMonomial {
 public:
  TPlusMonomial() = default;
  TPlusMonomial(MultiIndex xpow, std::vector<JFactor> factors)
      : xpow_(std::move(xpow)), factors_(std::move(factors)) {
    std::sort(factors_.begin(), factors_.end(),
              [](const JFactor& a, const JFactor& b) { return a.key_string() < b.key_string(); });
    rebuild_key();
  }
  static TPlusMonomial one(std::size_t d) { return TPlusMonomial(MultiIndex(d), {}); }
  static TPlusMonomial xpow(MultiIndex k) { return TPlusMonomial(std::move(k), {}); }

  const MultiIndex& x() const { return xpow_; }
  const std::vector<JFactor>& factors() const { return factors_; }
  bool is_one() const { return xpow_.is_zero() && factors_.empty(); }

  Rational degree(const ScalingSpec& s) const {
    Rational d = s.degree(xpow_);
    for (const auto& f : factors_) d += f.degree();
    return d;
  }

  friend TPlusMonomial operator*(const TPlusMonomial& a, const TPlusMonomial& b) {
    std::vector<JFactor> fs = a.factors_;
    fs.insert(fs.end(), b.factors_.begin(), b.factors_.end());
    return TPlusMonomial(a.xpow_ + b.xpow_, std::move(fs));
  }

  const std::string& key_string() const { return key_; }

 private:
  void rebuild_key() {
    key_.clear();
    if (!xpow_.is_zero()) key_ = "X^" + xpow_.str();
    for (const auto& f : factors_) {
      if (!key_.empty()) key_ += "*";
      key_ += f.key_string();
    }
    if (key_.empty()) key_ = "1";
  }

  MultiIndex xpow_;
  std::vector<JFactor> factors_;
  std::string key_;
};

template <class S>
using TPlusPoly = LinComb<TPlusMonomial, S>;

template <class S>
TPlusPoly<S> tplus_mul(const TPlusPoly<S>& a, const TPlusPoly<S>& b) {
  TPlusPoly<S> out;
  a.for_each([&](const TPlusMonomial& ma, const S& ca) {
    b.for_each([&](const TPlusMonomial& mb, const S& cb) { out.add(ma * mb, ca * cb); });
  });
  return out;
}

// J-bar: the projection J_k^t(tau) -> T_+.  Zero when the degree is not
// positive, and for kernel labels also when tau is purely polynomial
// (mirroring I_k(X^m) = 0).  Noise labels act on the unit tree only, where
// J_k^t(1) is the shadow of the positive-degree noise symbol.
template <class S>
TPlusPoly<S> jbar(LabelId label, const MultiIndex& k, const TreePtr& tau) {
  TPlusPoly<S> out;
  const bool kernel = tau->context()->labels[label].kind == LabelKind::Kernel;
  if (kernel && tau->is_polynomial()) return out;
  if (!kernel && !tau->is_unit()) return out;
  JFactor f{label, k, tau};
  if (!f.degree().is_positive()) return out;
  out.add(TPlusMonomial(MultiIndex(tau->context()->dim()), {f}), S(1));
  return out;
}

// Key wrapper so trees can be used in LinComb.
struct TreeKey {
  TreePtr tree;
  const std::string& key_string() const { return tree->key(); }
};

template <class S>
using TreePoly = LinComb<TreeKey, S>;

template <class S>
TreePoly<S> tree_single(const TreePtr& t, const S& c = S(1)) {
  return TreePoly<S>::single(TreeKey{t}, c);
}

// T (x) T_+ tensor key
struct TensorKey {
  TreePtr left;
  TPlusMonomial right;
  std::string key_string() const { return left->key() + " (x) " + right.key_string(); }
};

template <class S>
using TensorPoly = LinComb<TensorKey, S>;

}  // namespace rst
