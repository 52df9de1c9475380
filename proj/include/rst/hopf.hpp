#pragma once

#include <functional>
#include <map>
#include <memory>

#include "rst/tplus.hpp"

namespace rst {

template <class S>
S scalar_from_rational(const Rational& r) {
  if constexpr (std::is_same_v<S, Rational>)
    return r;
  else
    return S(r.to_double());
}

// T_+ (x) T_+ tensor key, for the coproduct on T_+.
struct TPlusTensorKey {
  TPlusMonomial left;
  TPlusMonomial right;
  std::string key_string() const { return left.key_string() + " (x) " + right.key_string(); }
};
template <class S>
using TPlusTensor = LinComb<TPlusTensorKey, S>;

// The coproducts of the reduced structure.  Delta: T -> T (x) T_+ follows the
// recursion with the polynomial-twisted jets J-tilde; DeltaPlus: T_+ -> T_+ (x) T_+
// is the unique algebra coproduct compatible with Delta via
// (Delta (x) 1) Delta = (1 (x) DeltaPlus) Delta, which the symbolic test suite
// verifies exactly.
template <class S>
class HopfAlgebra {
 public:
  explicit HopfAlgebra(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  const ContextPtr& context() const { return ctx_; }

  // J-tilde_k^t tau = sum_{|m|_s < |J_k tau|_s} ((-X)^m / m!) J_{k+m} tau
  TPlusPoly<S> jtilde(LabelId label, const MultiIndex& k, const TreePtr& tau) const {
    TPlusPoly<S> out;
    JFactor probe{label, k, tau};
    Rational bound = probe.degree();
    if (!bound.is_positive()) return out;
    for_each_multiindex_below(ctx_->scaling.s, bound, [&](const MultiIndex& m) {
      TPlusPoly<S> jb = jbar<S>(label, k + m, tau);
      if (jb.is_zero()) return;
      Rational c = Rational((m.total() % 2 == 0) ? 1 : -1) / m.factorial();
      out.add(tplus_mul(TPlusPoly<S>::single(TPlusMonomial::xpow(m), S(1)), jb),
              scalar_from_rational<S>(c));
    });
    return out;
  }

  const TensorPoly<S>& delta(const TreePtr& tau) const {
    auto it = delta_memo_.find(tau->key());
    if (it != delta_memo_.end()) return it->second;
    TensorPoly<S> out = compute_delta(tau);
    return delta_memo_.emplace(tau->key(), std::move(out)).first->second;
  }

  // linear + multiplicative extension helpers
  TensorPoly<S> tensor_mul(const TensorPoly<S>& a, const TensorPoly<S>& b) const {
    TensorPoly<S> out;
    a.for_each([&](const TensorKey& ka, const S& ca) {
      b.for_each([&](const TensorKey& kb, const S& cb) {
        out.add(TensorKey{tree_product(ka.left, kb.left), ka.right * kb.right}, ca * cb);
      });
    });
    return out;
  }

  const TPlusTensor<S>& delta_plus_gen(const JFactor& f) const {
    auto it = dplus_memo_.find(f.key_string());
    if (it != dplus_memo_.end()) return it->second;
    TPlusTensor<S> out = compute_delta_plus_gen(f);
    return dplus_memo_.emplace(f.key_string(), std::move(out)).first->second;
  }

  TPlusTensor<S> delta_plus(const TPlusMonomial& mono) const {
    const std::size_t d = ctx_->dim();
    // binomial expansion on the X part
    TPlusTensor<S> acc;
    {
      const MultiIndex& k = mono.x();
      std::vector<MultiIndex> parts = split_below(k);
      for (const auto& j : parts)
        acc.add(TPlusTensorKey{TPlusMonomial::xpow(j), TPlusMonomial::xpow(k - j)},
                scalar_from_rational<S>(k.binomial(j)));
    }
    for (const auto& f : mono.factors()) acc = tplus_tensor_mul(acc, delta_plus_gen(f));
    (void)d;
    return acc;
  }

  TPlusTensor<S> tplus_tensor_mul(const TPlusTensor<S>& a, const TPlusTensor<S>& b) const {
    TPlusTensor<S> out;
    a.for_each([&](const TPlusTensorKey& ka, const S& ca) {
      b.for_each([&](const TPlusTensorKey& kb, const S& cb) {
        out.add(TPlusTensorKey{ka.left * kb.left, ka.right * kb.right}, ca * cb);
      });
    });
    return out;
  }

 private:
  std::vector<MultiIndex> split_below(const MultiIndex& k) const {
    // all j with j <= k componentwise
    std::vector<MultiIndex> out;
    MultiIndex j(k.dim());
    std::function<void(std::size_t)> rec = [&](std::size_t axis) {
      if (axis == k.dim()) {
        out.push_back(j);
        return;
      }
      for (int v = 0; v <= k[axis]; ++v) {
        j[axis] = v;
        rec(axis + 1);
      }
      j[axis] = 0;
    };
    rec(0);
    return out;
  }

  TensorPoly<S> compute_delta(const TreePtr& tau) const {
    const std::size_t d = ctx_->dim();
    // Delta X^k = sum binom(k,j) X^j (x) X^{k-j}
    TensorPoly<S> acc;
    {
      const MultiIndex& k = tau->root_dec();
      for (const auto& j : split_below(k))
        acc.add(TensorKey{Tree::poly(ctx_, j), TPlusMonomial::xpow(k - j)},
                scalar_from_rational<S>(k.binomial(j)));
    }
    for (const auto& b : tau->branches()) {
      TensorPoly<S> db = delta_branch(b);
      acc = tensor_mul(acc, db);
    }
    (void)d;
    return acc;
  }

  // Delta I_k^t(child) = (I_k^t (x) 1) Delta child
  //                      + sum_{l,m} X^l/l! (x) X^m/m! Jtilde_{k+l+m} child
  TensorPoly<S> delta_branch(const Tree::Branch& b) const {
    TensorPoly<S> out;
    const LabelKind kind = ctx_->labels[b.label].kind;
    const TensorPoly<S>& dc = delta(b.child);
    dc.for_each([&](const TensorKey& key, const S& c) {
      TreePtr planted;
      if (kind == LabelKind::Kernel) {
        planted = plant(b.label, b.edge_dec, key.left);  // zero on polynomials
      } else {
        planted = key.left->is_unit() ? graft(b.label, b.edge_dec, key.left) : nullptr;
      }
      if (planted) out.add(TensorKey{planted, key.right}, c);
    });
    JFactor probe{b.label, b.edge_dec, b.child};
    Rational bound = probe.degree();
    if (bound.is_positive()) {
      for_each_multiindex_below(ctx_->scaling.s, bound, [&](const MultiIndex& lm) {
        // split l+m = lm over both polynomial slots
        TPlusPoly<S> jt = jtilde(b.label, lm + b.edge_dec, b.child);
        if (jt.is_zero()) return;
        for (const auto& l : split_below(lm)) {
          MultiIndex m = lm - l;
          Rational coef = Rational(1) / (l.factorial() * m.factorial());
          jt.for_each([&](const TPlusMonomial& mono, const S& jc) {
            out.add(TensorKey{Tree::poly(ctx_, l), TPlusMonomial::xpow(m) * mono},
                    jc * scalar_from_rational<S>(coef));
          });
        }
      });
    }
    return out;
  }

  // DeltaPlus on a generator J_k tau, derived from compatibility with Delta:
  //   DeltaPlus J_k tau = sum_{Delta tau = tau' (x) u} sum_b (X^b/b! Jtilde_{k+b} tau') (x) u
  //                     + sum_{c,m} X^c/c! (x) X^m/m! Jtilde_{k+c+m} tau
  TPlusTensor<S> compute_delta_plus_gen(const JFactor& f) const {
    TPlusTensor<S> out;
    const TensorPoly<S>& dt = delta(f.tree);
    dt.for_each([&](const TensorKey& key, const S& c) {
      JFactor probe{f.label, f.k, key.left};
      Rational bound = probe.degree();
      if (!bound.is_positive()) return;
      bool is_kernel = ctx_->labels[f.label].kind == LabelKind::Kernel;
      if (is_kernel && key.left->is_polynomial()) return;
      for_each_multiindex_below(ctx_->scaling.s, bound, [&](const MultiIndex& b) {
        TPlusPoly<S> jt = jtilde(f.label, f.k + b, key.left);
        Rational coef = Rational(1) / b.factorial();
        jt.for_each([&](const TPlusMonomial& mono, const S& jc) {
          out.add(TPlusTensorKey{TPlusMonomial::xpow(b) * mono, key.right},
                  c * jc * scalar_from_rational<S>(coef));
        });
      });
    });
    JFactor self{f.label, f.k, f.tree};
    Rational bound = self.degree();
    if (bound.is_positive()) {
      for_each_multiindex_below(ctx_->scaling.s, bound, [&](const MultiIndex& cm) {
        for (const auto& c : split_below(cm)) {
          MultiIndex m = cm - c;
          TPlusPoly<S> jt = jtilde(f.label, f.k + cm, f.tree);
          Rational coef = Rational(1) / (c.factorial() * m.factorial());
          jt.for_each([&](const TPlusMonomial& mono, const S& jc) {
            out.add(TPlusTensorKey{TPlusMonomial::xpow(c), TPlusMonomial::xpow(m) * mono},
                    jc * scalar_from_rational<S>(coef));
          });
        }
      });
    }
    return out;
  }

  ContextPtr ctx_;
  mutable std::map<std::string, TensorPoly<S>> delta_memo_;
  mutable std::map<std::string, TPlusTensor<S>> dplus_memo_;
};

// ---------------------------------------------------------------------------
// Characters of T_+

template <class S>
class Character {
 public:
  using XFn = std::function<S(std::size_t)>;
  using JFn = std::function<S(const JFactor&)>;

  Character() = default;
  Character(XFn xfn, JFn jfn)
      : xfn_(std::move(xfn)), jfn_(std::move(jfn)), memo_(std::make_shared<std::map<std::string, S>>()) {}

  S x(std::size_t axis) const { return xfn_(axis); }
  S j(const JFactor& f) const {
    auto it = memo_->find(f.key_string());
    if (it != memo_->end()) return it->second;
    S v = jfn_(f);
    memo_->emplace(f.key_string(), v);
    return v;
  }

  S eval(const TPlusMonomial& mono) const {
    S v(1);
    for (std::size_t i = 0; i < mono.x().dim(); ++i)
      for (int p = 0; p < mono.x()[i]; ++p) v = v * x(i);
    for (const auto& f : mono.factors()) v = v * j(f);
    return v;
  }
  S eval(const TPlusPoly<S>& poly) const {
    S v(0);
    poly.for_each([&](const TPlusMonomial& m, const S& c) { v = v + c * eval(m); });
    return v;
  }

 private:
  XFn xfn_;
  JFn jfn_;
  std::shared_ptr<std::map<std::string, S>> memo_;
};

template <class S>
Character<S> identity_character() {
  return Character<S>([](std::size_t) { return S(0); }, [](const JFactor&) { return S(0); });
}

// Gamma_f tau = (1 (x) f) Delta tau
template <class S>
TreePoly<S> gamma_of_character(const HopfAlgebra<S>& H, const Character<S>& f, const TreePtr& tau) {
  TreePoly<S> out;
  H.delta(tau).for_each(
      [&](const TensorKey& key, const S& c) { out.add(TreeKey{key.left}, c * f.eval(key.right)); });
  return out;
}

template <class S>
TreePoly<S> gamma_of_character(const HopfAlgebra<S>& H, const Character<S>& f,
                               const TreePoly<S>& v) {
  TreePoly<S> out;
  v.for_each([&](const TreeKey& k, const S& c) {
    out.add(gamma_of_character(H, f, k.tree) * c);
  });
  return out;
}

// Composition: Gamma_{compose(f,g)} = Gamma_f . Gamma_g
template <class S>
Character<S> compose_characters(std::shared_ptr<const HopfAlgebra<S>> H, Character<S> f,
                                Character<S> g) {
  auto xfn = [f, g](std::size_t axis) { return f.x(axis) + g.x(axis); };
  auto jfn = [H, f, g](const JFactor& gen) {
    S v(0);
    H->delta_plus_gen(gen).for_each([&](const TPlusTensorKey& key, const S& c) {
      v = v + c * g.eval(key.left) * f.eval(key.right);
    });
    return v;
  };
  return Character<S>(xfn, jfn);
}

// Triangular inversion: compose(f, invert(f)) = compose(invert(f), f) = id
template <class S>
Character<S> invert_character(std::shared_ptr<const HopfAlgebra<S>> H, Character<S> f) {
  struct State {
    std::shared_ptr<const HopfAlgebra<S>> H;
    Character<S> f;
    Character<S> inv;  // set after construction
  };
  auto st = std::make_shared<State>();
  st->H = std::move(H);
  st->f = std::move(f);
  auto xfn = [st](std::size_t axis) { return S(0) - st->f.x(axis); };
  auto jfn = [st](const JFactor& gen) {
    // 0 = sum inv(left) f(right); primitive parts are gen (x) 1 and 1 (x) gen
    S acc(0);
    st->H->delta_plus_gen(gen).for_each([&](const TPlusTensorKey& key, const S& c) {
      bool left_gen = key.left.factors().size() == 1 && key.left.x().is_zero() &&
                      key.left.factors()[0].key_string() == gen.key_string() &&
                      key.right.is_one();
      if (left_gen) return;  // the inv(gen)*1 term being solved for
      acc = acc + c * st->inv.eval(key.left) * st->f.eval(key.right);
    });
    return S(0) - acc;
  };
  st->inv = Character<S>(xfn, jfn);
  return st->inv;
}

}  // namespace rst
