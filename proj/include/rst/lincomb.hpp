#pragma once

#include <map>
#include <string>
#include <utility>

namespace rst {

// Formal linear combination over keys with deterministic (ordered) iteration.
// The zero element is the empty combination.  Key must provide key_string().
template <class Key, class S>
class LinComb {
 public:
  using Map = std::map<std::string, std::pair<Key, S>>;

  LinComb() = default;
  static LinComb single(const Key& k, const S& c) {
    LinComb out;
    out.add(k, c);
    return out;
  }

  void add(const Key& k, const S& c) {
    if (c == S(0)) return;
    auto it = terms_.find(k.key_string());
    if (it == terms_.end()) {
      terms_.emplace(k.key_string(), std::make_pair(k, c));
    } else {
      it->second.second = it->second.second + c;
      if (it->second.second == S(0)) terms_.erase(it);
    }
  }
  void add(const LinComb& other, const S& scale = S(1)) {
    for (const auto& [ks, term] : other.terms_) add(term.first, term.second * scale);
  }

  LinComb operator*(const S& c) const {
    LinComb out;
    if (c == S(0)) return out;
    for (const auto& [ks, term] : terms_) out.add(term.first, term.second * c);
    return out;
  }
  LinComb operator+(const LinComb& o) const {
    LinComb out = *this;
    out.add(o);
    return out;
  }
  LinComb operator-(const LinComb& o) const {
    LinComb out = *this;
    out.add(o, S(-1));
    return out;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  S coeff(const Key& k) const {
    auto it = terms_.find(k.key_string());
    return it == terms_.end() ? S(0) : it->second.second;
  }

  friend bool operator==(const LinComb& a, const LinComb& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return false;
      if (!(ia->second.second == ib->second.second)) return false;
    }
    return true;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [ks, term] : terms_) fn(term.first, term.second);
  }

  // generic bilinear extension
  template <class K2, class Fn>
  LinComb<K2, S> map_terms(Fn&& fn) const {  // fn: (Key, S) -> LinComb<K2,S>
    LinComb<K2, S> out;
    for (const auto& [ks, term] : terms_) out.add(fn(term.first, term.second));
    return out;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [ks, term] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += coeff_str(term.second) + "*" + ks;
    }
    return s;
  }

 private:
  template <class T>
  static std::string coeff_str(const T& c) {
    if constexpr (requires(const T& x) { x.str(); })
      return c.str();
    else
      return std::to_string(c);
  }

  Map terms_;
};

}  // namespace rst
