#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rst/rational.hpp"

namespace rst {

// Multi-index in N^d.  Printed as a bare integer for d = 1 and as
// "(a,b,...)" otherwise; this is the form the tree parser accepts.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t d) : k_(d, 0) {}
  explicit MultiIndex(std::vector<int> k) : k_(std::move(k)) {}

  static MultiIndex unit(std::size_t d, std::size_t axis) {
    MultiIndex m(d);
    m.k_[axis] = 1;
    return m;
  }

  std::size_t dim() const { return k_.size(); }
  int operator[](std::size_t i) const { return k_[i]; }
  int& operator[](std::size_t i) { return k_[i]; }

  bool is_zero() const {
    for (int v : k_) if (v != 0) return false;
    return true;
  }
  int total() const {  // |k|_1
    int s = 0;
    for (int v : k_) s += v;
    return s;
  }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);  // requires a >= b
  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.k_ == b.k_; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.k_ < b.k_; }

  bool dominates(const MultiIndex& b) const;  // componentwise >=

  // k! as exact rational (fits easily at desk scale)
  Rational factorial() const;
  // binomial(k, j) componentwise product, j <= k
  Rational binomial(const MultiIndex& j) const;

  std::string str() const;
  static MultiIndex parse(const std::string& text, std::size_t d);

  const std::vector<int>& data() const { return k_; }

 private:
  std::vector<int> k_;
};

// Enumerate all multi-indices m in N^d with scaled degree sum_i m_i*s_i < bound.
// Callback order is deterministic (lexicographic).
void for_each_multiindex_below(const std::vector<Rational>& s, const Rational& bound,
                               const std::function<void(const MultiIndex&)>& fn);

}  // namespace rst
