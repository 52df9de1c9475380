#include "rst/multiindex.hpp"

#include <stdexcept>

namespace rst {

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  MultiIndex r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
  return r;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  MultiIndex r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    r[i] = a[i] - b[i];
    if (r[i] < 0) throw std::invalid_argument("MultiIndex: negative component in difference");
  }
  return r;
}

bool MultiIndex::dominates(const MultiIndex& b) const {
  if (dim() != b.dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (k_[i] < b[i]) return false;
  return true;
}

Rational MultiIndex::factorial() const {
  std::int64_t f = 1;
  for (int v : k_)
    for (int j = 2; j <= v; ++j) f *= j;
  return Rational(f);
}

Rational MultiIndex::binomial(const MultiIndex& j) const {
  std::int64_t b = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    int n = k_[i], r = j[i];
    if (r < 0 || r > n) return Rational(0);
    std::int64_t c = 1;
    for (int t = 0; t < r; ++t) c = c * (n - t) / (t + 1);
    b *= c;
  }
  return Rational(b);
}

std::string MultiIndex::str() const {
  if (dim() == 1) return std::to_string(k_[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(k_[i]);
  }
  return s + ")";
}

MultiIndex MultiIndex::parse(const std::string& text, std::size_t d) {
  MultiIndex m(d);
  if (text.empty()) throw std::invalid_argument("MultiIndex: empty literal");
  if (text.front() == '(') {
    if (text.back() != ')') throw std::invalid_argument("MultiIndex: unbalanced parens");
    std::size_t pos = 1, axis = 0;
    while (pos < text.size() - 1) {
      std::size_t used = 0;
      int v = std::stoi(text.substr(pos), &used);
      if (axis >= d) throw std::invalid_argument("MultiIndex: too many components");
      m[axis++] = v;
      pos += used;
      if (pos < text.size() - 1) {
        if (text[pos] != ',') throw std::invalid_argument("MultiIndex: expected ','");
        ++pos;
      }
    }
    if (axis != d) throw std::invalid_argument("MultiIndex: wrong component count");
  } else {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("MultiIndex: bad literal");
    if (d != 1) throw std::invalid_argument("MultiIndex: scalar literal needs d = 1");
    m[0] = v;
  }
  for (std::size_t i = 0; i < d; ++i)
    if (m[i] < 0) throw std::invalid_argument("MultiIndex: negative component");
  return m;
}

namespace {
void enumerate_rec(const std::vector<Rational>& s, const Rational& bound, std::size_t axis,
                   MultiIndex& cur, const Rational& acc,
                   const std::function<void(const MultiIndex&)>& fn) {
  if (axis == s.size()) {
    fn(cur);
    return;
  }
  Rational a = acc;
  for (int v = 0;; ++v) {
    cur[axis] = v;
    if (!(a < bound)) break;
    enumerate_rec(s, bound, axis + 1, cur, a, fn);
    a += s[axis];
  }
  cur[axis] = 0;
}
}  // namespace

void for_each_multiindex_below(const std::vector<Rational>& s, const Rational& bound,
                               const std::function<void(const MultiIndex&)>& fn) {
  MultiIndex cur(s.size());
  enumerate_rec(s, bound, 0, cur, Rational(0), fn);
}

}  // namespace rst
