#include "rst/rational.hpp"

#include <cstdlib>
#include <ostream>

namespace rst {

void Rational::normalize() {
  if (den_ == 0) throw std::domain_error("Rational: zero denominator");
  if (den_ < 0) { num_ = -num_; den_ = -den_; }
  std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) { num_ /= g; den_ /= g; }
}

Rational Rational::make_checked(i128 n, i128 d) {
  if (d == 0) throw std::domain_error("Rational: zero denominator");
  if (d < 0) { n = -n; d = -d; }
  i128 a = n < 0 ? -n : n;
  i128 g = 1;
  {
    i128 x = a, y = d;
    while (y != 0) { i128 t = x % y; x = y; y = t; }
    g = x == 0 ? 1 : x;
  }
  n /= g;
  d /= g;
  constexpr i128 lim = i128(INT64_MAX);
  if (n > lim || n < -lim || d > lim)
    throw std::overflow_error("Rational: 64-bit overflow");
  Rational r;
  r.num_ = std::int64_t(n);
  r.den_ = std::int64_t(d);
  return r;
}

Rational Rational::from_decimal_string(const std::string& text) {
  std::string s = text;
  // trim
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  if (s.empty()) throw std::invalid_argument("Rational: empty numeric literal");

  // explicit fraction  p/q
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::size_t p1 = 0, p2 = 0;
    std::int64_t n = std::stoll(s.substr(0, slash), &p1);
    std::int64_t d = std::stoll(s.substr(slash + 1), &p2);
    if (p1 != slash || p2 != s.size() - slash - 1)
      throw std::invalid_argument("Rational: bad fraction literal '" + text + "'");
    return Rational(n, d);
  }

  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
  std::int64_t ip = 0, fp = 0, den = 1;
  bool any = false;
  for (; i < s.size() && s[i] != '.'; ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("Rational: bad numeric literal '" + text + "'");
    ip = ip * 10 + (s[i] - '0');
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9')
        throw std::invalid_argument("Rational: bad numeric literal '" + text + "'");
      fp = fp * 10 + (s[i] - '0');
      den *= 10;
      any = true;
      if (den > 100000000000000000LL)
        throw std::overflow_error("Rational: literal has too many digits");
    }
  }
  if (!any) throw std::invalid_argument("Rational: bad numeric literal '" + text + "'");
  Rational r = Rational(ip) + Rational(fp, den);
  return neg ? -r : r;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace rst
