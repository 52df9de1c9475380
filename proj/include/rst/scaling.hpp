#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rst/multiindex.hpp"
#include "rst/rational.hpp"

namespace rst {

// Space(-time) scaling s = (s_1,...,s_d) with s_i > 0.  The entries are exact
// rationals so that scaled degrees of multi-indices stay exact.
struct ScalingSpec {
  std::vector<Rational> s;

  ScalingSpec() = default;
  explicit ScalingSpec(std::vector<Rational> entries) : s(std::move(entries)) {
    for (const auto& v : s)
      if (!v.is_positive()) throw std::invalid_argument("ScalingSpec: entries must be positive");
  }
  static ScalingSpec isotropic(std::size_t d) {
    return ScalingSpec(std::vector<Rational>(d, Rational(1)));
  }

  std::size_t dim() const { return s.size(); }

  Rational total() const {  // |s|
    Rational t(0);
    for (const auto& v : s) t += v;
    return t;
  }

  // scaled degree |k|_s of a multi-index
  Rational degree(const MultiIndex& k) const {
    if (k.dim() != dim()) throw std::invalid_argument("ScalingSpec: dimension mismatch");
    Rational t(0);
    for (std::size_t i = 0; i < dim(); ++i) t += s[i] * Rational(k[i]);
    return t;
  }

  // scaled norm |z|_s = sum_i |z_i|^{1/s_i} of a displacement
  double norm(const std::vector<double>& z) const {
    if (z.size() != dim()) throw std::invalid_argument("ScalingSpec: dimension mismatch");
    double t = 0;
    for (std::size_t i = 0; i < dim(); ++i) t += std::pow(std::fabs(z[i]), 1.0 / s[i].to_double());
    return t;
  }
};

}  // namespace rst
