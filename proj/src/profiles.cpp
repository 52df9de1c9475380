#include "rst/profiles.hpp"

#include <stdexcept>

namespace rst {

double ProfileND::deriv(const std::vector<double>& x, const MultiIndex& k) const {
  int total = k.total();
  if (total == 0) return eval_plain(x);
  // single-axis derivatives up to order 2 via duals
  int axis = -1, others = 0;
  for (std::size_t a = 0; a < k.dim(); ++a) {
    if (k[a] > 0) {
      if (axis < 0)
        axis = int(a);
      else
        others = 1;
    }
  }
  if (!others && k[std::size_t(axis)] <= 2) {
    Dual2 r = eval_axis(x, std::size_t(axis));
    return k[std::size_t(axis)] == 1 ? r.d1 : r.d2;
  }
  // mixed second derivative d_a d_b: central difference of the d_b dual
  if (total == 2) {
    int a = -1, b = -1;
    for (std::size_t i = 0; i < k.dim(); ++i) {
      if (k[i] == 1) {
        if (a < 0)
          a = int(i);
        else
          b = int(i);
      }
    }
    if (a >= 0 && b >= 0) {
      const double eps = 1e-5;
      std::vector<double> xp = x, xm = x;
      xp[std::size_t(a)] += eps;
      xm[std::size_t(a)] -= eps;
      return (eval_axis(xp, std::size_t(b)).d1 - eval_axis(xm, std::size_t(b)).d1) / (2 * eps);
    }
  }
  throw std::invalid_argument("ProfileND: derivative order beyond 2 is not supported");
}

}  // namespace rst
