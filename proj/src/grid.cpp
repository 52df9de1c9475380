#include "rst/grid.hpp"

#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace rst {

std::shared_ptr<const Grid> Grid::make(const ScalingSpec& scaling, int points_per_axis,
                                       double period) {
  if (points_per_axis < 4 || (points_per_axis & (points_per_axis - 1)) != 0)
    throw std::invalid_argument("Grid: points per axis must be a power of two >= 4");
  auto g = std::make_shared<Grid>();
  g->d = scaling.dim();
  g->n.assign(g->d, points_per_axis);
  g->len.assign(g->d, period);
  g->s.resize(g->d);
  for (std::size_t i = 0; i < g->d; ++i) g->s[i] = scaling.s[i].to_double();
  return g;
}

Field& Field::operator+=(const Field& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}
Field& Field::operator-=(const Field& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}
Field& Field::operator*=(double c) {
  for (double& x : v_) x *= c;
  return *this;
}
Field Field::hadamard(const Field& o) const {
  Field r = *this;
  for (std::size_t i = 0; i < r.v_.size(); ++i) r.v_[i] *= o.v_[i];
  return r;
}
double Field::integral() const {
  double s = 0;
  for (double x : v_) s += x;
  return s * grid_->cell_volume();
}
double Field::sup_norm() const {
  double m = 0;
  for (double x : v_) m = std::max(m, std::fabs(x));
  return m;
}
double Field::lp_norm(double p) const {
  double s = 0;
  for (double x : v_) s += std::pow(std::fabs(x), p);
  return std::pow(s * grid_->cell_volume(), 1.0 / p);
}

Field Field::sample(GridPtr g, const std::function<double(const std::vector<double>&)>& fn) {
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(g->point(g->unflat(i)));
  return f;
}

namespace {

using Cplx = std::complex<double>;

// d-dimensional complex FFT over the flat layout, axis by axis
void fft_nd(const Grid& g, std::vector<Cplx>& data, bool inverse) {
  thread_local Eigen::FFT<double> fft;
  std::size_t total = data.size();
  for (std::size_t axis = 0; axis < g.d; ++axis) {
    std::size_t naxis = std::size_t(g.n[axis]);
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < g.d; ++a) stride *= std::size_t(g.n[a]);
    std::size_t blocks = total / naxis;
    std::vector<Cplx> line(naxis), out(naxis);
    for (std::size_t b = 0; b < blocks; ++b) {
      // compute base offset of this line
      std::size_t outer = b / stride;
      std::size_t inner = b % stride;
      std::size_t base = outer * naxis * stride + inner;
      for (std::size_t i = 0; i < naxis; ++i) line[i] = data[base + i * stride];
      if (inverse)
        fft.inv(out, line);
      else
        fft.fwd(out, line);
      for (std::size_t i = 0; i < naxis; ++i) data[base + i * stride] = out[i];
    }
  }
}

std::vector<Cplx> to_complex(const Field& f) {
  std::vector<Cplx> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
  return c;
}

}  // namespace

Field convolve(const Field& a, const Field& b) {
  const Grid& g = *a.grid();
  auto ca = to_complex(a);
  auto cb = to_complex(b);
  fft_nd(g, ca, false);
  fft_nd(g, cb, false);
  for (std::size_t i = 0; i < ca.size(); ++i) ca[i] *= cb[i];
  fft_nd(g, ca, true);
  Field out(a.grid());
  const double scale = g.cell_volume();
  for (std::size_t i = 0; i < ca.size(); ++i) out[i] = ca[i].real() * scale;
  return out;
}

Field convolve_direct(const Field& a, const Field& b) {
  const Grid& g = *a.grid();
  Field out(a.grid());
  const double vol = g.cell_volume();
  const std::size_t N = a.size();
  if (g.d == 1) {
    const int n = g.n[0];
    for (int x = 0; x < n; ++x) {
      double s = 0;
      for (int y = 0; y < n; ++y) s += a[std::size_t(((x - y) % n + n) % n)] * b[std::size_t(y)];
      out[std::size_t(x)] = s * vol;
    }
    return out;
  }
  for (std::size_t i = 0; i < N; ++i) {
    auto xi = g.unflat(i);
    double s = 0;
    for (std::size_t j = 0; j < N; ++j) {
      auto yj = g.unflat(j);
      std::vector<int> diff(g.d);
      for (std::size_t ax = 0; ax < g.d; ++ax) diff[ax] = xi[ax] - yj[ax];
      s += a[g.flat(diff)] * b[j];
    }
    out[i] = s * vol;
  }
  return out;
}

Field shift_field(const Field& f, const std::vector<int>& offset) {
  const Grid& g = *f.grid();
  Field out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto ix = g.unflat(i);
    for (std::size_t a = 0; a < g.d; ++a) ix[a] += offset[a];
    out[i] = f.at(ix);
  }
  return out;
}

Field spectral_derivative(const Field& f, const MultiIndex& k) {
  const Grid& g = *f.grid();
  auto c = to_complex(f);
  fft_nd(g, c, false);
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto ix = g.unflat(i);
    Cplx mult(1.0, 0.0);
    for (std::size_t a = 0; a < g.d; ++a) {
      int kk = ix[a];
      if (kk > g.n[a] / 2) kk -= g.n[a];
      // zero out the unmatched Nyquist mode for odd derivatives
      if (ix[a] == std::size_t(g.n[a] / 2) && (k[a] % 2) == 1) {
        mult = 0.0;
        break;
      }
      Cplx iw(0.0, 2.0 * M_PI * double(kk) / g.len[a]);
      for (int p = 0; p < k[a]; ++p) mult *= iw;
    }
    c[i] *= mult;
  }
  fft_nd(g, c, true);
  Field out(f.grid());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

Field spectral_filter(const Field& f,
                      const std::function<double(const std::vector<double>&)>& m) {
  const Grid& g = *f.grid();
  auto c = to_complex(f);
  fft_nd(g, c, false);
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto ix = g.unflat(i);
    std::vector<double> omega(g.d);
    for (std::size_t a = 0; a < g.d; ++a) {
      int k = ix[a];
      if (k > g.n[a] / 2) k -= g.n[a];
      omega[a] = 2.0 * M_PI * double(k) / g.len[a];
    }
    c[i] *= m(omega);
  }
  fft_nd(g, c, true);
  Field out(f.grid());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

double sobolev_norm(const Field& f, double sexp) {
  const Grid& g = *f.grid();
  auto c = to_complex(f);
  fft_nd(g, c, false);
  // Parseval with orthonormal torus exponentials: ||f||_{L2}^2 = sum_k |fhat_k|^2,
  // fhat_k = cellvol * DFT_k / sqrt(vol(domain))
  double dom = 1;
  for (std::size_t a = 0; a < g.d; ++a) dom *= g.len[a];
  const double coef = g.cell_volume() / std::sqrt(dom);
  double acc = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto ix = g.unflat(i);
    double w2 = 1.0;
    for (std::size_t a = 0; a < g.d; ++a) {
      int k = ix[a];
      if (k > g.n[a] / 2) k -= g.n[a];
      double om = 2.0 * M_PI * double(k) / g.len[a];
      w2 += om * om;
    }
    double amp = std::norm(c[i] * coef);
    acc += std::pow(w2, sexp) * amp;
  }
  return std::sqrt(acc);
}

}  // namespace rst
