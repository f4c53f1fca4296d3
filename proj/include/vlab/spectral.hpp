#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

namespace detail {

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<std::vector<int>, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// In-place plan for a 1D transform along `axis` of a dense array whose
// extents are listed fastest-first.
inline fftw_plan axis_plan(const std::vector<int>& dims, int axis, int sign) {
  auto& cache = plan_cache();
  std::lock_guard<std::mutex> lock(cache.mu);
  auto key = std::make_tuple(dims, axis, sign);
  auto it = cache.plans.find(key);
  if (it != cache.plans.end()) return it->second;

  std::vector<fftw_iodim> loops;
  fftw_iodim tdim{};
  int stride = 1;
  std::size_t total = 1;
  for (int a = 0; a < static_cast<int>(dims.size()); ++a) {
    fftw_iodim d{dims[a], stride, stride};
    if (a == axis)
      tdim = d;
    else
      loops.push_back(d);
    stride *= dims[a];
    total *= static_cast<std::size_t>(dims[a]);
  }
  auto* buf = fftw_alloc_complex(total);
  fftw_plan p = fftw_plan_guru_dft(1, &tdim, static_cast<int>(loops.size()), loops.data(), buf,
                                   buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p) throw NumericalError("FFTW failed to create a plan");
  cache.plans.emplace(key, p);
  return p;
}

struct RealPlans {
  fftw_plan r2c, c2r;
};

// Out-of-place 2D real transforms for an nx-by-ny array (x fastest).
inline RealPlans real_plans(int nx, int ny) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, RealPlans> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto it = plans.find({nx, ny});
  if (it != plans.end()) return it->second;
  const std::size_t nr = static_cast<std::size_t>(nx) * ny;
  const std::size_t nc = static_cast<std::size_t>(nx / 2 + 1) * ny;
  double* rb = fftw_alloc_real(nr);
  fftw_complex* cb = fftw_alloc_complex(nc);
  RealPlans p;
  p.r2c = fftw_plan_dft_r2c_2d(ny, nx, rb, cb, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_2d(ny, nx, cb, rb, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(rb);
  fftw_free(cb);
  if (!p.r2c || !p.c2r) throw NumericalError("FFTW failed to create a real plan");
  plans.emplace(std::make_pair(nx, ny), p);
  return p;
}

}  // namespace detail

/// Unnormalized in-place FFT along one axis of a dense multi-dimensional array.
inline void fft_axis(cvec& data, const std::vector<int>& dims, int axis, int sign) {
  fftw_plan p = detail::axis_plan(dims, axis, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

/// Angular wavenumbers of an n-point periodic grid of length l. The Nyquist
/// mode gets 0 so that the spectral first derivative stays real and skew.
inline rvec derivative_wavenumbers(int n, double l) {
  rvec k(n);
  for (int i = 0; i < n; ++i) {
    int m = (i <= n / 2) ? i : i - n;
    if (n % 2 == 0 && i == n / 2) m = 0;
    k[i] = 2.0 * pi * m / l;
  }
  return k;
}

/// Spectral first derivative along one axis, in place.
inline void deriv_axis(cvec& data, const std::vector<int>& dims, int axis, double length) {
  fft_axis(data, dims, axis, FFTW_FORWARD);
  const rvec k = derivative_wavenumbers(dims[axis], length);
  std::size_t inner = 1;
  for (int a = 0; a < axis; ++a) inner *= dims[a];
  const std::size_t n = dims[axis];
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const std::size_t m = (idx / inner) % n;
    data[idx] *= cplx(0.0, k[m] * scale);
  }
  fft_axis(data, dims, axis, FFTW_BACKWARD);
}

/// Fourier calculus on a TorusGrid. Degree-d sections are periodic in x and
/// satisfy phi(x, y + ly) = exp(-2 pi i d x / lx) phi(x, y).
class Spectral {
 public:
  explicit Spectral(const TorusGrid& g)
      : g_(g),
        dims_{g.nx(), g.ny()},
        kx_(derivative_wavenumbers(g.nx(), g.lx())),
        ky_(derivative_wavenumbers(g.ny(), g.ly())) {}

  const TorusGrid& grid() const noexcept { return g_; }
  const rvec& kx() const noexcept { return kx_; }
  const rvec& ky() const noexcept { return ky_; }

  cvec dx(cvec f) const {
    deriv_axis(f, dims_, 0, g_.lx());
    return f;
  }
  cvec dy(cvec f) const {
    deriv_axis(f, dims_, 1, g_.ly());
    return f;
  }
  rvec dx(const rvec& f) const { return real_part(dx(to_complex(f))); }
  rvec dy(const rvec& f) const { return real_part(dy(to_complex(f))); }

  /// d/dy of a degree-d section, using the periodic Bloch factor
  /// exp(i kappa(x) y) phi with kappa = 2 pi d x / area.
  cvec dy_section(const cvec& phi, int d) const {
    if (d == 0) return dy(phi);
    const cvec& e = bloch_phase(d);
    cvec p(phi.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = e[k] * phi[k];
    deriv_axis(p, dims_, 1, g_.ly());
    for (int j = 0; j < g_.ny(); ++j)
      for (int i = 0; i < g_.nx(); ++i) {
        const std::size_t k = g_.index(i, j);
        p[k] = std::conj(e[k]) * p[k] - cplx(0.0, kappa(i, d)) * phi[k];
      }
    return p;
  }

  /// exp(i kappa(x) y) sampled on the grid; cached per grid and degree.
  const cvec& bloch_phase(int d) const {
    static std::mutex mu;
    static std::map<std::tuple<int, int, double, double, int>, std::unique_ptr<cvec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(g_.nx(), g_.ny(), g_.lx(), g_.ly(), d);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto e = std::make_unique<cvec>(g_.size());
    for (int j = 0; j < g_.ny(); ++j)
      for (int i = 0; i < g_.nx(); ++i) (*e)[g_.index(i, j)] = std::polar(1.0, kappa(i, d) * g_.y(j));
    return *cache.emplace(key, std::move(e)).first->second;
  }

  /// d/dy of the first connection component, which jumps by 2 pi d / lx across
  /// the y seam.
  rvec dy_a1(const rvec& a1, int d) const {
    if (d == 0) return dy(a1);
    const double slope = 2.0 * pi * d / g_.area();
    rvec p(a1.size());
    for (int j = 0; j < g_.ny(); ++j)
      for (int i = 0; i < g_.nx(); ++i) p[g_.index(i, j)] = a1[g_.index(i, j)] - slope * g_.y(j);
    rvec out = dy(p);
    for (double& v : out) v += slope;
    return out;
  }

  /// Symbol of the discrete Laplacian D_x^2 + D_y^2 at mode (i, j).
  double laplace_symbol(int i, int j) const { return -(kx_[i] * kx_[i] + ky_[j] * ky_[j]); }

  cvec forward(cvec f) const {
    fft_axis(f, dims_, 0, FFTW_FORWARD);
    fft_axis(f, dims_, 1, FFTW_FORWARD);
    return f;
  }
  /// Inverse of forward, including the 1/N normalization.
  cvec backward(cvec f) const {
    fft_axis(f, dims_, 0, FFTW_BACKWARD);
    fft_axis(f, dims_, 1, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(g_.size());
    for (auto& v : f) v *= s;
    return f;
  }

  /// Multiplies the spectrum of a periodic real field by a real, even symbol
  /// sym(i, j); only i <= nx/2 is queried.
  template <class Sym>
  rvec apply_symbol(const rvec& f, Sym&& sym) const {
    const int nh = g_.nx() / 2 + 1;
    const auto plans = detail::real_plans(g_.nx(), g_.ny());
    rvec in = f;
    cvec c(static_cast<std::size_t>(nh) * g_.ny());
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    fftw_execute_dft_r2c(plans.r2c, in.data(), cp);
    const double s = 1.0 / static_cast<double>(g_.size());
    for (int j = 0; j < g_.ny(); ++j)
      for (int i = 0; i < nh; ++i) c[static_cast<std::size_t>(j) * nh + i] *= s * sym(i, j);
    fftw_execute_dft_c2r(plans.c2r, cp, in.data());
    return in;
  }

  rvec laplacian(const rvec& f) const {
    return apply_symbol(f, [this](int i, int j) { return laplace_symbol(i, j); });
  }

  double kappa(int i, int d) const { return 2.0 * pi * d * g_.x(i) / g_.area(); }

  static cvec to_complex(const rvec& f) { return cvec(f.begin(), f.end()); }
  static rvec real_part(const cvec& f) {
    rvec r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) r[k] = f[k].real();
    return r;
  }

 private:
  TorusGrid g_;
  std::vector<int> dims_;
  rvec kx_, ky_;
};

/// Trigonometric interpolant of a real periodic grid function, with exact
/// first and second derivatives.
class FourierInterpolant {
 public:
  FourierInterpolant(const Spectral& sp, const rvec& f) : g_(sp.grid()) {
    check_size(f, g_, "FourierInterpolant");
    coef_ = sp.forward(Spectral::to_complex(f));
    const double s = 1.0 / static_cast<double>(g_.size());
    for (auto& c : coef_) c *= s;
    kx_.resize(g_.nx());
    ky_.resize(g_.ny());
    for (int i = 0; i < g_.nx(); ++i) kx_[i] = 2 * pi * ((i <= g_.nx() / 2) ? i : i - g_.nx()) / g_.lx();
    for (int j = 0; j < g_.ny(); ++j) ky_[j] = 2 * pi * ((j <= g_.ny() / 2) ? j : j - g_.ny()) / g_.ly();
  }

  struct Eval {
    double f, fx, fy, fxx, fxy, fyy;
  };

  Eval eval(double x, double y) const {
    cvec ex(g_.nx()), ey(g_.ny());
    for (int i = 0; i < g_.nx(); ++i) ex[i] = std::polar(1.0, kx_[i] * x);
    for (int j = 0; j < g_.ny(); ++j) ey[j] = std::polar(1.0, ky_[j] * y);
    cplx s{}, sx{}, sy{}, sxx{}, sxy{}, syy{};
    for (int j = 0; j < g_.ny(); ++j) {
      cplx r{}, rx{}, rxx{};
      for (int i = 0; i < g_.nx(); ++i) {
        const cplx t = coef_[g_.index(i, j)] * ex[i];
        r += t;
        rx += t * kx_[i];
        rxx += t * (kx_[i] * kx_[i]);
      }
      const cplx e = ey[j];
      const double k = ky_[j];
      s += r * e;
      sx += rx * e;
      sy += r * e * k;
      sxx += rxx * e;
      sxy += rx * e * k;
      syy += r * e * (k * k);
    }
    const cplx I(0, 1);
    return {s.real(), (I * sx).real(), (I * sy).real(), -sxx.real(), -sxy.real(), -syy.real()};
  }

 private:
  TorusGrid g_;
  cvec coef_;
  rvec kx_, ky_;
};

}  // namespace vlab
