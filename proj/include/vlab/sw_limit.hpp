#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <limits>
#include <string>
#include <vector>

#include "vlab/clifford_spin.hpp"
#include "vlab/field_core.hpp"
#include "vlab/vortex_statics.hpp"

namespace vlab {

/// Flat Kahler product T^2 x T^2 with z = x1 + i y1 on the first factor and
/// w = x2 + i y2 on the second. Samples are stored with x1 fastest, then y1,
/// x2, y2. Axes are numbered 0..3 in that order.
class KahlerTorusGrid {
 public:
  KahlerTorusGrid(TorusGrid f1, TorusGrid f2) : f1_(std::move(f1)), f2_(std::move(f2)) {}

  const TorusGrid& factor1() const noexcept { return f1_; }
  const TorusGrid& factor2() const noexcept { return f2_; }

  std::vector<int> dims() const { return {f1_.nx(), f1_.ny(), f2_.nx(), f2_.ny()}; }
  std::array<double, 4> lengths() const { return {f1_.lx(), f1_.ly(), f2_.lx(), f2_.ly()}; }
  std::array<double, 4> spacings() const { return {f1_.hx(), f1_.hy(), f2_.hx(), f2_.hy()}; }
  std::size_t size() const { return f1_.size() * f2_.size(); }
  double weight() const { return f1_.weight() * f2_.weight(); }
  double h() const { return std::max(f1_.h(), f2_.h()); }

  std::size_t index(int i1, int j1, int i2, int j2) const {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(f1_.nx()) *
               (j1 + static_cast<std::size_t>(f1_.ny()) *
                         (i2 + static_cast<std::size_t>(f2_.nx()) * j2));
  }
  std::size_t plane1() const { return f1_.size(); }

  template <class V>
  void check(const V& v, const char* what) const {
    if (v.size() != size())
      throw ShapeError(std::string(what) + ": expected " + std::to_string(size()) +
                       " samples, got " + std::to_string(v.size()));
  }

 private:
  TorusGrid f1_, f2_;
};

/// Normalized SW_lambda data: alpha in Lambda^{0,0} (x) E, beta the
/// coefficient of dzbar1 ^ dzbar2, and B = i sum_j b_j dx_j with the degree-d
/// twist on the second factor:
///   s(..., x2, y2 + l) = exp(-2 pi i d x2 / l2x) s,  b_x2(y2 + l) = b_x2 + 2 pi d / l2x.
struct SWFields {
  int degree = 0;
  cvec alpha, beta;
  std::array<rvec, 4> b;
  double lambda = 1.0;

  void check(const KahlerTorusGrid& g) const {
    if (!(lambda > 0)) throw DomainError("SWFields: lambda must be positive");
    if (alpha.size() != g.size() || beta.size() != g.size())
      throw ShapeError("SWFields: section size does not match the grid");
    for (const auto& c : b)
      if (c.size() != g.size()) throw ShapeError("SWFields: connection size does not match the grid");
  }

  /// Uniform-flux connection of degree d pulled back from the second factor.
  static std::array<rvec, 4> reference_connection(const KahlerTorusGrid& g, int d) {
    std::array<rvec, 4> b;
    for (auto& c : b) c.assign(g.size(), 0.0);
    const TorusGrid& f2 = g.factor2();
    for (int j2 = 0; j2 < f2.ny(); ++j2)
      for (int i2 = 0; i2 < f2.nx(); ++i2) {
        const double v = 2.0 * pi * d * f2.y(j2) / f2.area();
        const std::size_t base = g.index(0, 0, i2, j2);
        for (std::size_t k = 0; k < g.plane1(); ++k) b[2][base + k] = v;
      }
    return b;
  }
};

struct SWResidual {
  double r1 = 0, r2 = 0, r3 = 0;
};

/// Fourier calculus on the product grid, with the Bloch treatment of the
/// twisted y2 direction.
class Spectral4 {
 public:
  explicit Spectral4(const KahlerTorusGrid& g) : g_(g), dims_(g.dims()), len_(g.lengths()) {}

  const KahlerTorusGrid& grid() const { return g_; }

  rvec d(const rvec& f, int axis) const {
    cvec c(f.begin(), f.end());
    deriv_axis(c, dims_, axis, len_[axis]);
    return Spectral::real_part(c);
  }

  /// d/dy2 of b_x2, which carries the slope 2 pi d y2 / area2.
  rvec d_bx2_y2(const rvec& bx2, int degree) const {
    const TorusGrid& f2 = g_.factor2();
    const double slope = 2.0 * pi * degree / f2.area();
    rvec p = bx2;
    each([&](std::size_t k, int, int, int, int j2) { p[k] -= slope * f2.y(j2); });
    p = d(p, 3);
    for (double& x : p) x += slope;
    return p;
  }

  /// Covariant derivative (d_axis + i b_axis) s of a twisted section.
  cvec cov(const cvec& s, const std::array<rvec, 4>& b, int degree, int axis) const {
    cvec out = s;
    if (axis < 3 || degree == 0) {
      deriv_axis(out, dims_, axis, len_[axis]);
    } else {
      const TorusGrid& f2 = g_.factor2();
      each([&](std::size_t k, int, int, int i2, int j2) {
        out[k] *= std::polar(1.0, kappa(i2, degree) * f2.y(j2));
      });
      deriv_axis(out, dims_, 3, len_[3]);
      each([&](std::size_t k, int, int, int i2, int j2) {
        const double ka = kappa(i2, degree);
        out[k] = out[k] * std::polar(1.0, -ka * f2.y(j2)) - cplx(0.0, ka) * s[k];
      });
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += cplx(0.0, b[axis][k]) * s[k];
    return out;
  }

  double kappa(int i2, int degree) const {
    return 2.0 * pi * degree * g_.factor2().x(i2) / g_.factor2().area();
  }

  template <class F>
  void each(F&& f) const {
    std::size_t k = 0;
    for (int j2 = 0; j2 < dims_[3]; ++j2)
      for (int i2 = 0; i2 < dims_[2]; ++i2)
        for (int j1 = 0; j1 < dims_[1]; ++j1)
          for (int i1 = 0; i1 < dims_[0]; ++i1, ++k) f(k, i1, j1, i2, j2);
  }

 private:
  const KahlerTorusGrid& g_;
  std::vector<int> dims_;
  std::array<double, 4> len_;
};

/// A (0,1)-form in the unitary frame of the spin representation: the
/// components along |1> and |2> (dzbar1 and dzbar2 directions).
struct Form01 {
  cvec c1, c2;
};

namespace detail {

// (nabla_x + sgn i nabla_y) on factor f (0 or 1).
inline cvec dbar_dir(const Spectral4& sp, const cvec& s, const std::array<rvec, 4>& b, int degree,
                     int factor, double sgn) {
  cvec x = sp.cov(s, b, degree, 2 * factor);
  const cvec y = sp.cov(s, b, degree, 2 * factor + 1);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += cplx(0.0, sgn) * y[k];
  return x;
}

}  // namespace detail

/// dbar_B on sections: alpha -> (2 nabla_zbar1 alpha, 2 nabla_zbar2 alpha).
inline Form01 dbar0(const cvec& alpha, const std::array<rvec, 4>& b, int degree,
                    const KahlerTorusGrid& g) {
  g.check(alpha, "dbar0");
  Spectral4 sp(g);
  return {detail::dbar_dir(sp, alpha, b, degree, 0, 1.0),
          detail::dbar_dir(sp, alpha, b, degree, 1, 1.0)};
}

/// Formal adjoint of dbar0: gamma -> -(2 nabla_z1 gamma1 + 2 nabla_z2 gamma2).
inline cvec dbar0_adjoint(const Form01& gam, const std::array<rvec, 4>& b, int degree,
                          const KahlerTorusGrid& g) {
  Spectral4 sp(g);
  cvec out = detail::dbar_dir(sp, gam.c1, b, degree, 0, -1.0);
  const cvec t = detail::dbar_dir(sp, gam.c2, b, degree, 1, -1.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -(out[k] + t[k]);
  return out;
}

/// dbar_B on (0,1)-forms: gamma -> 2 nabla_zbar1 gamma2 - 2 nabla_zbar2 gamma1.
inline cvec dbar1(const Form01& gam, const std::array<rvec, 4>& b, int degree,
                  const KahlerTorusGrid& g) {
  Spectral4 sp(g);
  cvec out = detail::dbar_dir(sp, gam.c2, b, degree, 0, 1.0);
  const cvec t = detail::dbar_dir(sp, gam.c1, b, degree, 1, 1.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= t[k];
  return out;
}

/// Formal adjoint of dbar1: beta -> (2 nabla_z2 beta, -2 nabla_z1 beta).
inline Form01 dbar1_adjoint(const cvec& beta, const std::array<rvec, 4>& b, int degree,
                            const KahlerTorusGrid& g) {
  Spectral4 sp(g);
  Form01 out{detail::dbar_dir(sp, beta, b, degree, 1, -1.0),
             detail::dbar_dir(sp, beta, b, degree, 0, -1.0)};
  for (auto& v : out.c2) v = -v;
  return out;
}

/// D = dbar_B + dbar_B^* on positive spinors alpha + beta dzbar1 ^ dzbar2.
inline Form01 dirac_dbar(const SWFields& f, const KahlerTorusGrid& g) {
  f.check(g);
  Form01 a = dbar0(f.alpha, f.b, f.degree, g);
  const Form01 c = dbar1_adjoint(f.beta, f.b, f.degree, g);
  for (std::size_t k = 0; k < a.c1.size(); ++k) {
    a.c1[k] += c.c1[k];
    a.c2[k] += c.c2[k];
  }
  return a;
}

/// L2 inner product <u, v> = sum conj(u) v dV on the product grid.
inline cplx inner(const cvec& u, const cvec& v, const KahlerTorusGrid& g) {
  cplx s{};
  for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
  return s * g.weight();
}
inline cplx inner(const Form01& u, const Form01& v, const KahlerTorusGrid& g) {
  return inner(u.c1, v.c1, g) + inner(u.c2, v.c2, g);
}

/// D_A s = sum_j Gamma(e_j) nabla_j s with second-order central covariant
/// differences. The spinor is given by its 2^m = 4 components in the basis of
/// the spin representation (index = bitmask of dzbar factors). Empty
/// components stand for zero; output components that receive no contribution
/// are left empty.
inline std::array<cvec, 4> dirac_clifford(const std::array<cvec, 4>& s, const SpinRep& rep,
                                          const std::array<rvec, 4>& b, int degree,
                                          const KahlerTorusGrid& g) {
  if (rep.m != 2) throw DomainError("dirac_clifford: needs the n = 4 spin representation");
  for (const auto& c : s)
    if (!c.empty()) g.check(c, "dirac_clifford");
  for (const auto& c : b) g.check(c, "dirac_clifford connection");
  const auto dims = g.dims();
  const auto hs = g.spacings();
  const TorusGrid& f2 = g.factor2();
  std::array<std::size_t, 4> stride{1, static_cast<std::size_t>(dims[0]),
                                    static_cast<std::size_t>(dims[0]) * dims[1],
                                    static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]};
  std::array<cvec, 4> out;
  Spectral4 sp(g);
  cvec ds(g.size());
  for (int axis = 0; axis < 4; ++axis) {
    const Eigen::MatrixXcd& G = rep.gamma[axis];
    for (int comp = 0; comp < 4; ++comp) {
      const cvec& u = s[comp];
      if (u.empty()) continue;
      sp.each([&](std::size_t k, int i1, int j1, int i2, int j2) {
        const int idx[4] = {i1, j1, i2, j2};
        const int n = dims[axis], i = idx[axis];
        const std::size_t kp = i + 1 < n ? k + stride[axis] : k - (n - 1) * stride[axis];
        const std::size_t km = i > 0 ? k - stride[axis] : k + (n - 1) * stride[axis];
        cplx up = u[kp], um = u[km];
        if (axis == 3 && degree != 0) {
          const double ph = 2.0 * pi * degree * f2.x(i2) / f2.lx();
          if (i + 1 == n) up *= std::polar(1.0, -ph);
          if (i == 0) um *= std::polar(1.0, ph);
        }
        ds[k] = (up - um) / (2.0 * hs[axis]) + cplx(0.0, b[axis][k]) * u[k];
      });
      for (int row = 0; row < 4; ++row) {
        const cplx gv = G(row, comp);
        if (gv == 0.0) continue;
        if (out[row].empty()) out[row].assign(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) out[row][k] += gv * ds[k];
      }
    }
  }
  return out;
}

/// Seeded smooth test data on the product torus: B = reference connection
/// plus a few low Fourier modes per component; alpha and beta are the
/// holomorphic section of degree d on the second factor (zero at `zero2`)
/// times smooth complex functions.
inline SWFields random_smooth_fields(const KahlerTorusGrid& g, int degree, std::uint64_t seed,
                                     cplx zero2 = cplx(0.3, 0.6), int modes = 4,
                                     double b_amp = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  std::uniform_int_distribution<int> K(-1, 1);
  const auto L = g.lengths();
  const auto hs = g.spacings();
  Spectral4 sp(g);
  auto smooth = [&](double amp) {
    rvec f(g.size(), 0.0);
    for (int t = 0; t < modes; ++t) {
      int k[4];
      const double c = amp * N01(rng), ph = N01(rng);
      for (int& v : k) v = K(rng);
      sp.each([&](std::size_t idx, int i1, int j1, int i2, int j2) {
        const int I[4] = {i1, j1, i2, j2};
        double arg = ph;
        for (int a = 0; a < 4; ++a) arg += 2.0 * pi * k[a] * I[a] * hs[a] / L[a];
        f[idx] += c * std::cos(arg);
      });
    }
    return f;
  };
  SWFields f;
  f.degree = degree;
  f.b = SWFields::reference_connection(g, degree);
  for (auto& c : f.b) {
    const rvec p = smooth(b_amp);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += p[k];
  }
  const TorusGrid& f2 = g.factor2();
  const cvec th = degree == 0 ? cvec(f2.size(), cplx(1.0))
                              : holomorphic_section(ModuliPoint{std::vector<cplx>(degree, zero2)}, f2);
  f.alpha.resize(g.size());
  f.beta.resize(g.size());
  {
    const rvec r1 = smooth(1.0), r2 = smooth(1.0);
    sp.each([&](std::size_t k, int, int, int i2, int j2) {
      f.alpha[k] = th[f2.index(i2, j2)] * cplx(1.0 + r1[k], r2[k]);
    });
  }
  {
    const rvec r3 = smooth(1.0), r4 = smooth(1.0);
    sp.each([&](std::size_t k, int, int, int i2, int j2) {
      f.beta[k] = th[f2.index(i2, j2)] * cplx(r3[k], r4[k]);
    });
  }
  return f;
}

/// sup |dirac_clifford - dirac_dbar| on alpha + beta dzbar1 ^ dzbar2. The
/// fields are consumed to keep the peak memory at a few arrays.
inline double dirac_discrepancy(SWFields&& f, const KahlerTorusGrid& g) {
  f.check(g);
  Form01 D = dirac_dbar(f, g);
  const SpinRep rep = build_spin_rep(2);
  std::array<cvec, 4> s;
  s[0] = std::move(f.alpha);
  s[3] = std::move(f.beta);
  const auto C = dirac_clifford(s, rep, f.b, f.degree, g);
  double e = 0;
  for (int row : {0, 3})
    if (!C[row].empty()) e = std::max(e, sup_norm(C[row]));
  for (std::size_t k = 0; k < g.size(); ++k)
    e = std::max({e, std::abs(C[1][k] - D.c1[k]), std::abs(C[2][k] - D.c2[k])});
  return e;
}

/// Condition 0 <= c1(E).[omega] <= c1(K).[omega] with integer degrees.
inline bool validate_chern(int degE, int degK, double omega_class) {
  const double e = degE * omega_class, k = degK * omega_class;
  return 0.0 <= e && e <= k;
}

/// Curvature components F = i f with f_ab = d_a b_b - d_b b_a.
struct SWCurvature {
  rvec f_omega;  // 1/2 (f_x1y1 + f_x2y2); F^omega = i f_omega
  cvec f02;      // 1/2 ((f_x1x2 - f_y1y2) + i (f_x1y2 - f_x2y1)); F^{0,2} = i f02
};

inline SWCurvature sw_curvature(const std::array<rvec, 4>& b, int degree,
                                const KahlerTorusGrid& g) {
  Spectral4 sp(g);
  auto D = [&](int comp, int axis) {
    if (comp == 2 && axis == 3) return sp.d_bx2_y2(b[2], degree);
    return sp.d(b[comp], axis);
  };
  // f(a, c) = d_a b_c - d_c b_a
  auto f = [&](int a, int c) {
    rvec r = D(c, a);
    const rvec t = D(a, c);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= t[k];
    return r;
  };
  SWCurvature out;
  const rvec f01 = f(0, 1), f23 = f(2, 3);
  out.f_omega.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) out.f_omega[k] = 0.5 * (f01[k] + f23[k]);
  const rvec f02 = f(0, 2), f13 = f(1, 3), f03 = f(0, 3), f21 = f(2, 1);
  out.f02.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    out.f02[k] = 0.5 * cplx(f02[k] - f13[k], f03[k] - f21[k]);
  return out;
}

/// Sup-norm residuals of
///   dbar_B alpha + dbar_B^* beta = 0,
///   (4i/lambda) F^omega = 4 pi + |beta|^2 - |alpha|^2,
///   (2/lambda) F^{0,2} = conj(alpha) beta.
inline SWResidual sw_lambda_residual(const SWFields& f, const KahlerTorusGrid& g) {
  f.check(g);
  SWResidual r;
  const Form01 D = dirac_dbar(f, g);
  for (std::size_t k = 0; k < g.size(); ++k)
    r.r1 = std::max(r.r1, std::sqrt(std::norm(D.c1[k]) + std::norm(D.c2[k])));
  const SWCurvature F = sw_curvature(f.b, f.degree, g);
  const double L = f.lambda;
  for (std::size_t k = 0; k < g.size(); ++k) {
    // (4i/lambda) i f_omega = -4 f_omega / lambda
    const double e2 = -4.0 * F.f_omega[k] / L - 4.0 * pi - std::norm(f.beta[k]) +
                      std::norm(f.alpha[k]);
    r.r2 = std::max(r.r2, std::abs(e2));
    const cplx e3 = (2.0 / L) * cplx(0.0, 1.0) * F.f02[k] - std::conj(f.alpha[k]) * f.beta[k];
    r.r3 = std::max(r.r3, std::abs(e3));
  }
  return r;
}

/// Vacuum |alpha| of the printed system: |alpha|^2 = 4 pi.
inline double sw_vacuum_alpha() { return 2.0 * std::sqrt(pi); }

/// Scale s = sqrt(4 pi lambda) relating the second factor to the GL vortex
/// torus: w_GL = s w. With it the lift solves the printed system exactly.
inline double lift_scale(double lambda) { return std::sqrt(4.0 * pi * lambda); }

/// The GL torus on which the vortex for a lift at lambda is solved.
inline TorusGrid lift_torus(const KahlerTorusGrid& g, double lambda) {
  const TorusGrid& f2 = g.factor2();
  const double s = lift_scale(lambda);
  return TorusGrid(f2.nx(), f2.ny(), s * f2.lx(), s * f2.ly());
}

/// Solves the vortex whose lift at lambda has zeros at the given second-factor
/// positions.
inline VortexSolution solve_lift_vortex(const ModuliPoint& zeros2, double lambda,
                                        const KahlerTorusGrid& g, double tol = 1e-10) {
  const double s = lift_scale(lambda);
  ModuliPoint m;
  for (cplx z : zeros2.zeros) m.zeros.push_back(s * z);
  return solve_vortex(m, lift_torus(g, lambda), tol);
}

/// Lift of a vortex on lift_torus(g, lambda), constant along the first
/// factor: alpha(z, w) = 2 sqrt(pi) Phi(s w), beta = 0, b_x2(w) = s a1(s w),
/// b_y2(w) = s a2(s w). The GL core radius 1 maps to 1/s on the second
/// factor; it must cover at least four grid spacings.
inline SWFields vortex_lift(const VortexSolution& v, double lambda, const KahlerTorusGrid& g) {
  if (!(lambda >= 1.0)) throw DomainError("vortex_lift: lambda must be at least 1");
  const TorusGrid& f2 = g.factor2();
  const TorusGrid want = lift_torus(g, lambda);
  if (v.pair.phi.size() != want.size())
    throw ShapeError("vortex_lift: vortex grid does not match the second factor");
  const double s = lift_scale(lambda);
  if (1.0 / s < 4.0 * f2.h())
    throw ResolutionError("vortex_lift: rescaled core " + std::to_string(1.0 / s) +
                          " is below 4h = " + std::to_string(4.0 * f2.h()));
  SWFields out;
  out.degree = v.pair.degree;
  out.lambda = lambda;
  out.alpha.assign(g.size(), 0.0);
  out.beta.assign(g.size(), 0.0);
  for (auto& c : out.b) c.assign(g.size(), 0.0);
  const double a = sw_vacuum_alpha();
  for (int j2 = 0; j2 < f2.ny(); ++j2)
    for (int i2 = 0; i2 < f2.nx(); ++i2) {
      const std::size_t src = f2.index(i2, j2), base = g.index(0, 0, i2, j2);
      for (std::size_t k = 0; k < g.plane1(); ++k) {
        out.alpha[base + k] = a * v.pair.phi[src];
        out.b[2][base + k] = s * v.pair.a1[src];
        out.b[3][base + k] = s * v.pair.a2[src];
      }
    }
  return out;
}

/// Restriction of SW data to the second-factor slice at first-factor sample
/// (i1, j1), as a field pair on the second factor.
inline GaugePair slice_factor2(const SWFields& f, const KahlerTorusGrid& g, int i1 = 0,
                               int j1 = 0) {
  const TorusGrid& f2 = g.factor2();
  GaugePair p;
  p.degree = f.degree;
  p.a1.resize(f2.size());
  p.a2.resize(f2.size());
  p.phi.resize(f2.size());
  for (int j2 = 0; j2 < f2.ny(); ++j2)
    for (int i2 = 0; i2 < f2.nx(); ++i2) {
      const std::size_t k = g.index(i1, j1, i2, j2), t = f2.index(i2, j2);
      p.a1[t] = f.b[2][k];
      p.a2[t] = f.b[3][k];
      p.phi[t] = f.alpha[k];
    }
  return p;
}

struct LocalizationEntry {
  double lambda = 0;
  SWResidual residual;
  double sup_beta = 0;
  /// Mean radius, around the first zero, of the contour |alpha| = 1/2 vacuum.
  double contour_radius = 0;
  /// Largest relative shortfall 1 - |alpha| / vacuum outside radius 5/sqrt(lambda)
  /// of the zeros.
  double outside_deviation = 0;
  double lambda_r2 = 0;
  bool ok = true;
  std::string error;
};

namespace detail {

inline double contour_radius(const GaugePair& slice, cplx zero, const TorusGrid& f2,
                             double level) {
  Spectral sp(f2);
  rvec m2(f2.size());
  for (std::size_t k = 0; k < m2.size(); ++k) m2[k] = std::norm(slice.phi[k]);
  const FourierInterpolant I(sp, m2);
  const double target = level * level;
  const double rmax = 0.5 * std::min(f2.lx(), f2.ly());
  const int rays = 16;
  double sum = 0;
  for (int r = 0; r < rays; ++r) {
    const double th = 2.0 * pi * r / rays;
    auto f = [&](double rho) {
      const cplx p = zero + std::polar(rho, th);
      return I.eval(p.real(), p.imag()).f - target;
    };
    double lo = 0, hi = rmax;
    if (f(lo) > 0 || f(hi) < 0) throw NumericalError("contour_radius: level not bracketed");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0 ? lo : hi) = mid;
    }
    sum += 0.5 * (lo + hi);
  }
  return sum / rays;
}

}  // namespace detail

/// Residuals and localization of vortex lifts along an increasing lambda list.
/// Zeros are given in second-factor coordinates.
inline std::vector<LocalizationEntry> localization_scan(const ModuliPoint& zeros2,
                                                        const std::vector<double>& lambdas,
                                                        const KahlerTorusGrid& g,
                                                        bool parallel = false) {
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    if (k > 0 && !(lambdas[k] > lambdas[k - 1]))
      throw DomainError("localization_scan: lambda list must be increasing");
  const TorusGrid& f2 = g.factor2();
  auto one = [&](double lambda) {
    LocalizationEntry e;
    e.lambda = lambda;
    try {
      const VortexSolution v = solve_lift_vortex(zeros2, lambda, g);
      const SWFields f = vortex_lift(v, lambda, g);
      e.residual = sw_lambda_residual(f, g);
      e.lambda_r2 = lambda * e.residual.r2;
      e.sup_beta = sup_norm(f.beta);
      if (zeros2.degree() > 0) {
        const double vac = sw_vacuum_alpha();
        const GaugePair slice = slice_factor2(f, g);
        e.contour_radius =
            detail::contour_radius(slice, f2.reduce(zeros2.zeros[0]), f2, 0.5 * vac);
        const double R = 5.0 / std::sqrt(lambda);
        for (int j = 0; j < f2.ny(); ++j)
          for (int i = 0; i < f2.nx(); ++i) {
            bool far = true;
            for (cplx z : zeros2.zeros)
              far = far && f2.torus_distance(cplx(f2.x(i), f2.y(j)), z) > R;
            if (far)
              e.outside_deviation = std::max(
                  e.outside_deviation, 1.0 - std::abs(slice.phi[f2.index(i, j)]) / vac);
          }
      }
    } catch (const Error& err) {
      e.ok = false;
      e.error = err.what();
    }
    return e;
  };
  std::vector<LocalizationEntry> out;
  if (parallel) {
    std::vector<std::future<LocalizationEntry>> fut;
    for (double l : lambdas) fut.push_back(std::async(std::launch::async, one, l));
    for (auto& f : fut) out.push_back(f.get());
  } else {
    for (double l : lambdas) out.push_back(one(l));
  }
  return out;
}

}  // namespace vlab
