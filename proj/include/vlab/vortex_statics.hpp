#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vlab/elliptic.hpp"
#include "vlab/field_core.hpp"
#include "vlab/theta.hpp"

namespace vlab {

/// Unordered multiset of vortex positions.
struct ModuliPoint {
  std::vector<cplx> zeros;

  int degree() const { return static_cast<int>(zeros.size()); }

  ModuliPoint reduced(const TorusGrid& g) const {
    ModuliPoint m;
    for (cplx z : zeros) m.zeros.push_back(g.reduce(z));
    return m;
  }
};

struct VortexSolution {
  GaugePair pair;
  ModuliPoint moduli;
  double bogomolny_residual = 0;
  double energy = 0;
  /// Smooth part v of log|phi|^2 = v + log|s|^2; reusable as a warm start.
  rvec v;
  std::vector<double> history;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  const rvec* warm_start = nullptr;
  /// Compute energy and Bogomolny residual of the result.
  bool diagnostics = true;
};

/// Product of theta sections with the prescribed zeros. The zeros are used
/// as given (not reduced), so the result depends smoothly on them.
inline cvec holomorphic_section(const ModuliPoint& m, const TorusGrid& g) {
  cvec s(g.size(), cplx(1.0));
  const int nx = g.nx(), ny = g.ny();
  const double lx = g.lx(), ly = g.ly(), r = ly / lx;
  for (cplx z0 : m.zeros) {
    // theta_section separates into sum_n A_n(y) B_n(x).
    const double s_lo = -z0.imag() / ly, s_hi = (ly - z0.imag()) / ly;
    const double cutoff = std::sqrt(40.0 / (pi * r)) + 1.0;
    const int nlo = static_cast<int>(std::floor(-0.5 - s_hi - cutoff));
    const int nhi = static_cast<int>(std::ceil(-0.5 - s_lo + cutoff));
    const int nt = nhi - nlo + 1;
    std::vector<cplx> B(static_cast<std::size_t>(nt) * nx), A(static_cast<std::size_t>(nt) * ny);
    for (int i = 0; i < nx; ++i) {
      const double xi = pi * (g.x(i) - z0.real()) / lx;
      for (int t = 0; t < nt; ++t) {
        const int n = nlo + t;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        B[static_cast<std::size_t>(t) * nx + i] =
            sign * std::polar(1.0, (2 * n + 1) * xi + pi * g.x(i) / lx);
      }
    }
    for (int j = 0; j < ny; ++j) {
      const double sy = (g.y(j) - z0.imag()) / ly;
      const cplx ph = cplx(0.0, -1.0) * std::polar(1.0, -(pi + 2.0 * pi * z0.real() / lx) * g.y(j) / ly);
      for (int t = 0; t < nt; ++t) {
        const double u = nlo + t + 0.5 + sy;
        A[static_cast<std::size_t>(t) * ny + j] = std::exp(-pi * r * u * u) * ph;
      }
    }
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        cplx acc{};
        for (int t = 0; t < nt; ++t)
          acc += A[static_cast<std::size_t>(t) * ny + j] * B[static_cast<std::size_t>(t) * nx + i];
        s[g.index(i, j)] *= acc;
      }
  }
  return s;
}

/// max(sup |dbar_A phi|, sup |-b - (1 - |phi|^2)/2|), with dbar_A = (D1 + i D2)/2.
inline double bogomolny_residual(const GaugePair& p, const TorusGrid& g) {
  const auto [d1, d2] = covariant_derivative(p, g);
  const auto F = curvature(p, g);
  double r1 = 0, r2 = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    r1 = std::max(r1, 0.5 * std::abs(d1[k] + cplx(0, 1) * d2[k]));
    r2 = std::max(r2, std::abs(-F.b[k] - 0.5 * (1.0 - std::norm(p.phi[k]))));
  }
  return std::max(r1, r2);
}

/// Fields of the vortex with smooth potential v over the section s.
inline GaugePair vortex_fields(const ModuliPoint& m, const rvec& v, const cvec& s,
                               const TorusGrid& g) {
  Spectral sp(g);
  const int d = m.degree();
  const rvec vx = sp.dx(v), vy = sp.dy(v);
  GaugePair p;
  p.degree = d;
  p.a1.resize(g.size());
  p.a2.resize(g.size());
  p.phi.resize(g.size());
  double c2 = 0;
  for (cplx z : m.zeros) c2 += (pi + 2.0 * pi * z.real() / g.lx()) / g.ly();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.index(i, j);
      double c1 = 0;
      for (cplx z : m.zeros) c1 += 2.0 * pi * (g.y(j) - z.imag()) / g.area() - pi / g.lx();
      p.a1[k] = -0.5 * vy[k] + c1;
      p.a2[k] = 0.5 * vx[k] + c2;
      p.phi[k] = std::exp(0.5 * v[k]) * s[k];
    }
  return p;
}

/// The d-vortex with the given zeros. Writing |phi|^2 = exp(v) |s|^2 with s
/// holomorphic reduces the Bogomolny equations to
///   Lap v = exp(v) |s|^2 - 1 + 4 pi d / area,
/// which is solved by damped Newton with a preconditioned CG inner solve.
inline VortexSolution solve_vortex(const ModuliPoint& m, const TorusGrid& g,
                                   const SolveOptions& opt = {}) {
  if (!(opt.tol > 0)) throw DomainError("solve_vortex: tolerance must be positive");
  const int d = m.degree();
  for (cplx z : m.zeros)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw DomainError("solve_vortex: zero positions must be finite");
  if (g.area() <= 4.0 * pi * d)
    throw InfeasibleError("solve_vortex: area " + std::to_string(g.area()) +
                          " does not exceed 4 pi d = " + std::to_string(4.0 * pi * d) +
                          ", no " + std::to_string(d) + "-vortex exists on this torus");

  VortexSolution sol;
  sol.moduli = m.reduced(g);
  if (d == 0) {
    sol.pair = reference_pair(g, 0, 1.0);
    sol.v.assign(g.size(), 0.0);
    sol.energy = 0;
    sol.bogomolny_residual = bogomolny_residual(sol.pair, g);
    return sol;
  }

  Spectral sp(g);
  const cvec s = holomorphic_section(m, g);
  rvec S(g.size());
  double smean = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    S[k] = std::norm(s[k]);
    smean += S[k];
  }
  smean /= static_cast<double>(g.size());

  rvec v(g.size());
  if (opt.warm_start && opt.warm_start->size() == g.size()) {
    v = *opt.warm_start;
  } else {
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = -std::log(S[k] + 0.5 * smean);
  }
  const double c0 = 1.0 - 4.0 * pi * d / g.area();

  auto residual = [&](const rvec& w) {
    rvec r = sp.laplacian(w);
    for (std::size_t k = 0; k < g.size(); ++k) r[k] -= std::exp(w[k]) * S[k] - c0;
    return r;
  };

  // The second Bogomolny residual equals half the Newton residual.
  const double target = 2.0 * opt.tol;
  rvec R = residual(v);
  double rn = sup_norm(R);
  sol.history.push_back(rn);
  int it = 0;
  while (rn >= target) {
    if (it++ >= opt.max_iter)
      throw ConvergenceError("solve_vortex: Newton did not converge in " +
                                 std::to_string(opt.max_iter) + " iterations",
                             sol.history);
    rvec c(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) c[k] = std::exp(v[k]) * S[k];
    const auto cg = solve_screened(sp, c, R, std::max(1e-3 * rn, 0.1 * target));
    double t = 1.0;
    rvec vt(g.size());
    double rt = 0;
    rvec Rt;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t k = 0; k < g.size(); ++k) vt[k] = v[k] + t * cg.x[k];
      Rt = residual(vt);
      rt = sup_norm(Rt);
      if (std::isfinite(rt) && rt < rn) break;
      t *= 0.5;
    }
    if (!(rt < rn)) {
      sol.history.push_back(rt);
      throw ConvergenceError("solve_vortex: line search failed to reduce the residual",
                             sol.history);
    }
    v.swap(vt);
    R.swap(Rt);
    rn = rt;
    sol.history.push_back(rn);
  }

  sol.pair = vortex_fields(m, v, s, g);
  sol.v = std::move(v);
  if (opt.diagnostics) {
    sol.energy = potential_energy(sol.pair, g);
    sol.bogomolny_residual = bogomolny_residual(sol.pair, g);
  }
  return sol;
}

inline VortexSolution solve_vortex(const ModuliPoint& m, const TorusGrid& g, double tol) {
  SolveOptions o;
  o.tol = tol;
  return solve_vortex(m, g, o);
}

/// Coefficients c_{d-1}, ..., c_0 of prod (z - z_k) = z^d + c_{d-1} z^{d-1} + ... + c_0.
inline std::vector<cplx> moduli_to_polynomial(const ModuliPoint& m) {
  std::vector<cplx> p{1.0};  // highest degree first
  for (cplx z : m.zeros) {
    std::vector<cplx> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k] += p[k];
      q[k + 1] -= z * p[k];
    }
    p.swap(q);
  }
  return {p.begin() + 1, p.end()};
}

/// Roots of the monic polynomial with the given lower coefficients, via the
/// companion matrix, polished by Newton.
inline ModuliPoint polynomial_to_moduli(const std::vector<cplx>& c) {
  const int d = static_cast<int>(c.size());
  ModuliPoint m;
  if (d == 0) return m;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) C(0, k) = -c[k];
  for (int k = 1; k < d; ++k) C(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  for (int k = 0; k < d; ++k) {
    cplx z = es.eigenvalues()[k];
    for (int it = 0; it < 3; ++it) {
      cplx f = 1.0, df = 0.0;
      for (int j = 0; j < d; ++j) {
        df = df * z + f;
        f = f * z + c[j];
      }
      if (std::abs(df) < 1e-12) break;
      z -= f / df;
    }
    m.zeros.push_back(z);
  }
  return m;
}

/// One zero found by locate_zeros.
struct LocatedZero {
  cplx position;
  int multiplicity = 1;
  bool precise = true;  // false when refinement fell back to the plaquette centre
};

struct ZeroReport {
  ModuliPoint moduli;  // positions repeated by multiplicity
  std::vector<LocatedZero> zeros;
};

namespace detail {

// Principal phase increment from a to b.
inline double phase_step(cplx a, cplx b) { return std::arg(b * std::conj(a)); }

}  // namespace detail

/// Zeros of phi from plaquette winding numbers, refined by Newton minimization
/// of the trigonometric interpolant of |phi|^2. The windings always sum to
/// the degree.
inline ZeroReport locate_zeros(const GaugePair& p, const TorusGrid& g) {
  p.check(g);
  const int nx = g.nx(), ny = g.ny(), d = p.degree;
  auto at = [&](int i, int j) { return p.phi[g.index(i % nx, j % ny)]; };

  // Horizontal edge increments on rows 0..ny-1; row ny is row 0 shifted by
  // the exact seam cocycle exp(-2 pi i d x / lx).
  std::vector<double> hinc(static_cast<std::size_t>(nx) * ny), vinc(hinc.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      hinc[g.index(i, j)] = detail::phase_step(at(i, j), at(i + 1, j));
      cplx top = at(i, j + 1);
      if (j + 1 == ny) top *= std::polar(1.0, -2.0 * pi * d * g.x(i) / g.lx());
      vinc[g.index(i, j)] = detail::phase_step(at(i, j), top);
    }
  const double seam = -2.0 * pi * d * g.hx() / g.lx();
  auto h_edge = [&](int i, int j) {
    return j == ny ? hinc[g.index(i, 0)] + seam : hinc[g.index(i, j)];
  };

  struct Cell {
    int i, j, w;
  };
  std::vector<Cell> pos, neg;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double s = h_edge(i, j) + vinc[g.index((i + 1) % nx, j)] - h_edge(i, j + 1) -
                       vinc[g.index(i, j)];
      const int w = static_cast<int>(std::lround(s / (2.0 * pi)));
      if (w > 0) pos.push_back({i, j, w});
      if (w < 0) neg.push_back({i, j, -w});
    }

  auto centre = [&](const Cell& c) { return cplx(g.x(c.i) + 0.5 * g.hx(), g.y(c.j) + 0.5 * g.hy()); };
  // Cancel spurious +/- pairs against their nearest partner.
  for (auto& n : neg) {
    while (n.w > 0) {
      double best = 1e300;
      Cell* bp = nullptr;
      for (auto& c : pos)
        if (c.w > 0) {
          const double dd = g.torus_distance(centre(c), centre(n));
          if (dd < best) best = dd, bp = &c;
        }
      if (!bp) break;
      --bp->w;
      --n.w;
    }
  }

  Spectral sp(g);
  rvec mod2(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) mod2[k] = std::norm(p.phi[k]);
  std::optional<FourierInterpolant> interp;

  ZeroReport rep;
  std::vector<bool> degenerate;
  for (const auto& c : pos) {
    if (c.w <= 0) continue;
    if (!interp) interp.emplace(sp, mod2);
    // Bilinear start inside the cell.
    cplx f00 = at(c.i, c.j), f10 = at(c.i + 1, c.j), f01 = at(c.i, c.j + 1), f11 = at(c.i + 1, c.j + 1);
    if (c.j + 1 == ny) {
      f01 *= std::polar(1.0, -2.0 * pi * d * g.x(c.i) / g.lx());
      f11 *= std::polar(1.0, -2.0 * pi * d * (c.i + 1) * g.hx() / g.lx());
    }
    double s = 0.5, t = 0.5;
    for (int it = 0; it < 20; ++it) {
      const cplx f = f00 * (1 - s) * (1 - t) + f10 * s * (1 - t) + f01 * (1 - s) * t + f11 * s * t;
      const cplx fs = (f10 - f00) * (1 - t) + (f11 - f01) * t;
      const cplx ft = (f01 - f00) * (1 - s) + (f11 - f10) * s;
      const double det = (std::conj(fs) * ft).imag();
      if (std::abs(det) < 1e-300) break;
      // Solve fs ds + ft dt = -f over the reals.
      const double ds = -(std::conj(f) * ft).imag() / det;
      const double dt = (std::conj(f) * fs).imag() / det;
      s = std::clamp(s + ds, -0.5, 1.5);
      t = std::clamp(t + dt, -0.5, 1.5);
    }
    double x = g.x(c.i) + s * g.hx(), y = g.y(c.j) + t * g.hy();

    // Damped Newton on the interpolated |phi|^2, kept within two cells.
    const double x0 = x, y0 = y;
    bool precise = true;
    double mu = 0;
    for (int it = 0; it < 60; ++it) {
      const auto e = interp->eval(x, y);
      const double a = e.fxx + mu, b = e.fxy, cc = e.fyy + mu;
      const double det = a * cc - b * b;
      if (!(det > 0) || a <= 0) {
        mu = mu == 0 ? 1e-8 : 10 * mu;
        if (mu > 1e8) break;
        continue;
      }
      const double dx = -(cc * e.fx - b * e.fy) / det;
      const double dy = -(a * e.fy - b * e.fx) / det;
      const auto e2 = interp->eval(x + dx, y + dy);
      if (e2.f <= e.f) {
        x += dx;
        y += dy;
        mu *= 0.1;
        if (std::hypot(dx, dy) < 1e-13 * g.h()) break;
      } else {
        mu = mu == 0 ? 1e-8 * (std::abs(e.fxx) + std::abs(e.fyy) + 1e-30) : 10 * mu;
        if (mu > 1e8) break;
      }
    }
    const auto fin = interp->eval(x, y);
    const double hmin = 0.5 * (fin.fxx + fin.fyy - std::hypot(fin.fxx - fin.fyy, 2 * fin.fxy));
    const bool fallback = std::hypot(x - x0, y - y0) > 2.0 * g.h() || !std::isfinite(x) || !std::isfinite(y);
    if (fallback) {
      x = g.x(c.i) + 0.5 * g.hx();
      y = g.y(c.j) + 0.5 * g.hy();
      precise = false;
    } else if (c.w == 1 && hmin < 1e-6) {
      precise = false;
    }
    rep.zeros.push_back({g.reduce({x, y}), c.w, precise});
    degenerate.push_back(!fallback && c.w == 1 && hmin < 1e-6);
  }

  // A multiple zero splits into nearby simple ones with a flat Hessian; merge
  // anything closer than one cell into a single zero.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < rep.zeros.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < rep.zeros.size() && !merged; ++b) {
        auto& za = rep.zeros[a];
        const auto& zb = rep.zeros[b];
        if (g.torus_distance(za.position, zb.position) >= g.h()) continue;
        const int m = za.multiplicity + zb.multiplicity;
        const cplx mid = za.position + g.min_image(zb.position - za.position) * (double(zb.multiplicity) / m);
        const bool ok = (za.precise || degenerate[a]) && (zb.precise || degenerate[b]);
        za = {g.reduce(mid), m, ok};
        degenerate[a] = false;
        rep.zeros.erase(rep.zeros.begin() + b);
        degenerate.erase(degenerate.begin() + b);
        merged = true;
      }
  }
  for (const auto& z : rep.zeros)
    for (int k = 0; k < z.multiplicity; ++k) rep.moduli.zeros.push_back(z.position);
  return rep;
}

}  // namespace vlab
