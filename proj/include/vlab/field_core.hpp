#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "vlab/spectral.hpp"

namespace vlab {

/// A U(1) connection A = i (a1 dx + a2 dy) and a section phi of the degree-d
/// bundle on the torus.
///
/// Storing the real coefficients a1, a2 keeps A purely imaginary by
/// construction; from_imaginary() is the checked entry point for callers that
/// hold imaginary samples.
///
/// Seam conventions:
///   phi(x + lx, y) = phi(x, y)
///   phi(x, y + ly) = exp(-2 pi i d x / lx) phi(x, y)
///   a1(x, y + ly)  = a1(x, y) + 2 pi d / lx,   a2 periodic.
/// Gauge transforms act by a -> a + d chi, phi -> exp(-i chi) phi.
struct GaugePair {
  int degree = 0;
  rvec a1, a2;
  cvec phi;

  /// Builds a pair from imaginary connection samples. Any sample with
  /// |Re A| > tol is rejected.
  static GaugePair from_imaginary(int degree, const cvec& A1, const cvec& A2, cvec phi,
                                  double tol = 0.0) {
    GaugePair p;
    p.degree = degree;
    p.a1.resize(A1.size());
    p.a2.resize(A2.size());
    for (std::size_t k = 0; k < A1.size(); ++k) {
      if (std::abs(A1[k].real()) > tol)
        throw InconsistencyError("GaugePair: A1 has a nonzero real part at sample " +
                                 std::to_string(k));
      p.a1[k] = A1[k].imag();
    }
    for (std::size_t k = 0; k < A2.size(); ++k) {
      if (std::abs(A2[k].real()) > tol)
        throw InconsistencyError("GaugePair: A2 has a nonzero real part at sample " +
                                 std::to_string(k));
      p.a2[k] = A2[k].imag();
    }
    p.phi = std::move(phi);
    return p;
  }

  cvec A1() const { return imaginary(a1); }
  cvec A2() const { return imaginary(a2); }

  void check(const TorusGrid& g) const {
    check_size(a1, g, "GaugePair.A1");
    check_size(a2, g, "GaugePair.A2");
    check_size(phi, g, "GaugePair.phi");
  }

  static cvec imaginary(const rvec& a) {
    cvec out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = cplx(0.0, a[k]);
    return out;
  }
};

/// Curvature F12 = i b with b = d1 a2 - d2 a1.
struct Field2Form {
  rvec b;
  cvec F12() const { return GaugePair::imaginary(b); }
};

/// Uniform-flux connection of degree d, a1 = 2 pi d y / area, a2 = 0,
/// with phi set to the constant `phi0` (must be 0 unless d == 0).
inline GaugePair reference_pair(const TorusGrid& g, int d, cplx phi0 = 0.0) {
  if (d != 0 && phi0 != cplx(0.0))
    throw DomainError("reference_pair: a nonzero constant is not a section of a twisted bundle");
  GaugePair p;
  p.degree = d;
  p.a1.assign(g.size(), 0.0);
  p.a2.assign(g.size(), 0.0);
  p.phi.assign(g.size(), phi0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) p.a1[g.index(i, j)] = 2.0 * pi * d * g.y(j) / g.area();
  return p;
}

inline Field2Form curvature(const GaugePair& p, const TorusGrid& g) {
  p.check(g);
  Spectral sp(g);
  rvec b = sp.dx(p.a2);
  rvec d2a1 = sp.dy_a1(p.a1, p.degree);
  for (std::size_t k = 0; k < b.size(); ++k) b[k] -= d2a1[k];
  return {std::move(b)};
}

/// (D1 phi, D2 phi) with D_j = d_j + A_j = d_j + i a_j.
inline std::pair<cvec, cvec> covariant_derivative(const GaugePair& p, const TorusGrid& g) {
  p.check(g);
  Spectral sp(g);
  cvec d1 = sp.dx(p.phi);
  cvec d2 = sp.dy_section(p.phi, p.degree);
  for (std::size_t k = 0; k < d1.size(); ++k) {
    d1[k] += cplx(0.0, p.a1[k]) * p.phi[k];
    d2[k] += cplx(0.0, p.a2[k]) * p.phi[k];
  }
  return {std::move(d1), std::move(d2)};
}

/// U = 1/2 int { |F12|^2 + |D1 phi|^2 + |D2 phi|^2 + 1/4 (1 - |phi|^2)^2 }.
inline double potential_energy(const GaugePair& p, const TorusGrid& g) {
  const auto F = curvature(p, g);
  const auto [d1, d2] = covariant_derivative(p, g);
  double s = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double m = 1.0 - std::norm(p.phi[k]);
    s += F.b[k] * F.b[k] + std::norm(d1[k]) + std::norm(d2[k]) + 0.25 * m * m;
  }
  return 0.5 * g.weight() * s;
}

/// (i / 2 pi) int F, which is an integer for every admissible pair.
inline double flux(const GaugePair& p, const TorusGrid& g) {
  const auto F = curvature(p, g);
  double s = 0;
  for (double v : F.b) s += v;
  return -s * g.weight() / (2.0 * pi);
}

inline int vortex_number(const GaugePair& p, const TorusGrid& g) {
  const double f = flux(p, g);
  if (!std::isfinite(f)) throw InconsistencyError("vortex_number: flux is not finite");
  const double r = std::round(f);
  if (std::abs(f - r) > 1e-6)
    throw InconsistencyError("vortex_number: flux " + std::to_string(f) + " is not integral");
  const int n = static_cast<int>(r);
  if (n != p.degree)
    throw InconsistencyError("vortex_number: flux " + std::to_string(n) +
                             " disagrees with stored degree " + std::to_string(p.degree));
  return n;
}

/// Rejects gauge functions whose spectrum does not decay, which is how a jump
/// across the seam (non-periodic chi) shows up on the grid.
inline void check_smooth_periodic(const rvec& chi, const TorusGrid& g, const char* who) {
  Spectral sp(g);
  const cvec c = sp.forward(Spectral::to_complex(chi));
  double peak = 0, tail = 0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const int mi = std::abs((i <= g.nx() / 2) ? i : i - g.nx());
      const int mj = std::abs((j <= g.ny() / 2) ? j : j - g.ny());
      const double a = std::abs(c[g.index(i, j)]);
      peak = std::max(peak, a);
      if (3 * mi > g.nx() || 3 * mj > g.ny()) tail = std::max(tail, a);
    }
  if (tail > 1e-8 * peak + 1e-300)
    throw DomainError(std::string(who) +
                      ": gauge function is not smooth and periodic (spectral tail " +
                      std::to_string(tail / peak) + ")");
}

/// a -> a + d chi, phi -> exp(-i chi) phi for a smooth periodic chi.
inline GaugePair gauge_transform(const GaugePair& p, const rvec& chi, const TorusGrid& g) {
  p.check(g);
  check_size(chi, g, "gauge_transform.chi");
  check_smooth_periodic(chi, g, "gauge_transform");
  Spectral sp(g);
  const rvec cx = sp.dx(chi), cy = sp.dy(chi);
  GaugePair q = p;
  for (std::size_t k = 0; k < g.size(); ++k) {
    q.a1[k] += cx[k];
    q.a2[k] += cy[k];
    q.phi[k] *= std::polar(1.0, -chi[k]);
  }
  return q;
}

/// First variation of U per unit area:
///   dU = int { Re(conj(r_phi) dphi) + r1 da1 + r2 da2 }.
/// The connection residuals r1, r2 are the real coefficients of the imaginary
/// components (the A-residual is i r_j).
struct ElResidual {
  cvec phi;
  rvec a1, a2;

  double sup() const { return std::max({sup_norm(phi), sup_norm(a1), sup_norm(a2)}); }
};

inline ElResidual el_residual(const GaugePair& p, const TorusGrid& g) {
  p.check(g);
  Spectral sp(g);
  const auto F = curvature(p, g);
  const auto [d1, d2] = covariant_derivative(p, g);
  cvec dd1 = sp.dx(d1);
  cvec dd2 = sp.dy_section(d2, p.degree);
  for (std::size_t k = 0; k < g.size(); ++k) {
    dd1[k] += cplx(0.0, p.a1[k]) * d1[k];
    dd2[k] += cplx(0.0, p.a2[k]) * d2[k];
  }

  ElResidual r;
  r.phi.resize(g.size());
  r.a1 = sp.dy(F.b);
  r.a2 = sp.dx(F.b);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const cplx f = p.phi[k];
    r.phi[k] = -(dd1[k] + dd2[k]) - 0.5 * (1.0 - std::norm(f)) * f;
    r.a1[k] += std::imag(std::conj(f) * d1[k]);
    r.a2[k] = -r.a2[k] + std::imag(std::conj(f) * d2[k]);
  }
  return r;
}

}  // namespace vlab
