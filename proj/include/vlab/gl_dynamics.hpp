#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "vlab/elliptic.hpp"
#include "vlab/field_core.hpp"

namespace vlab {

/// Fields and velocities in temporal gauge. The connection velocity is
/// dA_j/dt = i va_j.
struct DynState {
  GaugePair pair;
  rvec va1, va2;
  cvec vphi;
  double t = 0;

  /// State at rest.
  static DynState at_rest(GaugePair p, double t = 0) {
    DynState s;
    const std::size_t n = p.phi.size();
    s.pair = std::move(p);
    s.va1.assign(n, 0.0);
    s.va2.assign(n, 0.0);
    s.vphi.assign(n, 0.0);
    s.t = t;
    return s;
  }

  void check(const TorusGrid& g) const {
    pair.check(g);
    check_size(va1, g, "DynState.va1");
    check_size(va2, g, "DynState.va2");
    check_size(vphi, g, "DynState.vphi");
  }
};

/// Raised when the evolution produces non-finite values. Carries the last
/// state that was still finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, DynState last_good)
      : Error(what), last_(std::move(last_good)) {}
  const DynState& last_good() const noexcept { return last_; }

 private:
  DynState last_;
};

struct EnergyReport {
  double T = 0, U = 0, total = 0, gauss_residual = 0, t = 0;
};

/// T = 1/2 int { |dA1/dt|^2 + |dA2/dt|^2 + |dphi/dt|^2 }.
inline double kinetic_energy(const DynState& s, const TorusGrid& g) {
  s.check(g);
  double sum = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    sum += s.va1[k] * s.va1[k] + s.va2[k] * s.va2[k] + std::norm(s.vphi[k]);
  return 0.5 * g.weight() * sum;
}

/// G = D1 va1 + D2 va2 + Im(conj(phi) dphi/dt); the imaginary Gauss law
/// residual is i G.
inline rvec gauss_field(const GaugePair& p, const rvec& va1, const rvec& va2, const cvec& vphi,
                        const TorusGrid& g) {
  Spectral sp(g);
  rvec G = sp.dx(va1);
  const rvec d2 = sp.dy(va2);
  for (std::size_t k = 0; k < g.size(); ++k)
    G[k] += d2[k] + std::imag(std::conj(p.phi[k]) * vphi[k]);
  return G;
}

inline double gauss_residual(const DynState& s, const TorusGrid& g) {
  s.check(g);
  return sup_norm(gauss_field(s.pair, s.va1, s.va2, s.vphi, g));
}

/// Removes the gauge component of a velocity field: solves
/// (|phi|^2 - Lap) chi = G and applies the infinitesimal gauge motion
/// (va, vphi) += (d chi, -i chi phi). The result is the L2-nearest velocity
/// with G = 0.
inline void remove_gauge_component(const GaugePair& p, rvec& va1, rvec& va2, cvec& vphi,
                                   const TorusGrid& g, double tol = 1e-13) {
  Spectral sp(g);
  const rvec G = gauss_field(p, va1, va2, vphi, g);
  rvec c(g.size());
  double cmax = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    c[k] = std::norm(p.phi[k]);
    cmax = std::max(cmax, c[k]);
  }
  rvec chi;
  if (cmax == 0.0) {
    chi = sp.apply_symbol(G, [&](int i, int j) {
      const double s = sp.laplace_symbol(i, j);
      return s == 0.0 ? 0.0 : 1.0 / s;
    });
    for (double& x : chi) x = -x;
  } else {
    chi = solve_screened(sp, c, G, tol * std::max(1.0, sup_norm(G))).x;
  }
  const rvec cx = sp.dx(chi), cy = sp.dy(chi);
  for (std::size_t k = 0; k < g.size(); ++k) {
    va1[k] += cx[k];
    va2[k] += cy[k];
    vphi[k] -= cplx(0.0, chi[k]) * p.phi[k];
  }
}

inline DynState project_constraint(const DynState& s, const TorusGrid& g) {
  s.check(g);
  DynState out = s;
  remove_gauge_component(out.pair, out.va1, out.va2, out.vphi, g);
  return out;
}

/// Largest stable step: the grid bound min(h)/sqrt(2), tightened by the
/// leapfrog limit 2 / omega_max of the spectral wave operator.
inline double max_stable_dt(const TorusGrid& g) {
  const double kx = pi / g.hx(), ky = pi / g.hy();
  const double omega = std::sqrt(kx * kx + ky * ky + 1.0);
  return std::min(std::min(g.hx(), g.hy()) / std::sqrt(2.0), 2.0 / omega);
}

struct EvolveOptions {
  /// Called after every `every` steps with the current state.
  std::function<void(const DynState&)> observer;
  int every = 1;
  /// Entry check on the Gauss law; negative disables it.
  double gauss_tol = 1e-6;
};

/// Velocity-Verlet (leapfrog) integration in temporal gauge:
///   d2 a_j / dt2 = -r_j,  d2 phi / dt2 = -r_phi,
/// with (r_phi, r_j) the variation of U from el_residual. Written out this is
///   d2 a1/dt2 = -D2 b - Im(conj(phi) D1 phi),  d2 a2/dt2 = D1 b - Im(conj(phi) D2 phi),
///   d2 phi/dt2 = (D1^2 + D2^2) phi + 1/2 (1 - |phi|^2) phi.
inline DynState evolve(const DynState& s0, double dt, int steps, const TorusGrid& g,
                       const EvolveOptions& opt = {}) {
  s0.check(g);
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("evolve: dt must be positive");
  if (steps < 0) throw DomainError("evolve: negative step count");
  const double dtmax = max_stable_dt(g);
  if (dt >= dtmax)
    throw DomainError("evolve: dt = " + std::to_string(dt) + " violates the stability bound " +
                      std::to_string(dtmax));
  if (opt.gauss_tol >= 0) {
    const double G = gauss_residual(s0, g);
    if (G > opt.gauss_tol)
      throw DomainError("evolve: initial data violate the Gauss law (residual " +
                        std::to_string(G) + "); project_constraint first");
  }

  DynState s = s0;
  const std::size_t n = g.size();
  ElResidual f = el_residual(s.pair, g);
  for (int step = 1; step <= steps; ++step) {
    DynState prev = s;
    for (std::size_t k = 0; k < n; ++k) {
      s.va1[k] -= 0.5 * dt * f.a1[k];
      s.va2[k] -= 0.5 * dt * f.a2[k];
      s.vphi[k] -= 0.5 * dt * f.phi[k];
      s.pair.a1[k] += dt * s.va1[k];
      s.pair.a2[k] += dt * s.va2[k];
      s.pair.phi[k] += dt * s.vphi[k];
    }
    f = el_residual(s.pair, g);
    bool finite = true;
    for (std::size_t k = 0; k < n; ++k) {
      s.va1[k] -= 0.5 * dt * f.a1[k];
      s.va2[k] -= 0.5 * dt * f.a2[k];
      s.vphi[k] -= 0.5 * dt * f.phi[k];
      if (!std::isfinite(s.vphi[k].real()) || !std::isfinite(s.vphi[k].imag()) ||
          !std::isfinite(s.va1[k]) || !std::isfinite(s.va2[k]))
        finite = false;
    }
    s.t = s0.t + step * dt;
    if (!finite)
      throw DivergenceError("evolve: non-finite fields at t = " + std::to_string(s.t),
                            std::move(prev));
    if (opt.observer && step % std::max(1, opt.every) == 0) opt.observer(s);
  }
  return s;
}

inline EnergyReport energy_report(const DynState& s, const TorusGrid& g) {
  EnergyReport r;
  r.T = kinetic_energy(s, g);
  r.U = potential_energy(s.pair, g);
  r.total = r.T + r.U;
  r.gauss_residual = gauss_residual(s, g);
  r.t = s.t;
  return r;
}

}  // namespace vlab
