#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vlab/gl_dynamics.hpp"
#include "vlab/vortex_statics.hpp"

namespace vlab {

/// Coordinates on the moduli space. Positions: (Re z1, Im z1, Re z2, ...).
/// Coefficients: (Re c_{d-1}, Im c_{d-1}, ..., Re c_0, Im c_0) of the monic
/// polynomial with roots z_k; smooth through coincident zeros.
enum class Chart { positions, coefficients };

inline const char* chart_name(Chart c) {
  return c == Chart::positions ? "positions" : "coefficients";
}

inline std::vector<double> chart_coords(const ModuliPoint& m, Chart c) {
  std::vector<double> x;
  const std::vector<cplx> src = c == Chart::positions ? m.zeros : moduli_to_polynomial(m);
  for (cplx z : src) {
    x.push_back(z.real());
    x.push_back(z.imag());
  }
  return x;
}

inline ModuliPoint chart_point(const std::vector<double>& x, Chart c) {
  std::vector<cplx> z;
  for (std::size_t k = 0; k + 1 < x.size(); k += 2) z.emplace_back(x[k], x[k + 1]);
  if (c == Chart::positions) return ModuliPoint{z};
  return polynomial_to_moduli(z);
}

/// Complex Jacobian dc/dz of the coefficient map at the given zeros; row m
/// holds c_{d-1-m}.
inline Eigen::MatrixXcd coefficient_jacobian(const ModuliPoint& m) {
  const int d = m.degree();
  Eigen::MatrixXcd J(d, d);
  for (int j = 0; j < d; ++j) {
    ModuliPoint rest;
    for (int k = 0; k < d; ++k)
      if (k != j) rest.zeros.push_back(m.zeros[k]);
    // c_{d-r} = (-1)^r e_r, so dc_{d-r}/dz_j = (-1)^r e_{r-1}(rest).
    const std::vector<cplx> e = moduli_to_polynomial(rest);  // (-1)^s e_s, s = 1..d-1
    for (int r = 1; r <= d; ++r) {
      const cplx er1 = r == 1 ? cplx(1.0) : e[r - 2] * ((r - 1) % 2 == 0 ? 1.0 : -1.0);
      J(r - 1, j) = (r % 2 == 0 ? 1.0 : -1.0) * er1;
    }
  }
  return J;
}

/// Maps a real velocity between charts at the point m.
inline std::vector<double> convert_velocity(const ModuliPoint& m, const std::vector<double>& v,
                                            Chart from, Chart to) {
  if (from == to) return v;
  const int d = m.degree();
  Eigen::VectorXcd w(d);
  for (int k = 0; k < d; ++k) w(k) = cplx(v[2 * k], v[2 * k + 1]);
  const Eigen::MatrixXcd J = coefficient_jacobian(m);
  Eigen::VectorXcd out = from == Chart::positions ? Eigen::VectorXcd(J * w)
                                                  : Eigen::VectorXcd(J.fullPivLu().solve(w));
  std::vector<double> r(2 * d);
  for (int k = 0; k < d; ++k) {
    r[2 * k] = out(k).real();
    r[2 * k + 1] = out(k).imag();
  }
  return r;
}

struct MetricOptions {
  /// Moduli-space step of the central differences.
  double delta = 1e-2;
  double solve_tol = 1e-11;
  /// Repeat the metric at delta/2 and flag samples that differ by > 1%.
  bool richardson = false;
  Chart chart = Chart::positions;
};

struct TangentSolution {
  rvec da1, da2;
  cvec dphi;
  ModuliPoint moduli;
  std::vector<double> direction;
  double orthogonality_residual = 0;
};

struct MetricSample {
  ModuliPoint moduli;
  Eigen::MatrixXd g;
  Chart chart = Chart::positions;
  bool flagged = false;
  double richardson_difference = 0;
};

/// Vortex solutions over a neighbourhood of moduli space, memoized by chart
/// coordinates so that overlapping difference stencils share solves.
class VortexFamily {
 public:
  VortexFamily(const TorusGrid& g, MetricOptions opt, rvec warm = {})
      : g_(g), opt_(opt), warm_(std::move(warm)) {}

  const TorusGrid& grid() const { return g_; }
  const MetricOptions& options() const { return opt_; }

  const VortexSolution& solution(const std::vector<double>& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return *it->second;
    SolveOptions so;
    so.tol = opt_.solve_tol;
    so.diagnostics = false;
    so.warm_start = warm_.empty() ? nullptr : &warm_;
    auto sol = std::make_unique<VortexSolution>(solve_vortex(chart_point(x, opt_.chart), g_, so));
    if (warm_.empty()) warm_ = sol->v;
    return *cache_.emplace(x, std::move(sol)).first->second;
  }

  void clear() { cache_.clear(); }
  const rvec& warm_start() const { return warm_; }

  /// Gauge-projected derivatives of the fields along each chart coordinate.
  std::vector<TangentSolution> partials(const std::vector<double>& x, double delta) {
    const VortexSolution& base = solution(x);
    std::vector<TangentSolution> out;
    for (std::size_t a = 0; a < x.size(); ++a) {
      std::vector<double> xp = x, xm = x;
      xp[a] += delta;
      xm[a] -= delta;
      const GaugePair& P = solution(xp).pair;
      const GaugePair& M = solution(xm).pair;
      TangentSolution t;
      t.moduli = chart_point(x, opt_.chart);
      t.direction.assign(x.size(), 0.0);
      t.direction[a] = 1.0;
      t.da1.resize(g_.size());
      t.da2.resize(g_.size());
      t.dphi.resize(g_.size());
      const double s = 0.5 / delta;
      for (std::size_t k = 0; k < g_.size(); ++k) {
        t.da1[k] = s * (P.a1[k] - M.a1[k]);
        t.da2[k] = s * (P.a2[k] - M.a2[k]);
        t.dphi[k] = s * (P.phi[k] - M.phi[k]);
      }
      remove_gauge_component(base.pair, t.da1, t.da2, t.dphi, g_, 1e-11);
      t.orthogonality_residual = sup_norm(gauss_field(base.pair, t.da1, t.da2, t.dphi, g_));
      out.push_back(std::move(t));
    }
    return out;
  }

  Eigen::MatrixXd metric(const std::vector<double>& x, double delta) {
    const auto t = partials(x, delta);
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXd G(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        double s = 0;
        for (std::size_t k = 0; k < g_.size(); ++k)
          s += std::real(t[a].dphi[k] * std::conj(t[b].dphi[k])) + t[a].da1[k] * t[b].da1[k] +
               t[a].da2[k] * t[b].da2[k];
        G(a, b) = G(b, a) = s * g_.weight();
      }
    return G;
  }

 private:
  TorusGrid g_;
  MetricOptions opt_;
  rvec warm_;
  std::map<std::vector<double>, std::unique_ptr<VortexSolution>> cache_;
};

/// Gauge-orthogonal tangent to the vortex family along `direction` (chart
/// coordinates), the linear combination of the projected partial derivatives.
inline TangentSolution tangent_solution(const ModuliPoint& m, const std::vector<double>& direction,
                                        const TorusGrid& g, const MetricOptions& opt = {}) {
  if (direction.size() != 2 * m.zeros.size())
    throw ShapeError("tangent_solution: direction must have 2d components");
  VortexFamily fam(g, opt);
  TangentSolution t;
  t.moduli = m;
  t.direction = direction;
  t.da1.assign(g.size(), 0.0);
  t.da2.assign(g.size(), 0.0);
  t.dphi.assign(g.size(), 0.0);
  if (m.degree() == 0) return t;
  const auto x = chart_coords(m, opt.chart);
  const auto parts = fam.partials(x, opt.delta);
  for (std::size_t a = 0; a < parts.size(); ++a) {
    const double c = direction[a];
    if (c == 0.0) continue;
    for (std::size_t k = 0; k < g.size(); ++k) {
      t.da1[k] += c * parts[a].da1[k];
      t.da2[k] += c * parts[a].da2[k];
      t.dphi[k] += c * parts[a].dphi[k];
    }
  }
  const auto& base = fam.solution(x).pair;
  t.orthogonality_residual = sup_norm(gauss_field(base, t.da1, t.da2, t.dphi, g));
  return t;
}

/// Kinetic metric g_ab = int { Re(d_a phi conj(d_b phi)) + d_a a . d_b a } so
/// that T = 1/2 qdot^T g qdot.
inline MetricSample metric_at(const ModuliPoint& m, const TorusGrid& g,
                              const MetricOptions& opt = {}) {
  MetricSample s;
  s.moduli = m;
  s.chart = opt.chart;
  if (m.degree() == 0) {
    s.g = Eigen::MatrixXd(0, 0);
    return s;
  }
  VortexFamily fam(g, opt);
  const auto x = chart_coords(m, opt.chart);
  s.g = fam.metric(x, opt.delta);
  if (opt.richardson) {
    const Eigen::MatrixXd h = fam.metric(x, 0.5 * opt.delta);
    s.richardson_difference = (h - s.g).norm() / s.g.norm();
    s.flagged = s.richardson_difference > 0.01;
  }
  return s;
}

/// Raised when the metric is too close to singular for the active chart.
class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct GeodesicOptions {
  double dtau = 0.02;
  MetricOptions metric;
  /// The coefficient chart is used while the smallest separation is below
  /// max(switch_at * h, switch_length); positions resume above
  /// switch_back times that threshold.
  double switch_at = 4.0;
  double switch_length = 2.0;
  double switch_back = 1.5;
  /// Output every n-th step.
  int record_every = 1;
};

struct GeodesicPoint {
  double tau = 0;
  ModuliPoint moduli;
  Chart chart = Chart::positions;
  std::vector<double> coords, velocity;  // in the active chart
  double speed2 = 0;                     // qdot^T g qdot
};

struct GeodesicResult {
  std::vector<GeodesicPoint> path;
  bool complete = true;
  std::string error;
};

inline double min_separation(const ModuliPoint& m, const TorusGrid& g) {
  double s = 1e300;
  for (std::size_t a = 0; a < m.zeros.size(); ++a)
    for (std::size_t b = a + 1; b < m.zeros.size(); ++b)
      s = std::min(s, g.torus_distance(m.zeros[a], m.zeros[b]));
  return s;
}

namespace detail {

struct GeodesicRhs {
  const TorusGrid& g;
  const GeodesicOptions& opt;
  Chart chart;
  rvec* warm;

  // Returns (acceleration, metric at x).
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> operator()(const std::vector<double>& x,
                                                          const Eigen::VectorXd& v) const {
    MetricOptions mo = opt.metric;
    mo.chart = chart;
    VortexFamily fam(g, mo, *warm);
    const double delta = mo.delta;
    const int n = static_cast<int>(x.size());
    const Eigen::MatrixXd G = fam.metric(x, delta);
    check_conditioning(G);
    std::vector<Eigen::MatrixXd> dG(n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> xp = x, xm = x;
      xp[c] += delta;
      xm[c] -= delta;
      dG[c] = (fam.metric(xp, delta) - fam.metric(xm, delta)) / (2.0 * delta);
    }
    Eigen::VectorXd rhs(n);
    Eigen::MatrixXd vdG = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < n; ++c) vdG += v(c) * dG[c];
    for (int a = 0; a < n; ++a) rhs(a) = 0.5 * v.dot(dG[a] * v);
    rhs -= vdG * v;
    *warm = fam.warm_start();
    return {G.ldlt().solve(rhs), G};
  }

  static void check_conditioning(const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double tr = G.trace();
    if (es.eigenvalues().minCoeff() < 1e-6 * tr)
      throw ConditioningError("geodesic: metric eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()) +
                              " below 1e-6 of the trace");
  }
};

}  // namespace detail

/// Geodesic of the kinetic metric from m0 with position-chart velocity v0,
/// integrated by classical RK4 in slow time up to tau_end. The chart switches
/// to polynomial coefficients while zeros are close.
inline GeodesicResult geodesic(const ModuliPoint& m0, const std::vector<double>& v0,
                               double tau_end, const TorusGrid& g,
                               const GeodesicOptions& opt = {}) {
  if (!(tau_end > 0)) throw DomainError("geodesic: tau_end must be positive");
  if (v0.size() != 2 * m0.zeros.size())
    throw ShapeError("geodesic: velocity must have 2d components");
  GeodesicResult res;
  const int n = static_cast<int>(v0.size());
  Chart chart = Chart::positions;
  std::vector<double> x = chart_coords(m0, chart);
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(v0.data(), n);
  const double near = std::max(opt.switch_at * g.h(), opt.switch_length);
  if (m0.degree() > 1 && min_separation(m0, g) < near) {
    v = Eigen::Map<const Eigen::VectorXd>(
        convert_velocity(m0, v0, Chart::positions, Chart::coefficients).data(), n);
    chart = Chart::coefficients;
    x = chart_coords(m0, chart);
  }

  auto record = [&](double tau, const Eigen::MatrixXd& G) {
    GeodesicPoint p;
    p.tau = tau;
    p.moduli = chart_point(x, chart);
    p.chart = chart;
    p.coords = x;
    p.velocity.assign(v.data(), v.data() + n);
    p.speed2 = n ? v.dot(G * v) : 0.0;
    res.path.push_back(std::move(p));
  };

  if (n == 0) {
    for (double tau = 0; tau <= tau_end + 1e-12; tau += opt.dtau) record(tau, Eigen::MatrixXd());
    return res;
  }

  const int steps = static_cast<int>(std::ceil(tau_end / opt.dtau - 1e-9));
  const double dt = tau_end / steps;
  try {
    rvec warm;
    detail::GeodesicRhs rhs{g, opt, chart, &warm};
    auto [a1, G0] = rhs(x, v);
    record(0.0, G0);
    if (v.norm() == 0.0) {
      // Geodesic at rest: constant path.
      for (int s = 1; s <= steps; ++s)
        if (s % opt.record_every == 0 || s == steps) record(s * dt, G0);
      return res;
    }
    auto shift = [&](const std::vector<double>& base, const Eigen::VectorXd& d, double f) {
      std::vector<double> y = base;
      for (int k = 0; k < n; ++k) y[k] += f * d(k);
      return y;
    };
    for (int s = 1; s <= steps; ++s) {
      rhs.chart = chart;
      const Eigen::VectorXd k1x = v;
      const Eigen::VectorXd k1v = a1;
      const Eigen::VectorXd k2x = v + 0.5 * dt * k1v;
      const Eigen::VectorXd k2v = rhs(shift(x, k1x, 0.5 * dt), k2x).first;
      const Eigen::VectorXd k3x = v + 0.5 * dt * k2v;
      const Eigen::VectorXd k3v = rhs(shift(x, k2x, 0.5 * dt), k3x).first;
      const Eigen::VectorXd k4x = v + dt * k3v;
      const Eigen::VectorXd k4v = rhs(shift(x, k3x, dt), k4x).first;
      x = shift(x, k1x + 2 * k2x + 2 * k3x + k4x, dt / 6.0);
      v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);

      if (m0.degree() > 1) {
        const ModuliPoint here = chart_point(x, chart);
        const double sep = min_separation(here, g);
        Chart want = chart;
        if (chart == Chart::positions && sep < near) want = Chart::coefficients;
        if (chart == Chart::coefficients && sep > opt.switch_back * near) want = Chart::positions;
        if (want != chart) {
          std::vector<double> vv(v.data(), v.data() + n);
          vv = convert_velocity(here, vv, chart, want);
          v = Eigen::Map<Eigen::VectorXd>(vv.data(), n);
          chart = want;
          x = chart_coords(here, chart);
          rhs.chart = chart;
        }
      }
      auto [anew, G] = rhs(x, v);
      a1 = anew;
      if (s % opt.record_every == 0 || s == steps) record(s * dt, G);
    }
  } catch (const Error& e) {
    res.complete = false;
    res.error = e.what();
  }
  return res;
}

}  // namespace vlab
