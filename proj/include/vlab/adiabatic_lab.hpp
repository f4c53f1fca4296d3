#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "vlab/gl_dynamics.hpp"
#include "vlab/moduli_space.hpp"
#include "vlab/vortex_statics.hpp"

namespace vlab {

/// Static vortex at m0 moving with chart velocity eps * v0 (positions chart).
/// T = 1/2 eps^2 v0^T g v0 by construction.
inline DynState prepare_adiabatic_state(const ModuliPoint& m0, const std::vector<double>& v0,
                                        double eps, const TorusGrid& g,
                                        const MetricOptions& opt = {}) {
  if (!(eps >= 0) || !std::isfinite(eps))
    throw DomainError("prepare_adiabatic_state: eps must be non-negative");
  if (v0.size() != 2 * m0.zeros.size())
    throw ShapeError("prepare_adiabatic_state: velocity must have 2d components");
  SolveOptions so;
  so.tol = opt.solve_tol;
  DynState s = DynState::at_rest(solve_vortex(m0, g, so).pair);
  const bool moving = std::any_of(v0.begin(), v0.end(), [](double x) { return x != 0.0; });
  if (eps == 0.0 || !moving) return s;
  MetricOptions mo = opt;
  mo.chart = Chart::positions;
  const TangentSolution t = tangent_solution(m0, v0, g, mo);
  for (std::size_t k = 0; k < g.size(); ++k) {
    s.va1[k] = eps * t.da1[k];
    s.va2[k] = eps * t.da2[k];
    s.vphi[k] = eps * t.dphi[k];
  }
  remove_gauge_component(s.pair, s.va1, s.va2, s.vphi, g);
  return s;
}

/// Angle in degrees, in [0, 90], between the lines through the two zeros of
/// d = 2 configurations a and b. Measures the scattering angle of a
/// head-on collision.
inline double separation_angle(const ModuliPoint& a, const ModuliPoint& b) {
  if (a.degree() != 2 || b.degree() != 2)
    throw DomainError("separation_angle: needs two zeros on each side");
  const cplx u = a.zeros[1] - a.zeros[0], v = b.zeros[1] - b.zeros[0];
  if (std::abs(u) == 0.0 || std::abs(v) == 0.0)
    throw DomainError("separation_angle: coincident zeros");
  const double c = std::abs((std::conj(u) * v).real()) / (std::abs(u) * std::abs(v));
  return std::acos(std::min(1.0, c)) * 180.0 / pi;
}

struct TrajectoryPoint {
  double t = 0;
  ModuliPoint moduli;  // matched to the previous point, unwrapped across the seams
  bool crossing = false;
  /// At a crossing: every matching whose cost is within the ambiguity margin.
  std::vector<ModuliPoint> branches;
};

namespace detail {

inline std::vector<std::vector<int>> permutations(int d) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Zeros of `next` reordered by perm and moved to the periodic images nearest
// to `prev`.
inline ModuliPoint align(const ModuliPoint& prev, const ModuliPoint& next,
                         const std::vector<int>& perm, const TorusGrid& g) {
  ModuliPoint m;
  for (std::size_t k = 0; k < perm.size(); ++k)
    m.zeros.push_back(prev.zeros[k] + g.min_image(next.zeros[perm[k]] - prev.zeros[k]));
  return m;
}

inline double match_cost(const ModuliPoint& a, const ModuliPoint& b) {
  double c = 0;
  for (std::size_t k = 0; k < a.zeros.size(); ++k) c += std::norm(a.zeros[k] - b.zeros[k]);
  return c;
}

}  // namespace detail

/// Zero positions along a run, matched between consecutive snapshots by the
/// permutation of least total squared torus distance. Two matchings within
/// `ambiguity` (squared length) of each other, or a zero of multiplicity > 1,
/// mark a crossing; then all candidate branches are kept.
inline std::vector<TrajectoryPoint> zero_trajectory(const std::vector<DynState>& run,
                                                    const TorusGrid& g,
                                                    double ambiguity = -1) {
  std::vector<TrajectoryPoint> out;
  if (run.empty()) return out;
  if (ambiguity < 0) ambiguity = g.h() * g.h();
  const int d = run.front().pair.degree;
  const auto perms = detail::permutations(d);
  for (const DynState& s : run) {
    if (s.pair.degree != d)
      throw InconsistencyError("zero_trajectory: vortex number changes along the run");
    const ZeroReport zr = locate_zeros(s.pair, g);
    TrajectoryPoint p;
    p.t = s.t;
    const bool merged = std::any_of(zr.zeros.begin(), zr.zeros.end(),
                                    [](const LocatedZero& z) { return z.multiplicity > 1; });
    if (out.empty()) {
      p.moduli = zr.moduli;
      p.crossing = merged;
      out.push_back(std::move(p));
      continue;
    }
    const ModuliPoint& prev = out.back().moduli;
    std::vector<std::pair<double, ModuliPoint>> cand;
    for (const auto& perm : perms) {
      ModuliPoint m = detail::align(prev, zr.moduli, perm, g);
      cand.emplace_back(detail::match_cost(prev, m), std::move(m));
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    p.moduli = cand.front().second;
    p.crossing = merged;
    for (std::size_t k = 1; k < cand.size(); ++k)
      if (cand[k].first - cand.front().first < ambiguity) p.crossing = true;
    if (p.crossing)
      for (const auto& c : cand)
        if (c.first - cand.front().first < ambiguity || merged) p.branches.push_back(c.second);
    out.push_back(std::move(p));
  }
  return out;
}

struct AdiabaticOptions {
  GeodesicOptions geodesic;
  /// Time step as a fraction of the grid spacing (capped by the stability bound).
  double dt_per_h = 0.25;
  /// Slow-time spacing of the recorded snapshots.
  double sample_dtau = 0.02;
  /// Half-width of the slow-time window around a collision that is reported
  /// separately.
  double collision_window = 0.05;
  bool parallel = true;
};

struct AdiabaticRun {
  double eps = 0;
  bool ok = true;
  std::string error;
  std::vector<TrajectoryPoint> trajectory;  // t in fast time
  std::vector<double> tau, deviation;       // per snapshot
  double headline = 0;                      // sup outside the collision window
  double window = 0;                        // sup inside it
};

/// Structured record of one comparison. Failed runs carry ok = false and a
/// NaN deviation.
struct AdiabaticReport {
  std::vector<double> eps;
  std::vector<double> deviations;
  std::vector<double> ratios;  // deviations[k] / deviations[k + 1]
  std::vector<double> window_deviations;
  double collision_tau = std::numeric_limits<double>::quiet_NaN();
  GeodesicResult geodesic;
  std::vector<AdiabaticRun> runs;
};

namespace detail {

struct CoeffState {
  Eigen::VectorXd c, v;
};

inline CoeffState to_coefficients(const GeodesicPoint& p) {
  const int n = static_cast<int>(p.coords.size());
  std::vector<double> c = chart_coords(p.moduli, Chart::coefficients);
  std::vector<double> v =
      p.chart == Chart::coefficients
          ? p.velocity
          : convert_velocity(p.moduli, p.velocity, Chart::positions, Chart::coefficients);
  return {Eigen::Map<Eigen::VectorXd>(c.data(), n), Eigen::Map<Eigen::VectorXd>(v.data(), n)};
}

// Cubic Hermite interpolation of the geodesic in coefficient space.
inline ModuliPoint geodesic_at(const GeodesicResult& r, double tau, Chart* chart) {
  const auto& P = r.path;
  if (P.size() == 1 || tau <= P.front().tau) {
    *chart = P.front().chart;
    return P.front().moduli;
  }
  if (tau >= P.back().tau) {
    *chart = P.back().chart;
    return P.back().moduli;
  }
  std::size_t k = 0;
  while (k + 2 < P.size() && P[k + 1].tau < tau) ++k;
  const GeodesicPoint &a = P[k], &b = P[k + 1];
  *chart = (tau - a.tau < b.tau - tau) ? a.chart : b.chart;
  if (a.moduli.degree() == 0) return a.moduli;
  const CoeffState A = to_coefficients(a), B = to_coefficients(b);
  const double hh = b.tau - a.tau, s = (tau - a.tau) / hh;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const Eigen::VectorXd c = h00 * A.c + h10 * hh * A.v + h01 * B.c + h11 * hh * B.v;
  return chart_point(std::vector<double>(c.data(), c.data() + c.size()), Chart::coefficients);
}

// Euclidean distance in the given chart after matching the zeros of `m` to
// those of `ref` (permutation and periodic image).
inline double moduli_distance(const ModuliPoint& ref, const ModuliPoint& m, Chart chart,
                              const TorusGrid& g) {
  const int d = ref.degree();
  if (d == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  ModuliPoint aligned;
  for (const auto& perm : permutations(d)) {
    ModuliPoint a = align(ref, m, perm, g);
    const double c = match_cost(ref, a);
    if (c < best) {
      best = c;
      aligned = std::move(a);
    }
  }
  if (chart == Chart::positions) return std::sqrt(best);
  const auto x = chart_coords(ref, Chart::coefficients);
  const auto y = chart_coords(aligned, Chart::coefficients);
  double s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(s);
}

}  // namespace detail

/// Slow-time comparison of full dynamics against the geodesic from the same
/// data. For each eps the fields are evolved to t = tau_end / eps and the
/// zero trajectory, read at tau = eps t, is compared to the geodesic.
inline AdiabaticReport adiabatic_compare(const ModuliPoint& m0, const std::vector<double>& v0,
                                         const std::vector<double>& eps_list, double tau_end,
                                         const TorusGrid& g, const AdiabaticOptions& opt = {}) {
  if (eps_list.empty()) throw DomainError("adiabatic_compare: empty eps list");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0)) throw DomainError("adiabatic_compare: eps must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw DomainError("adiabatic_compare: eps list must be strictly decreasing");
  }
  if (!(tau_end > 0)) throw DomainError("adiabatic_compare: tau_end must be positive");

  AdiabaticReport rep;
  rep.eps = eps_list;
  rep.geodesic = geodesic(m0, v0, tau_end, g, opt.geodesic);

  // Collision: the point of least separation when zeros come closer than the
  // chart-switch threshold.
  const double near = std::max(opt.geodesic.switch_at * g.h(), opt.geodesic.switch_length);
  if (m0.degree() > 1) {
    double smin = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.geodesic.path) {
      const double s = min_separation(p.moduli, g);
      if (s < smin) {
        smin = s;
        if (s < near) rep.collision_tau = p.tau;
      }
    }
  }

  auto one = [&](double eps) {
    AdiabaticRun run;
    run.eps = eps;
    try {
      const double t_end = tau_end / eps;
      double dt = std::min(opt.dt_per_h * g.h(), 0.9 * max_stable_dt(g));
      const int every = std::max(1, static_cast<int>(std::lround(opt.sample_dtau / eps / dt)));
      int steps = static_cast<int>(std::ceil(t_end / dt));
      steps = ((steps + every - 1) / every) * every;
      dt = t_end / steps;
      std::vector<DynState> snaps;
      snaps.push_back(prepare_adiabatic_state(m0, v0, eps, g, opt.geodesic.metric));
      EvolveOptions eo;
      eo.every = every;
      eo.observer = [&](const DynState& s) { snaps.push_back(s); };
      evolve(snaps.front(), dt, steps, g, eo);
      run.trajectory = zero_trajectory(snaps, g);
      for (const auto& p : run.trajectory) {
        const double tau = eps * p.t;
        Chart chart;
        const ModuliPoint ref = detail::geodesic_at(rep.geodesic, tau, &chart);
        const double dev = detail::moduli_distance(ref, p.moduli, chart, g);
        run.tau.push_back(tau);
        run.deviation.push_back(dev);
        if (std::abs(tau - rep.collision_tau) < opt.collision_window)
          run.window = std::max(run.window, dev);
        else
          run.headline = std::max(run.headline, dev);
      }
      if (!rep.geodesic.complete) {
        run.ok = false;
        run.error = "geodesic incomplete: " + rep.geodesic.error;
      }
    } catch (const Error& e) {
      run.ok = false;
      run.error = e.what();
    }
    return run;
  };

  if (opt.parallel && eps_list.size() > 1) {
    std::vector<std::future<AdiabaticRun>> fut;
    for (double eps : eps_list) fut.push_back(std::async(std::launch::async, one, eps));
    for (auto& f : fut) rep.runs.push_back(f.get());
  } else {
    for (double eps : eps_list) rep.runs.push_back(one(eps));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rep.runs) {
    rep.deviations.push_back(r.ok ? r.headline : nan);
    rep.window_deviations.push_back(r.ok ? r.window : nan);
  }
  for (std::size_t k = 0; k + 1 < rep.deviations.size(); ++k)
    rep.ratios.push_back(rep.deviations[k] / rep.deviations[k + 1]);
  return rep;
}

}  // namespace vlab
