// Prints one PASS/FAIL line per acceptance criterion. Exit status is 0 when
// every criterion ran; failing criteria are reported on stdout.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "common.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

const TorusGrid G128 = TorusGrid::square(128, 100.0);
const TorusGrid G48 = TorusGrid::square(48, 100.0);
const TorusGrid G64 = TorusGrid::square(64, 100.0);

// Worst distance of any stored configuration's flux from an integer.
double flux_worst = 0;
int flux_count = 0;

void record_flux(const GaugePair& p, const TorusGrid& g) {
  const double f = flux(p, g);
  flux_worst = std::max(flux_worst, std::isfinite(f) ? std::abs(f - std::round(f)) : 1e300);
  ++flux_count;
}

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("%s %2d %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class F>
void criterion(int id, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string(name) + ": exception: " + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "criterion %d took %.1f s\n", id, s);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ModuliPoint random_moduli(std::mt19937_64& rng, int d, const TorusGrid& g, double min_sep) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (;;) {
    ModuliPoint m;
    for (int k = 0; k < d; ++k) m.zeros.emplace_back(g.lx() * U(rng), g.ly() * U(rng));
    bool ok = true;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) ok = ok && g.torus_distance(m.zeros[a], m.zeros[b]) >= min_sep;
    if (ok) return m;
  }
}

// Largest distance from a prescribed zero to the nearest located one.
double round_trip(const ModuliPoint& in, const ModuliPoint& out, const TorusGrid& g) {
  if (in.degree() != out.degree()) return 1e300;
  double worst = 0;
  for (cplx z : in.zeros) {
    double best = 1e300;
    for (cplx w : out.zeros) best = std::min(best, g.torus_distance(z, w));
    worst = std::max(worst, best);
  }
  return worst;
}

double slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < t.size(); ++k) st += t[k], sy += y[k], stt += t[k] * t[k], sty += t[k] * y[k];
  return (n * sty - st * sy) / (n * stt - st * st);
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      out[fs::relative(e.path(), dir).string()] = ss.str();
    }
  return out;
}

}  // namespace

int main() {
  criterion(1, "vortex solver", [] {
    std::mt19937_64 rng(2024);
    double res = 0, trip = 0;
    for (int k = 0; k < 10; ++k) {
      const ModuliPoint m = random_moduli(rng, 1 + k % 3, G128, 1.0);
      const VortexSolution v = solve_vortex(m, G128, 1e-10);
      record_flux(v.pair, G128);
      res = std::max(res, v.bogomolny_residual);
      trip = std::max(trip, round_trip(m, locate_zeros(v.pair, G128).moduli, G128));
    }
    report(1, res < 1e-8 && trip < G128.h(),
           fmt("vortex solver: max Bogomolny residual %.2e (< 1e-8), max zero round trip %.2e (< h = %.3f)",
               res, trip, G128.h()));
  });

  criterion(2, "energy additivity", [] {
    const vlab::testing::RadialVortex oracle;
    const std::vector<ModuliPoint> ms{ModuliPoint{{cplx(5, 5)}},
                                      ModuliPoint{{cplx(2.5, 2.5), cplx(7.5, 7.5)}},
                                      ModuliPoint{{cplx(2, 2), cplx(7, 3.5), cplx(4.5, 8)}}};
    std::vector<double> U;
    for (const auto& m : ms) {
      const VortexSolution v = solve_vortex(m, G128, 1e-10);
      record_flux(v.pair, G128);
      U.push_back(v.energy);
    }
    double add = 0;
    for (int d = 2; d <= 3; ++d) add = std::max(add, std::abs(U[d - 1] - d * U[0]) / (d * U[0]));
    const double orc = std::abs(U[0] - oracle.energy()) / oracle.energy();
    report(2, add < 5e-3 && orc < 1e-3,
           fmt("energy additivity: max |U(d) - d U(1)| / d U(1) = %.2e (< 0.5%%), U(1) vs radial oracle %.2e (< 0.1%%)",
               add, orc));
  });

  criterion(4, "dynamics conservation", [] {
    const DynState s0 =
        prepare_adiabatic_state(ModuliPoint{{cplx(3.5, 5), cplx(6.5, 5)}}, {1, 0, -1, 0}, 0.1, G64);
    const double E0 = energy_report(s0, G64).total, t_end = 2.0;
    std::vector<double> ts, gs;
    auto drift = [&](double dt, bool track) {
      const int steps = static_cast<int>(std::lround(t_end / dt));
      EvolveOptions o;
      o.every = 4;
      o.observer = [&](const DynState& s) {
        record_flux(s.pair, G64);
        if (track) ts.push_back(s.t), gs.push_back(gauss_residual(s, G64));
      };
      if (track) ts.push_back(0), gs.push_back(gauss_residual(s0, G64));
      return std::abs(energy_report(evolve(s0, t_end / steps, steps, G64, o), G64).total - E0) / E0 / t_end;
    };
    const double d1 = drift(0.25 * G64.h(), true), d2 = drift(0.125 * G64.h(), false);
    const double gslope = std::abs(slope(ts, gs));
    report(4, d1 < 1e-6 && d1 / d2 >= 3.5 && gslope < 1e-8,
           fmt("dynamics conservation: drift %.2e per unit time (< 1e-6), halving ratio %.2f (>= 3.5), "
               "Gauss residual slope %.2e (< 1e-8)",
               d1, d1 / d2, gslope));
  });

  criterion(5, "metric", [] {
    std::mt19937_64 rng(99);
    double min_eig = 1e300;
    for (int k = 0; k < 20; ++k) {
      const MetricSample s = metric_at(random_moduli(rng, 1 + k % 3, G48, 1.0), G48);
      min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.g).eigenvalues().minCoeff());
    }
    std::vector<double> diag;
    double spread = 0;
    for (cplx z : {cplx(5, 5), cplx(1.3, 2.7), cplx(8.1, 0.4), cplx(6.6, 9.2), cplx(2.2, 7.7)}) {
      const Eigen::MatrixXd g = metric_at(ModuliPoint{{z}}, G48).g;
      diag.push_back(g(0, 0));
      spread = std::max(spread, (g - diag.front() * Eigen::MatrixXd::Identity(2, 2)).norm() / g.norm());
    }
    const ModuliPoint m{{cplx(3.5, 5), cplx(6.5, 5.5)}};
    const std::vector<double> v{0.4, 0.1, -0.3, 0.2};
    const Eigen::MatrixXd g = metric_at(m, G48).g;
    const Eigen::Map<const Eigen::VectorXd> q(v.data(), 4);
    const double T = kinetic_energy(prepare_adiabatic_state(m, v, 1.0, G48), G48);
    const double kin = std::abs(0.5 * q.dot(g * q) - T) / T;
    report(5, min_eig > 0 && spread < 0.01 && kin < 1e-6,
           fmt("metric: min eigenvalue over 20 points %.3f (> 0), d = 1 spread %.2e (< 1%%), "
               "kinetic consistency %.2e (< 1e-6)",
               min_eig, spread, kin));
  });

  // Criteria 6 and 7 share one head-on comparison.
  criterion(6, "scattering and adiabatic", [] {
    AdiabaticOptions o;
    o.geodesic.dtau = 0.05;
    const ModuliPoint m0{{cplx(3.5, 5), cplx(6.5, 5)}};
    const AdiabaticReport r = adiabatic_compare(m0, {1, 0, -1, 0}, {0.2, 0.1, 0.05}, 2.0, G64, o);
    bool ran = r.geodesic.complete;
    for (const auto& run : r.runs) ran = ran && run.ok && !run.trajectory.empty();
    if (!ran) {
      report(6, false, "geodesic scattering: a run did not complete");
      report(7, false, "adiabatic principle: a run did not complete");
      return;
    }
    const double geo = separation_angle(r.geodesic.path.front().moduli, r.geodesic.path.back().moduli);
    const auto& tr = r.runs.back().trajectory;
    const double pde = separation_angle(tr.front().moduli, tr.back().moduli);
    report(6, std::abs(geo - 90) <= 2 && std::abs(pde - geo) <= 5,
           fmt("geodesic scattering: geodesic angle %.2f deg (90 +- 2), PDE angle at eps = 0.05 %.2f deg "
               "(within 5 of geodesic), 64x64 grid",
               geo, pde));
    bool mono = true;
    double worst = 1e300;
    for (double q : r.ratios) mono = mono && q >= 1.5, worst = std::min(worst, q);
    report(7, mono,
           fmt("adiabatic principle: deviations %.3e %.3e %.3e for eps 0.2 0.1 0.05, min ratio %.2f (>= 1.5)",
               r.deviations[0], r.deviations[1], r.deviations[2], worst));
  });

  criterion(8, "clifford suite", [] {
    int checks = 0, bad = 0;
    double worst = 0;
    for (int m = 1; m <= 3; ++m)
      for (const auto& c : clifford_identity_report(m, 7, 20)) {
        ++checks;
        bad += !c.pass;
        worst = std::max(worst, c.error);
      }
    report(8, bad == 0 && worst < 1e-12,
           fmt("clifford suite: %.0f checks for m = 1..3, %.0f failed, worst error %.2e (< 1e-12)", checks, bad,
               worst));
  });

  criterion(9, "dirac equivalence", [] {
    std::vector<double> e;
    for (int n : {16, 32, 64}) {
      const KahlerTorusGrid g(TorusGrid(n, n, 1.0, 1.0), TorusGrid(n, n, std::sqrt(2.0), std::sqrt(2.0)));
      e.push_back(dirac_discrepancy(random_smooth_fields(g, 1, 1), g));
    }
    const double q1 = e[0] / e[1], q2 = e[1] / e[2];
    report(9, q1 >= 3.5 && q2 >= 3.5,
           fmt("dirac equivalence: discrepancy %.3e %.3e %.3e at n = 16 32 64, ratios %.2f (>= 3.5)", e[0], e[1],
               e[2], std::min(q1, q2)));
  });

  criterion(10, "sw scan", [] {
    const KahlerTorusGrid g(TorusGrid(16, 16, 1.0, 1.0), TorusGrid(128, 128, std::sqrt(2.0), std::sqrt(2.0)));
    const auto scan = localization_scan(ModuliPoint{{cplx(0.7, 0.7)}}, {4.0, 8.0, 16.0, 32.0}, g);
    bool ok = scan.size() == 4;
    double r1 = 0, r3 = 0, lr_lo = 1e300, lr_hi = 0, shrink = 0;
    for (std::size_t k = 0; k < scan.size(); ++k) {
      const auto& s = scan[k];
      ok = ok && s.ok;
      r1 = std::max(r1, s.residual.r1);
      r3 = std::max(r3, s.residual.r3);
      lr_lo = std::min(lr_lo, s.lambda_r2);
      lr_hi = std::max(lr_hi, s.lambda_r2);
      if (k > 0)
        shrink = std::max(shrink, std::abs(scan[k - 1].contour_radius / s.contour_radius - std::sqrt(2.0)) /
                                      std::sqrt(2.0));
    }
    const double mid = 0.5 * (lr_lo + lr_hi);
    const bool bounded = lr_hi > 0 && (lr_hi - mid) <= 0.25 * mid;
    report(10, ok && r3 == 0 && r1 < 1e-6 && bounded && shrink <= 0.15,
           fmt("sw scan: r3 = %.1e (== 0), r1 %.2e (< 1e-6), lambda r2 in [%.2e, %.2e] (within +-25%%)",
               r3, r1, lr_lo, lr_hi) +
               fmt(", contour ratio off sqrt 2 by %.1f%% (<= 15%%)", 100 * shrink));
  });

  criterion(11, "determinism", [] {
    const fs::path base = fs::temp_directory_path() / ("vlab_acceptance_" + std::to_string(::getpid()));
    std::vector<std::map<std::string, std::string>> outs;
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = base / std::to_string(rep);
      fs::create_directories(dir);
      for (const char* cmd : {"metric", "clifford-check"}) {
        const std::string cfg = std::string(VLAB_SAMPLES_DIR) + "/" + (cmd[0] == 'm' ? "metric" : "clifford") + ".ini";
        const std::string line = std::string("\"") + VLAB_CLI_PATH + "\" " + cmd + " --config \"" + cfg +
                                 "\" --out \"" + (dir / cmd).string() + "\" --seed 11 > /dev/null 2>&1";
        ran = ran && std::system(line.c_str()) == 0;
      }
      outs.push_back(csv_files(dir));
    }
    fs::remove_all(base);
    report(11, ran && !outs[0].empty() && outs[0] == outs[1],
           fmt("determinism: %.0f CSV files from two seeded CLI runs, byte-identical: ", double(outs[0].size())) +
               (outs[0] == outs[1] ? "yes" : "no"));
  });

  // Last, so that it covers every configuration stored above.
  report(3, flux_count > 0 && flux_worst < 1e-10,
         fmt("flux quantization: %.0f stored configurations, max distance from an integer %.2e (< 1e-10)",
             flux_count, flux_worst));

  std::printf("%d criteria failed\n", failures);
  return 0;
}
