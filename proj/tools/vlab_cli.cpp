// vlab: command-line driver for the vortex laboratory.
//
//   vlab <subcommand> --config <path> [--out <dir>] [--seed <n>] [key=value ...]
//
// See README.md for the configuration grammar.

#include <fftw3.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vlab/vlab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vlab;

namespace {

// Exit codes.
constexpr int kOk = 0, kComputeError = 1, kInvalidConfig = 2;

const std::vector<std::string> kCommands = {"solve-vortex",      "evolve",         "metric",
                                            "geodesic",          "adiabatic-compare",
                                            "clifford-check",    "dirac-check",    "sw-scan"};

// Flat key/value store: "section.key" -> raw tokens. Top-level keys have an
// empty section.
class RunConfig {
 public:
  std::string command;
  std::map<std::string, std::string> raw;
  std::vector<std::string> errors;
  std::set<std::string> used;

  void load_file(const std::string& path) {
    if (!fs::exists(path)) {
      errors.push_back("config: file not found: " + path);
      return;
    }
    try {
      CLI::ConfigINI ini;
      for (const auto& item : ini.from_file(path)) {
        if (item.name == "++" || item.name == "--") continue;
        std::string v;
        for (const auto& s : item.inputs) v += (v.empty() ? "" : " ") + s;
        raw[CLI::detail::join(item.parents, ".") + "." + item.name] = v;
      }
    } catch (const std::exception& e) {
      errors.push_back(std::string("config: ") + e.what());
    }
  }

  // key=value or section.key=value; a bare key belongs to the command section.
  void apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back("override '" + kv + "': expected key=value");
      return;
    }
    std::string key = kv.substr(0, eq);
    if (key.find('.') == std::string::npos) key = command + "." + key;
    raw[key] = kv.substr(eq + 1);
  }

  const std::string* find(const std::string& key, const std::string& section) {
    for (const std::string& s : {section, std::string()}) {
      auto it = raw.find(s + "." + key);
      if (it != raw.end()) {
        used.insert(it->first);
        return &it->second;
      }
    }
    return nullptr;
  }

  static std::vector<std::string> tokens(const std::string& v) {
    std::string t = v;
    for (char& c : t)
      if (c == ',' || c == '[' || c == ']' || c == ';') c = ' ';
    std::istringstream is(t);
    std::vector<std::string> out;
    for (std::string s; is >> s;) out.push_back(s);
    return out;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> def,
                            const std::string& section) {
    const std::string* v = find(key, section);
    if (!v) return def;
    std::vector<double> out;
    for (const auto& t : tokens(*v)) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(t, &pos));
        if (pos != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        errors.push_back(section + "." + key + ": '" + t + "' is not a number");
      }
    }
    return out;
  }

  double real(const std::string& key, double def, const std::string& section) {
    const auto v = reals(key, {def}, section);
    if (v.size() != 1) {
      errors.push_back(section + "." + key + ": expected one number");
      return def;
    }
    return v[0];
  }

  int integer(const std::string& key, int def, const std::string& section) {
    const double v = real(key, def, section);
    if (v != std::floor(v)) errors.push_back(section + "." + key + ": expected an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, const std::string& def, const std::string& section) {
    const std::string* v = find(key, section);
    return v ? *v : def;
  }

  std::vector<cplx> points(const std::string& key, const std::string& section) {
    const auto v = reals(key, {}, section);
    if (v.size() % 2) errors.push_back(section + "." + key + ": expected x y pairs");
    std::vector<cplx> out;
    for (std::size_t k = 0; k + 1 < v.size(); k += 2) out.emplace_back(v[k], v[k + 1]);
    return out;
  }

  void require(bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  }

  // Keys of the command section (and top level) that nothing read.
  void flag_unknown() {
    for (const auto& [k, v] : raw) {
      const auto dot = k.rfind('.');
      const std::string sec = k.substr(0, dot);
      if ((sec == command || sec.empty()) && !used.count(k))
        errors.push_back("config: unknown key '" + k + "'");
    }
  }

  json echo() const {
    json j = json::object();
    for (const auto& [k, v] : raw) j[k] = v;
    return j;
  }
};

struct Context {
  RunConfig cfg;
  fs::path out;
  std::uint64_t seed = 1;
  std::vector<std::string> artifacts;
  json summary = json::object();

  std::string path(const std::string& name) {
    artifacts.push_back(name);
    return (out / name).string();
  }
};

std::optional<TorusGrid> grid_from(RunConfig& c) {
  const int n = c.integer("n", 64, "grid");
  const int nx = c.integer("nx", n, "grid"), ny = c.integer("ny", n, "grid");
  const double area = c.real("area", 100.0, "grid");
  const double side = area > 0 ? std::sqrt(area) : 0.0;
  const double lx = c.real("lx", side, "grid"), ly = c.real("ly", area > 0 ? area / lx : 0.0, "grid");
  try {
    return TorusGrid(nx, ny, lx, ly);
  } catch (const Error& e) {
    c.errors.push_back(std::string("grid: ") + e.what());
    return std::nullopt;
  }
}

void check_vortex(RunConfig& c, const std::optional<TorusGrid>& g, const std::vector<cplx>& z) {
  if (g && g->area() <= 4.0 * pi * static_cast<double>(z.size()))
    c.errors.push_back("zeros: " + std::to_string(z.size()) +
                       " vortices need area > 4 pi d = " + std::to_string(4 * pi * z.size()) +
                       ", grid area is " + std::to_string(g->area()));
}

void write_zeros(CsvWriter& w, double t, const ModuliPoint& m, bool crossing) {
  for (std::size_t k = 0; k < m.zeros.size(); ++k) {
    w << t << static_cast<int>(k) << m.zeros[k].real() << m.zeros[k].imag() << crossing;
    w.end_row();
  }
}

// ---- subcommands ---------------------------------------------------------
// Each returns a closure that performs the computation; validation happens
// before any closure runs.

using Job = std::function<int(Context&)>;

Job cmd_solve_vortex(RunConfig& c) {
  const std::string s = c.command;
  auto g = grid_from(c);
  const auto zeros = c.points("zeros", s);
  const double tol = c.real("tol", 1e-10, s);
  c.require(tol > 0, s + ".tol: must be positive");
  check_vortex(c, g, zeros);
  return [=](Context& ctx) {
    const VortexSolution v = solve_vortex(ModuliPoint{zeros}, *g, tol);
    write_snapshot(ctx.path("vortex.snap"), v.pair, *g);
    export_field_csv(ctx.path("field.csv"), v.pair, *g);
    CsvWriter w(ctx.path("zeros.csv"), {"t", "k", "x", "y", "crossing"});
    write_zeros(w, 0.0, locate_zeros(v.pair, *g).moduli, false);
    ctx.summary["energy"] = v.energy;
    ctx.summary["bogomolny_residual"] = v.bogomolny_residual;
    ctx.summary["flux"] = flux(v.pair, *g);
    ctx.summary["newton_iterations"] = v.history.size();
    return kOk;
  };
}

Job cmd_evolve(RunConfig& c) {
  const std::string s = c.command;
  auto g = grid_from(c);
  const auto zeros = c.points("zeros", s);
  auto vel = c.reals("velocity", std::vector<double>(2 * zeros.size(), 0.0), s);
  const double eps = c.real("eps", 0.1, s);
  const double t_end = c.real("t_end", 1.0, s);
  const double dt = c.real("dt", g ? 0.25 * g->h() : 0.0, s);
  const int every = c.integer("snapshot_every", 0, s);
  const int record = c.integer("record_every", 1, s);
  check_vortex(c, g, zeros);
  c.require(vel.size() == 2 * zeros.size(), s + ".velocity: needs two components per zero");
  c.require(eps >= 0, s + ".eps: must be non-negative");
  c.require(t_end > 0, s + ".t_end: must be positive");
  c.require(every >= 0, s + ".snapshot_every: must be non-negative");
  c.require(record >= 1, s + ".record_every: must be at least 1");
  if (g && !(dt > 0 && dt < max_stable_dt(*g)))
    c.errors.push_back(s + ".dt: must lie in (0, " + std::to_string(max_stable_dt(*g)) + ")");
  return [=](Context& ctx) {
    const DynState s0 = prepare_adiabatic_state(ModuliPoint{zeros}, vel, eps, *g);
    const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
    CsvWriter en(ctx.path("energy.csv"), {"t", "T", "U", "total", "gauss_residual"});
    std::vector<DynState> run{s0};
    auto log = [&](const DynState& st) {
      const EnergyReport r = energy_report(st, *g);
      en << r.t << r.T << r.U << r.total << r.gauss_residual;
      en.end_row();
    };
    log(s0);
    int step = 0;
    EvolveOptions eo;
    eo.every = 1;
    eo.observer = [&](const DynState& st) {
      ++step;
      if (step % record == 0) {
        log(st);
        run.push_back(st);
      }
      if (every > 0 && step % every == 0) {
        char name[64];
        std::snprintf(name, sizeof name, "snap_%06d.snap", step);
        write_snapshot(ctx.path(name), st, *g, true);
      }
    };
    DynState last = s0;
    try {
      last = evolve(s0, dt, steps, *g, eo);
    } catch (const DivergenceError& e) {
      write_snapshot(ctx.path("last_good.snap"), e.last_good(), *g, true);
      throw;
    }
    write_snapshot(ctx.path("final.snap"), last, *g, true);
    export_field_csv(ctx.path("field.csv"), last.pair, *g);
    CsvWriter zw(ctx.path("zeros.csv"), {"t", "k", "x", "y", "crossing"});
    if (!zeros.empty())
      for (const auto& p : zero_trajectory(run, *g)) write_zeros(zw, p.t, p.moduli, p.crossing);
    const EnergyReport r0 = energy_report(s0, *g), r1 = energy_report(last, *g);
    ctx.summary["steps"] = steps;
    ctx.summary["dt"] = dt;
    ctx.summary["energy_initial"] = r0.total;
    ctx.summary["energy_final"] = r1.total;
    ctx.summary["relative_energy_change"] = (r1.total - r0.total) / r0.total;
    ctx.summary["gauss_residual_final"] = r1.gauss_residual;
    return kOk;
  };
}

Chart chart_from(RunConfig& c, const std::string& s) {
  const std::string v = c.text("chart", "positions", s);
  if (v == "positions") return Chart::positions;
  if (v == "coefficients") return Chart::coefficients;
  c.errors.push_back(s + ".chart: expected positions or coefficients, got '" + v + "'");
  return Chart::positions;
}

Job cmd_metric(RunConfig& c) {
  const std::string s = c.command;
  auto g = grid_from(c);
  const auto zeros = c.points("zeros", s);
  MetricOptions mo;
  mo.chart = chart_from(c, s);
  mo.delta = c.real("delta", mo.delta, s);
  mo.richardson = c.integer("richardson", 0, s) != 0;
  const int random = c.integer("random_points", 0, s);
  const int degree = c.integer("degree", static_cast<int>(zeros.size()), s);
  c.require(mo.delta > 0, s + ".delta: must be positive");
  c.require(random >= 0, s + ".random_points: must be non-negative");
  c.require(!zeros.empty() || random > 0, s + ": give zeros or random_points");
  c.require(degree >= 1 || random == 0, s + ".degree: random points need degree >= 1");
  check_vortex(c, g, zeros.empty() ? std::vector<cplx>(std::max(degree, 0)) : zeros);
  return [=](Context& ctx) {
    std::vector<ModuliPoint> pts;
    if (!zeros.empty()) pts.push_back(ModuliPoint{zeros});
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> ux(0.0, g->lx()), uy(0.0, g->ly());
    const double minsep = std::max(4.0 * g->h(), 2.0);
    while (static_cast<int>(pts.size()) < (zeros.empty() ? 0 : 1) + random) {
      ModuliPoint m;
      while (static_cast<int>(m.zeros.size()) < degree) {
        const cplx z(ux(rng), uy(rng));
        bool ok = true;
        for (cplx w : m.zeros) ok = ok && g->torus_distance(z, w) > minsep;
        if (ok) m.zeros.push_back(z);
      }
      pts.push_back(m);
    }
    CsvWriter w(ctx.path("metric.csv"), {"point", "row", "col", "g"});
    CsvWriter p(ctx.path("metric_points.csv"),
                {"point", "k", "x", "y", "min_eigenvalue", "richardson_difference", "flagged"});
    double worst = 1e300;
    for (std::size_t a = 0; a < pts.size(); ++a) {
      const MetricSample ms = metric_at(pts[a], *g, mo);
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ms.g).eigenvalues().minCoeff();
      worst = std::min(worst, lmin);
      for (int r = 0; r < ms.g.rows(); ++r)
        for (int q = 0; q < ms.g.cols(); ++q) {
          w << static_cast<int>(a) << r << q << ms.g(r, q);
          w.end_row();
        }
      for (std::size_t k = 0; k < pts[a].zeros.size(); ++k) {
        p << static_cast<int>(a) << static_cast<int>(k) << pts[a].zeros[k].real()
          << pts[a].zeros[k].imag() << lmin << ms.richardson_difference << ms.flagged;
        p.end_row();
      }
    }
    ctx.summary["points"] = pts.size();
    ctx.summary["chart"] = chart_name(mo.chart);
    ctx.summary["min_eigenvalue"] = worst;
    ctx.summary["positive_definite"] = worst > 0;
    return kOk;
  };
}

void write_geodesic(CsvWriter& w, const GeodesicResult& r) {
  for (const auto& p : r.path) {
    for (std::size_t k = 0; k < p.moduli.zeros.size(); ++k) {
      w << p.tau << chart_name(p.chart) << static_cast<int>(k) << p.moduli.zeros[k].real()
        << p.moduli.zeros[k].imag() << p.speed2;
      w.end_row();
    }
  }
}

GeodesicOptions geodesic_options(RunConfig& c, const std::string& s) {
  GeodesicOptions go;
  go.dtau = c.real("dtau", 0.05, s);
  go.switch_length = c.real("switch_length", go.switch_length, s);
  go.metric.delta = c.real("delta", go.metric.delta, s);
  c.require(go.dtau > 0, s + ".dtau: must be positive");
  c.require(go.switch_length >= 0, s + ".switch_length: must be non-negative");
  c.require(go.metric.delta > 0, s + ".delta: must be positive");
  return go;
}

Job cmd_geodesic(RunConfig& c) {
  const std::string s = c.command;
  auto g = grid_from(c);
  const auto zeros = c.points("zeros", s);
  const auto vel = c.reals("velocity", {}, s);
  const double tau_end = c.real("tau_end", 1.0, s);
  const GeodesicOptions go = geodesic_options(c, s);
  check_vortex(c, g, zeros);
  c.require(!zeros.empty(), s + ".zeros: at least one zero is required");
  c.require(vel.size() == 2 * zeros.size(), s + ".velocity: needs two components per zero");
  c.require(tau_end > 0, s + ".tau_end: must be positive");
  return [=](Context& ctx) {
    const GeodesicResult r = geodesic(ModuliPoint{zeros}, vel, tau_end, *g, go);
    CsvWriter w(ctx.path("geodesic.csv"), {"tau", "chart", "k", "x", "y", "speed2"});
    write_geodesic(w, r);
    ctx.summary["complete"] = r.complete;
    if (!r.complete) ctx.summary["error"] = r.error;
    if (r.path.size() > 1) {
      const double s0 = r.path.front().speed2, s1 = r.path.back().speed2;
      ctx.summary["speed2_relative_change"] = s0 > 0 ? (s1 - s0) / s0 : 0.0;
    }
    if (zeros.size() == 2 && r.path.size() > 1)
      ctx.summary["separation_angle_deg"] =
          separation_angle(r.path.front().moduli, r.path.back().moduli);
    return r.complete ? kOk : kComputeError;
  };
}

Job cmd_adiabatic(RunConfig& c) {
  const std::string s = c.command;
  auto g = grid_from(c);
  const auto zeros = c.points("zeros", s);
  const auto vel = c.reals("velocity", {}, s);
  const auto eps = c.reals("eps", {0.2, 0.1, 0.05}, s);
  const double tau_end = c.real("tau_end", 1.0, s);
  AdiabaticOptions ao;
  ao.geodesic = geodesic_options(c, s);
  ao.sample_dtau = c.real("sample_dtau", ao.sample_dtau, s);
  ao.parallel = c.integer("parallel", 1, s) != 0;
  check_vortex(c, g, zeros);
  c.require(!zeros.empty(), s + ".zeros: at least one zero is required");
  c.require(vel.size() == 2 * zeros.size(), s + ".velocity: needs two components per zero");
  c.require(!eps.empty(), s + ".eps: list must not be empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0)) c.errors.push_back(s + ".eps: values must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1]))
      c.errors.push_back(s + ".eps: list must be strictly decreasing");
  }
  c.require(tau_end > 0, s + ".tau_end: must be positive");
  c.require(ao.sample_dtau > 0, s + ".sample_dtau: must be positive");
  return [=](Context& ctx) {
    const AdiabaticReport r = adiabatic_compare(ModuliPoint{zeros}, vel, eps, tau_end, *g, ao);
    CsvWriter w(ctx.path("adiabatic.csv"),
                {"eps", "deviation", "window_deviation", "ratio", "ok"});
    bool all = true;
    for (std::size_t k = 0; k < r.eps.size(); ++k) {
      w << r.eps[k] << r.deviations[k] << r.window_deviations[k]
        << (k == 0 ? std::nan("") : r.ratios[k - 1]) << r.runs[k].ok;
      w.end_row();
      all = all && r.runs[k].ok;
      char name[64];
      std::snprintf(name, sizeof name, "trajectory_%02zu.csv", k);
      CsvWriter t(ctx.path(name), {"tau", "k", "x", "y", "crossing", "deviation"});
      for (std::size_t q = 0; q < r.runs[k].trajectory.size(); ++q) {
        const auto& p = r.runs[k].trajectory[q];
        for (std::size_t z = 0; z < p.moduli.zeros.size(); ++z) {
          t << r.runs[k].tau[q] << static_cast<int>(z) << p.moduli.zeros[z].real()
            << p.moduli.zeros[z].imag() << p.crossing << r.runs[k].deviation[q];
          t.end_row();
        }
      }
      if (!r.runs[k].ok) ctx.summary["failures"].push_back({{"eps", r.eps[k]}, {"error", r.runs[k].error}});
    }
    CsvWriter gw(ctx.path("geodesic.csv"), {"tau", "chart", "k", "x", "y", "speed2"});
    write_geodesic(gw, r.geodesic);
    ctx.summary["deviations"] = r.deviations;
    ctx.summary["ratios"] = r.ratios;
    ctx.summary["collision_tau"] = std::isnan(r.collision_tau) ? json(nullptr) : json(r.collision_tau);
    return all ? kOk : kComputeError;
  };
}

Job cmd_clifford(RunConfig& c) {
  const std::string s = c.command;
  const auto ms = c.reals("m", {1, 2, 3}, s);
  const int samples = c.integer("samples", 20, s);
  for (double m : ms)
    if (m != std::floor(m) || m < 1 || m > 6) c.errors.push_back(s + ".m: values must be integers in 1..6");
  c.require(samples >= 0, s + ".samples: must be non-negative");
  return [=](Context& ctx) {
    CsvWriter w(ctx.path("clifford.csv"), {"m", "identity", "error", "pass"});
    int failed = 0, total = 0;
    for (double m : ms) {
      for (const auto& r : clifford_identity_report(static_cast<int>(m), ctx.seed, samples)) {
        w << static_cast<int>(m) << ("\"" + r.name + "\"") << r.error << r.pass;
        w.end_row();
        failed += !r.pass;
        ++total;
        std::cout << "m=" << m << "  " << (r.pass ? "ok   " : "FAIL ") << r.name << "  ("
                  << r.error << ")\n";
      }
    }
    ctx.summary["identities"] = total;
    ctx.summary["failed"] = failed;
    return failed ? kComputeError : kOk;
  };
}

Job cmd_dirac(RunConfig& c) {
  const std::string s = c.command;
  const auto ns = c.reals("n", {16, 32}, s);
  const int degree = c.integer("degree", 1, s);
  const double length = c.real("length", 2 * pi, s);
  for (double n : ns)
    if (n != std::floor(n) || n < 16) c.errors.push_back(s + ".n: sizes must be integers >= 16");
  c.require(degree >= 0, s + ".degree: must be non-negative");
  c.require(length > 0, s + ".length: must be positive");
  return [=](Context& ctx) {
    CsvWriter w(ctx.path("dirac.csv"), {"n", "h", "discrepancy", "ratio", "adjoint_error"});
    double prev = 0;
    std::vector<double> ratios;
    for (double nd : ns) {
      const int n = static_cast<int>(nd);
      const KahlerTorusGrid g(TorusGrid(n, n, length, length), TorusGrid(n, n, length, length));
      double adj;
      {
        const SWFields f = random_smooth_fields(g, degree, ctx.seed);
        const Form01 gam{f.beta, f.alpha};
        const cplx l = inner(dbar0(f.alpha, f.b, degree, g), gam, g);
        const cplx r = inner(f.alpha, dbar0_adjoint(gam, f.b, degree, g), g);
        adj = std::abs(l - r) / std::max(1e-300, std::abs(l));
      }
      const double e = dirac_discrepancy(random_smooth_fields(g, degree, ctx.seed), g);
      const double ratio = prev > 0 ? prev / e : std::nan("");
      if (prev > 0) ratios.push_back(ratio);
      w << n << length / n << e << ratio << adj;
      w.end_row();
      prev = e;
    }
    ctx.summary["ratios"] = ratios;
    return kOk;
  };
}

Job cmd_sw_scan(RunConfig& c) {
  const std::string s = c.command;
  const int n1 = c.integer("n1", 16, s), n2 = c.integer("n2", 128, s);
  const double area1 = c.real("area1", 1.0, s), area2 = c.real("area2", 2.0, s);
  const auto zeros = c.points("zeros", s);
  const auto lambdas = c.reals("lambda", {4, 8, 16, 32}, s);
  std::optional<KahlerTorusGrid> g;
  try {
    g.emplace(TorusGrid(n1, n1, std::sqrt(area1), std::sqrt(area1)),
              TorusGrid(n2, n2, std::sqrt(area2), std::sqrt(area2)));
  } catch (const Error& e) {
    c.errors.push_back(s + ": " + e.what());
  }
  c.require(!lambdas.empty(), s + ".lambda: list must not be empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 1)) c.errors.push_back(s + ".lambda: values must be >= 1");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1]))
      c.errors.push_back(s + ".lambda: list must be increasing");
    if (g && !lambdas.empty() && lambdas[k] >= 1) {
      if (1.0 / lift_scale(lambdas[k]) < 4.0 * g->factor2().h())
        c.errors.push_back(s + ".lambda: " + std::to_string(lambdas[k]) +
                           " under-resolves the vortex core on n2 = " + std::to_string(n2));
      if (4.0 * pi * lambdas[k] * area2 <= 4.0 * pi * static_cast<double>(zeros.size()))
        c.errors.push_back(s + ".lambda: " + std::to_string(lambdas[k]) +
                           " violates lambda * area2 > d");
    }
  }
  return [=](Context& ctx) {
    const auto scan = localization_scan(ModuliPoint{zeros}, lambdas, *g);
    CsvWriter w(ctx.path("sw_scan.csv"), {"lambda", "r1", "r2", "r3", "contour_radius",
                                          "lambda_r2", "outside_deviation", "ok"});
    bool all = true;
    for (std::size_t k = 0; k < scan.size(); ++k) {
      const auto& e = scan[k];
      w << e.lambda << e.residual.r1 << e.residual.r2 << e.residual.r3 << e.contour_radius
        << e.lambda_r2 << e.outside_deviation << e.ok;
      w.end_row();
      all = all && e.ok;
      if (!e.ok) ctx.summary["failures"].push_back({{"lambda", e.lambda}, {"error", e.error}});
      if (e.ok) {
        const VortexSolution v = solve_lift_vortex(ModuliPoint{zeros}, e.lambda, *g);
        const SWFields f = vortex_lift(v, e.lambda, *g);
        char name[64];
        std::snprintf(name, sizeof name, "slice_%02zu.csv", k);
        export_field_csv(ctx.path(name), slice_factor2(f, *g), g->factor2());
      }
    }
    ctx.summary["vacuum_alpha"] = sw_vacuum_alpha();
    return all ? kOk : kComputeError;
  };
}

Job make_job(RunConfig& c) {
  if (c.command == "solve-vortex") return cmd_solve_vortex(c);
  if (c.command == "evolve") return cmd_evolve(c);
  if (c.command == "metric") return cmd_metric(c);
  if (c.command == "geodesic") return cmd_geodesic(c);
  if (c.command == "adiabatic-compare") return cmd_adiabatic(c);
  if (c.command == "clifford-check") return cmd_clifford(c);
  if (c.command == "dirac-check") return cmd_dirac(c);
  return cmd_sw_scan(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortex laboratory"};
  app.require_subcommand(1);
  std::string config, out = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> overrides;
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_given = true; });
    sub->add_option("overrides", overrides, "key=value overrides");
  }
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.cfg.command = app.get_subcommands().front()->get_name();
  ctx.cfg.load_file(config);
  for (const auto& o : overrides) ctx.cfg.apply_override(o);
  const int cfg_seed = ctx.cfg.integer("seed", 1, ctx.cfg.command);
  ctx.seed = seed_given ? seed : static_cast<std::uint64_t>(cfg_seed);

  Job job = make_job(ctx.cfg);
  ctx.cfg.flag_unknown();
  if (!ctx.cfg.errors.empty()) {
    std::cerr << "vlab " << ctx.cfg.command << ": invalid configuration\n";
    for (const auto& e : ctx.cfg.errors) std::cerr << "  - " << e << "\n";
    return kInvalidConfig;
  }

  ctx.out = out;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) {
    std::cerr << "vlab: cannot create output directory " << out << ": " << ec.message() << "\n";
    return kInvalidConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int status = kOk;
  std::string error;
  try {
    status = job(ctx);
  } catch (const std::exception& e) {
    status = kComputeError;
    error = e.what();
    std::cerr << "vlab " << ctx.cfg.command << ": " << error << "\n";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["command"] = ctx.cfg.command;
  manifest["config_file"] = config;
  manifest["config"] = ctx.cfg.echo();
  manifest["seed"] = ctx.seed;
  manifest["status"] = status;
  if (!error.empty()) manifest["error"] = error;
  manifest["versions"] = {{"vlab", std::string(VLAB_VERSION)},
                          {"fftw", std::string(fftw_version)},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", std::string(__VERSION__)}};
  manifest["timings"] = {{"wall_seconds", secs}};
  manifest["artifacts"] = ctx.artifacts;
  manifest["summary"] = ctx.summary;
  std::ofstream(ctx.out / "manifest.json") << manifest.dump(2) << "\n";
  std::cout << manifest["summary"].dump() << "\n";
  return status;
}
