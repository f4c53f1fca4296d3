#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "vlab/vlab.hpp"

namespace vlab::testing {

/// Random smooth periodic real field made of a few low Fourier modes.
inline rvec smooth_field(const TorusGrid& g, std::uint64_t seed, double amp = 1.0, int modes = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  rvec f(g.size(), 0.0);
  for (int kx = -modes; kx <= modes; ++kx)
    for (int ky = -modes; ky <= modes; ++ky) {
      const double c = amp * N(rng) / (1.0 + kx * kx + ky * ky), ph = 2 * pi * N(rng);
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
          f[g.index(i, j)] +=
              c * std::cos(2 * pi * (kx * g.x(i) / g.lx() + ky * g.y(j) / g.ly()) + ph);
    }
  return f;
}

inline double sup_diff(const rvec& a, const rvec& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline rvec abs_phi(const GaugePair& p) {
  rvec out(p.phi.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::abs(p.phi[k]);
  return out;
}

/// Radially symmetric unit vortex on the plane, phi = f(r) e^{i theta},
/// a_theta = a(r) / r, from the first-order equations
///   f' = f (1 - a) / r,   a' = r (1 - f^2) / 2,
/// integrated by RK4 and shot on f'(0).
class RadialVortex {
 public:
  explicit RadialVortex(double rmax = 12.0, double dr = 1e-3) : dr_(dr) {
    double lo = 0.5, hi = 1.2;
    for (int it = 0; it < 60; ++it) {
      const double c = 0.5 * (lo + hi);
      (shoot(c, rmax, nullptr) > 0 ? hi : lo) = c;
    }
    slope_ = 0.5 * (lo + hi);
    shoot(slope_, rmax, &samples_);
    energy_ = integrate_energy();
  }

  double slope() const { return slope_; }
  double energy() const { return energy_; }

  /// f(r), linear interpolation on the shooting grid.
  double f(double r) const {
    const double s = r / dr_;
    const std::size_t k = static_cast<std::size_t>(s);
    if (k + 1 >= samples_.size()) return samples_.back().f;
    const double t = s - k;
    return (1 - t) * samples_[k].f + t * samples_[k + 1].f;
  }

 private:
  struct Sample {
    double f, a;
  };

  // +1 when f overshoots 1, -1 when it turns back down, 0 if neither.
  int shoot(double c, double rmax, std::vector<Sample>* out) const {
    auto rhs = [](double r, double f, double a) {
      return std::pair<double, double>{f * (1 - a) / r, 0.5 * r * (1 - f * f)};
    };
    double r = dr_, f = c * r, a = r * r / 4;
    if (out) out->assign(1, Sample{0.0, 0.0}), out->push_back({f, a});
    while (r < rmax) {
      const auto [k1f, k1a] = rhs(r, f, a);
      const auto [k2f, k2a] = rhs(r + dr_ / 2, f + dr_ / 2 * k1f, a + dr_ / 2 * k1a);
      const auto [k3f, k3a] = rhs(r + dr_ / 2, f + dr_ / 2 * k2f, a + dr_ / 2 * k2a);
      const auto [k4f, k4a] = rhs(r + dr_, f + dr_ * k3f, a + dr_ * k3a);
      f += dr_ / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
      a += dr_ / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
      r += dr_;
      if (!out) {
        if (f > 1) return 1;
        if (a > 1) return -1;
      } else {
        // Past the shooting accuracy the profile is frozen at its asymptote.
        if (f > 1 || a > 1 || out->back().f > 1 - 1e-9) f = 1, a = 1;
        out->push_back({f, a});
      }
    }
    return 0;
  }

  // U = 1/2 int { b^2 + f'^2 + f^2 (1 - a)^2 / r^2 + (1 - f^2)^2 / 4 } 2 pi r dr.
  double integrate_energy() const {
    double s = 0;
    for (std::size_t k = 1; k + 1 < samples_.size(); ++k) {
      const double r = k * dr_;
      const double fp = (samples_[k + 1].f - samples_[k - 1].f) / (2 * dr_);
      const double ap = (samples_[k + 1].a - samples_[k - 1].a) / (2 * dr_);
      const double f = samples_[k].f, a = samples_[k].a;
      const double dens = (ap / r) * (ap / r) + fp * fp + f * f * (1 - a) * (1 - a) / (r * r) +
                          0.25 * (1 - f * f) * (1 - f * f);
      s += 0.5 * dens * 2 * pi * r * dr_;
    }
    return s;
  }

  double dr_, slope_ = 0, energy_ = 0;
  std::vector<Sample> samples_;
};

}  // namespace vlab::testing
