#pragma once

#include <cmath>

#include "vlab/grid.hpp"

namespace vlab {

/// Holomorphic section of the degree-1 bundle with a simple zero at z0,
/// written in the gauge used by the vortex constructor:
///
///   s(z) = theta1(pi (z - z0) / lx | i ly / lx) * exp(-pi (y - y0)^2 / area)
///          * exp(i (pi x / lx - (pi + 2 pi x0 / lx) y / ly)).
///
/// The Gaussian is folded into the theta series so every term is bounded by 1,
/// which keeps the evaluation stable for any offset y - y0.
inline cplx theta_section(double x, double y, cplx z0, double lx, double ly) {
  const double r = ly / lx;
  const double xi = pi * (x - z0.real()) / lx;
  const double s = (y - z0.imag()) / ly;
  // theta1(zeta) = -i sum_n (-1)^n q^{(n+1/2)^2} exp(i (2n+1) zeta)
  const double cutoff = std::sqrt(40.0 / (pi * r)) + 1.0;
  const int nlo = static_cast<int>(std::floor(-0.5 - s - cutoff));
  const int nhi = static_cast<int>(std::ceil(-0.5 - s + cutoff));
  cplx sum{};
  for (int n = nlo; n <= nhi; ++n) {
    const double t = n + 0.5 + s;
    const double mag = std::exp(-pi * r * t * t);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    sum += sign * mag * std::polar(1.0, (2 * n + 1) * xi);
  }
  const double beta = pi * x / lx - (pi + 2.0 * pi * z0.real() / lx) * y / ly;
  return cplx(0.0, -1.0) * sum * std::polar(1.0, beta);
}

}  // namespace vlab
