#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "vlab/errors.hpp"

namespace vlab {

using cplx = std::complex<double>;
using rvec = std::vector<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;

/// Uniform collocated grid on the flat torus [0, lx) x [0, ly).
/// Samples are stored row-major with x fastest: index(i, j) = j * nx + i.
class TorusGrid {
 public:
  TorusGrid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 16 || ny < 16)
      throw DomainError("TorusGrid: need nx, ny >= 16, got " + std::to_string(nx) + "x" +
                        std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
      throw DomainError("TorusGrid: side lengths must be positive and finite");
  }

  /// Square torus of the given area.
  static TorusGrid square(int n, double area) {
    const double l = std::sqrt(area);
    return TorusGrid(n, n, l, l);
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }
  double hx() const noexcept { return lx_ / nx_; }
  double hy() const noexcept { return ly_ / ny_; }
  double h() const noexcept { return std::max(hx(), hy()); }
  double area() const noexcept { return lx_ * ly_; }
  /// Quadrature weight of one sample.
  double weight() const noexcept { return hx() * hy(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  double x(int i) const noexcept { return i * hx(); }
  double y(int j) const noexcept { return j * hy(); }

  bool operator==(const TorusGrid& o) const noexcept {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

  /// Reduce a point into the fundamental domain.
  cplx reduce(cplx z) const {
    double x = std::fmod(z.real(), lx_);
    double y = std::fmod(z.imag(), ly_);
    if (x < 0) x += lx_;
    if (y < 0) y += ly_;
    if (x >= lx_) x -= lx_;
    if (y >= ly_) y -= ly_;
    return {x, y};
  }

  /// Shortest lattice representative of a displacement.
  cplx min_image(cplx dz) const {
    double x = dz.real() - lx_ * std::round(dz.real() / lx_);
    double y = dz.imag() - ly_ * std::round(dz.imag() / ly_);
    return {x, y};
  }

  double torus_distance(cplx a, cplx b) const { return std::abs(min_image(a - b)); }

 private:
  int nx_, ny_;
  double lx_, ly_;
};

template <class V>
void check_size(const V& v, const TorusGrid& g, const char* what) {
  if (v.size() != g.size())
    throw ShapeError(std::string(what) + ": array has " + std::to_string(v.size()) +
                     " samples, grid has " + std::to_string(g.size()));
}

inline double sup_norm(const rvec& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sup_norm(const cvec& v) {
  double m = 0;
  for (const cplx& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace vlab
