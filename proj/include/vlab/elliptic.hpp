#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "vlab/spectral.hpp"

namespace vlab {

struct CgResult {
  rvec x;
  int iterations = 0;
  double residual = 0;  // final sup-norm of b - A x
};

inline double dot(const rvec& a, const rvec& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Preconditioned conjugate gradients for a symmetric positive definite A.
/// Stops when sup|b - A x| < tol.
template <class ApplyA, class ApplyM>
CgResult pcg(ApplyA&& A, ApplyM&& Minv, const rvec& b, rvec x, double tol, int max_iter = 500) {
  if (x.empty()) x.assign(b.size(), 0.0);
  rvec Ax = A(x);
  rvec r(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = b[k] - Ax[k];
  CgResult res;
  res.residual = sup_norm(r);
  if (res.residual < tol) {
    res.x = std::move(x);
    return res;
  }
  rvec z = Minv(r);
  rvec p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    rvec Ap = A(p);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0)) throw NumericalError("pcg: operator is not positive definite");
    const double alpha = rz / pAp;
    for (std::size_t k = 0; k < b.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    res.iterations = it;
    res.residual = sup_norm(r);
    if (res.residual < tol) {
      res.x = std::move(x);
      return res;
    }
    z = Minv(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < b.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  throw NumericalError("pcg: no convergence after " + std::to_string(max_iter) +
                       " iterations, residual " + std::to_string(res.residual));
}

/// Solves (c(x) - Lap) u = f for a positive weight c, with the spectral
/// preconditioner (mean(c) - Lap)^-1.
inline CgResult solve_screened(const Spectral& sp, const rvec& c, const rvec& f, double tol,
                               rvec guess = {}) {
  double cbar = 0;
  for (double v : c) cbar += v;
  cbar /= static_cast<double>(c.size());
  if (!(cbar > 0)) throw NumericalError("solve_screened: weight has nonpositive mean");
  auto A = [&](const rvec& u) {
    rvec lu = sp.laplacian(u);
    for (std::size_t k = 0; k < u.size(); ++k) lu[k] = c[k] * u[k] - lu[k];
    return lu;
  };
  auto M = [&](const rvec& r) {
    return sp.apply_symbol(r, [&](int i, int j) { return 1.0 / (cbar - sp.laplace_symbol(i, j)); });
  };
  return pcg(A, M, f, std::move(guess), tol, 1000);
}

}  // namespace vlab
