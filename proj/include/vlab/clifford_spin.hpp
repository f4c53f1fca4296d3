#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vlab/grid.hpp"

namespace vlab {

/// Element of the complexified Clifford algebra Cl(n) with e_i^2 = -1.
/// A basis blade e_I (I sorted) is keyed by the bitmask of I, bit i-1 for e_i.
struct CliffordElement {
  int n = 0;
  std::map<unsigned, cplx> coeffs;

  static CliffordElement scalar(int n, cplx c) {
    CliffordElement x{n, {}};
    if (c != 0.0) x.coeffs[0] = c;
    return x;
  }

  /// e_{i1} e_{i2} ... in the given order (1-based), reduced to a sorted blade.
  static CliffordElement product_of(int n, const std::vector<int>& idx);

  static CliffordElement basis(int n, int i) { return product_of(n, {i}); }

  static std::vector<int> indices(unsigned mask) {
    std::vector<int> out;
    for (int i = 0; mask; ++i, mask >>= 1)
      if (mask & 1u) out.push_back(i + 1);
    return out;
  }

  cplx coeff(unsigned mask) const {
    auto it = coeffs.find(mask);
    return it == coeffs.end() ? cplx(0.0) : it->second;
  }

  CliffordElement& operator+=(const CliffordElement& o) {
    if (o.n != n) throw DomainError("CliffordElement: mismatched n");
    for (const auto& [k, v] : o.coeffs) add(k, v);
    return *this;
  }
  friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) { return a += b; }
  friend CliffordElement operator*(cplx s, CliffordElement a) {
    for (auto& [k, v] : a.coeffs) v *= s;
    a.prune();
    return a;
  }

  void add(unsigned mask, cplx v) {
    auto& c = coeffs[mask];
    c += v;
    if (c == 0.0) coeffs.erase(mask);
  }

  void prune(double tol = 0.0) {
    for (auto it = coeffs.begin(); it != coeffs.end();)
      it = std::abs(it->second) <= tol ? coeffs.erase(it) : std::next(it);
  }

  /// Largest coefficient of a - b.
  friend double distance(const CliffordElement& a, const CliffordElement& b) {
    double d = 0;
    for (const auto& [k, v] : a.coeffs) d = std::max(d, std::abs(v - b.coeff(k)));
    for (const auto& [k, v] : b.coeffs) d = std::max(d, std::abs(v - a.coeff(k)));
    return d;
  }
};

namespace detail {

// Sign of e_A e_B = sign * e_{A xor B}: one factor -1 per transposition and
// per shared generator (e_i^2 = -1).
inline double blade_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned bb = b; bb; bb &= bb - 1) {
    const unsigned low = bb & (~bb + 1);
    swaps += std::popcount(a & ~((low << 1) - 1));
  }
  swaps += std::popcount(a & b);
  return swaps % 2 ? -1.0 : 1.0;
}

}  // namespace detail

inline CliffordElement clifford_product(const CliffordElement& a, const CliffordElement& b) {
  if (a.n != b.n) throw DomainError("clifford_product: mismatched n");
  CliffordElement out{a.n, {}};
  for (const auto& [ka, va] : a.coeffs)
    for (const auto& [kb, vb] : b.coeffs) out.add(ka ^ kb, detail::blade_sign(ka, kb) * va * vb);
  return out;
}

inline CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) {
  return clifford_product(a, b);
}

inline CliffordElement CliffordElement::product_of(int n, const std::vector<int>& idx) {
  if (n < 1 || n > 31) throw DomainError("CliffordElement: n out of range");
  CliffordElement x = scalar(n, 1.0);
  for (int i : idx) {
    if (i < 1 || i > n) throw DomainError("CliffordElement: index out of range");
    CliffordElement e{n, {{1u << (i - 1), 1.0}}};
    x = x * e;
  }
  return x;
}

/// omega = e_1 e_2 ... e_n for even n.
inline CliffordElement volume_element(int n) {
  if (n < 2 || n % 2) throw DomainError("volume_element: n must be even and positive");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i + 1;
  return CliffordElement::product_of(n, idx);
}

/// Complex spin representation of Cl(2m) on W = Lambda^{0,*}(C^m), realized
/// by exterior and interior multiplication. The basis of W is indexed by
/// bitmasks of {1..m} (bit k-1 for d zbar_k); the Hermitian metric is the
/// standard one.
struct SpinRep {
  int m = 0;
  std::vector<Eigen::MatrixXcd> gamma;  // images of e_1 .. e_{2m}

  int n() const { return 2 * m; }
  int dim() const { return 1 << m; }

  /// Gamma(v) for a real vector v of length 2m.
  Eigen::MatrixXcd of_vector(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != n()) throw DomainError("SpinRep: vector length must be 2m");
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int i = 0; i < n(); ++i) M += v[i] * gamma[i];
    return M;
  }

  /// Gamma of a Clifford element, extended as an algebra map.
  Eigen::MatrixXcd of_element(const CliffordElement& x) const {
    if (x.n != n()) throw DomainError("SpinRep: element lives in the wrong Clifford algebra");
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim(), dim());
    for (const auto& [mask, c] : x.coeffs) {
      Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(dim(), dim());
      for (int i : CliffordElement::indices(mask)) P = P * gamma[i - 1];
      M += c * P;
    }
    return M;
  }
};

namespace detail {

// Creation (d zbar_k wedge) and annihilation (contraction) on Lambda^{0,*}.
inline Eigen::MatrixXcd fermion(int m, int k, bool create) {
  const int N = 1 << m;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  const unsigned bit = 1u << k;
  for (unsigned w = 0; w < static_cast<unsigned>(N); ++w) {
    if (static_cast<bool>(w & bit) == create) continue;
    const double s = std::popcount(w & (bit - 1)) % 2 ? -1.0 : 1.0;
    M(w ^ bit, w) = s;
  }
  return M;
}

}  // namespace detail

/// Gamma(v) w = v^{0,1} wedge w - v^{1,0} contract w. With nu_k = v_{2k-1} + i v_{2k}
/// this is sum_k (nu_k c_k^dag - conj(nu_k) c_k), so Gamma(v)^2 = -|v|^2.
inline SpinRep build_spin_rep(int m) {
  if (m < 1 || m > 6) throw DomainError("build_spin_rep: m must lie in 1..6");
  SpinRep r;
  r.m = m;
  for (int k = 0; k < m; ++k) {
    const Eigen::MatrixXcd cd = detail::fermion(m, k, true), c = detail::fermion(m, k, false);
    r.gamma.push_back(cd - c);                           // nu_k = 1
    r.gamma.push_back(cplx(0, 1) * cd + cplx(0, 1) * c);  // nu_k = i
  }
  return r;
}

/// P(+-) = 1/2 (Id +- (-i)^m Gamma(omega)), projecting on W(+-) = {Gamma(omega) w = +-i^m w}.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> semi_spinor_projectors(const SpinRep& rep) {
  const Eigen::MatrixXcd G = rep.of_element(volume_element(rep.n()));
  const cplx ph = std::pow(cplx(0, -1), rep.m);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(rep.dim(), rep.dim());
  return {0.5 * (I + ph * G), 0.5 * (I - ph * G)};
}

/// Orthonormal basis of W+ (plus) or W- as columns, in increasing basis order.
/// Both halves are spanned by basis forms of fixed parity.
inline Eigen::MatrixXcd half_basis(const SpinRep& rep, bool plus) {
  const auto [Pp, Pm] = semi_spinor_projectors(rep);
  const Eigen::MatrixXcd& P = plus ? Pp : Pm;
  std::vector<int> cols;
  for (int k = 0; k < rep.dim(); ++k)
    if (std::abs(P(k, k) - 1.0) < 1e-12) cols.push_back(k);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(rep.dim(), static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) B(cols[c], static_cast<int>(c)) = 1.0;
  if ((P - B * B.adjoint()).norm() > 1e-12)
    throw NumericalError("half_basis: projector is not diagonal in the form basis");
  return B;
}

enum class Scalar { real, imaginary };

/// Exterior k-form on R^n with coefficients stored on increasing index sets
/// (bitmask keys); access through any ordering applies the permutation sign,
/// so antisymmetry holds by construction. A real form has real coefficients,
/// an imaginary form purely imaginary ones.
struct Form {
  int n = 0, degree = 0;
  Scalar type = Scalar::real;
  std::map<unsigned, cplx> coeffs;

  Form() = default;
  Form(int n_, int k, Scalar t = Scalar::real) : n(n_), degree(k), type(t) {
    if (n < 1 || n > 31 || k < 0 || k > n) throw DomainError("Form: invalid degree or dimension");
  }

  // Sorted mask and permutation sign of an index list; sign 0 on repeats.
  std::pair<unsigned, double> key(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != degree) throw DomainError("Form: wrong number of indices");
    unsigned mask = 0;
    int inversions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (idx[a] < 1 || idx[a] > n) throw DomainError("Form: index out of range");
      for (std::size_t b = a + 1; b < idx.size(); ++b) inversions += idx[a] > idx[b];
      if (mask & (1u << (idx[a] - 1))) return {0u, 0.0};
      mask |= 1u << (idx[a] - 1);
    }
    return {mask, inversions % 2 ? -1.0 : 1.0};
  }

  cplx get(const std::vector<int>& idx) const {
    const auto [mask, s] = key(idx);
    if (s == 0.0) return 0.0;
    auto it = coeffs.find(mask);
    return it == coeffs.end() ? cplx(0.0) : s * it->second;
  }

  /// Sets the coefficient of e_{i1} ^ ... ^ e_{ik}.
  Form& set(const std::vector<int>& idx, cplx v) {
    const auto [mask, s] = key(idx);
    if (s == 0.0) {
      if (v != 0.0) throw DomainError("Form: repeated index with nonzero value");
      return *this;
    }
    check_type(v);
    if (v == 0.0)
      coeffs.erase(mask);
    else
      coeffs[mask] = s * v;
    return *this;
  }

  void check_type(cplx v, double tol = 1e-12) const {
    const double bad = type == Scalar::real ? std::abs(v.imag()) : std::abs(v.real());
    if (bad > tol * std::max(1.0, std::abs(v)))
      throw DomainError(type == Scalar::real ? "Form: real form given a complex value"
                                             : "Form: imaginary form given a real part");
  }

  Form& operator+=(const Form& o) {
    if (o.n != n || o.degree != degree || o.type != type)
      throw DomainError("Form: incompatible operands");
    for (const auto& [k, v] : o.coeffs) {
      auto& c = coeffs[k];
      c += v;
      if (c == 0.0) coeffs.erase(k);
    }
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator*(double s, Form a) {
    for (auto& [k, v] : a.coeffs) v *= s;
    return a;
  }
  /// Multiplication by i swaps real and imaginary forms.
  Form times_i() const {
    Form f = *this;
    f.type = type == Scalar::real ? Scalar::imaginary : Scalar::real;
    for (auto& [k, v] : f.coeffs) v *= cplx(0, 1);
    return f;
  }

  friend double distance(const Form& a, const Form& b) {
    double d = 0;
    for (const auto& [k, v] : a.coeffs) {
      auto it = b.coeffs.find(k);
      d = std::max(d, std::abs(v - (it == b.coeffs.end() ? cplx(0.0) : it->second)));
    }
    for (const auto& [k, v] : b.coeffs)
      if (!a.coeffs.count(k)) d = std::max(d, std::abs(v));
    return d;
  }
};

/// Hodge star for the standard orientation e_1 ^ ... ^ e_n.
inline Form hodge_star(const Form& f) {
  Form out(f.n, f.n - f.degree, f.type);
  const unsigned full = f.n == 32 ? ~0u : (1u << f.n) - 1;
  for (const auto& [mask, v] : f.coeffs) {
    const unsigned rest = full & ~mask;
    // e_I ^ e_{I^c} = sign * vol, counted as inversions of the concatenation.
    int inv = 0;
    for (int i : CliffordElement::indices(mask)) inv += std::popcount(rest & ((1u << (i - 1)) - 1));
    out.coeffs[rest] = (inv % 2 ? -1.0 : 1.0) * v;
  }
  return out;
}

/// Basis of selfdual (plus) or anti-selfdual 2-forms on R^4:
/// e12 +- e34, e13 -+ e24, e14 +- e23.
inline std::vector<Form> dual_basis(bool plus) {
  const double s = plus ? 1.0 : -1.0;
  std::vector<Form> b(3, Form(4, 2));
  b[0].set({1, 2}, 1.0).set({3, 4}, s);
  b[1].set({1, 3}, 1.0).set({2, 4}, -s);
  b[2].set({1, 4}, 1.0).set({2, 3}, s);
  return b;
}

/// (Self)dual projections 1/2 (f +- *f) of a 2-form in dimension 4.
inline Form selfdual_part(const Form& f, bool plus = true) {
  if (f.n != 4 || f.degree != 2) throw DomainError("selfdual_part: needs a 2-form on R^4");
  return 0.5 * (f + (plus ? 1.0 : -1.0) * hodge_star(f));
}

/// Alt: e_{i1} ^ ... ^ e_{ik} (distinct, orthonormal) -> e_{i1} ... e_{ik}.
inline CliffordElement alt_map(const Form& f) {
  CliffordElement x{f.n, {}};
  for (const auto& [mask, v] : f.coeffs) x.add(mask, v);
  return x;
}

/// (1/k!) sum_sigma sgn(sigma) v_sigma(1) ... v_sigma(k) for vectors in R^n,
/// the defining formula of Alt on decomposable forms.
inline CliffordElement alternating_product(int n, const std::vector<std::vector<double>>& vs) {
  const int k = static_cast<int>(vs.size());
  std::vector<CliffordElement> e;
  for (const auto& v : vs) {
    if (static_cast<int>(v.size()) != n) throw DomainError("alternating_product: bad vector");
    CliffordElement x{n, {}};
    for (int i = 0; i < n; ++i) x.add(1u << i, v[i]);
    e.push_back(x);
  }
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  CliffordElement sum{n, {}};
  double fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;
  do {
    int inv = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) inv += perm[a] > perm[b];
    CliffordElement p = CliffordElement::scalar(n, 1.0);
    for (int i : perm) p = p * e[i];
    sum += ((inv % 2 ? -1.0 : 1.0) / fact) * p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  sum.prune(1e-14);
  return sum;
}

/// Wedge product of vectors as a form.
inline Form wedge(int n, const std::vector<std::vector<double>>& vs) {
  const int k = static_cast<int>(vs.size());
  Form f(n, k);
  // Coefficient on e_I is the k x k minor of the vector matrix on columns I.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    const auto idx = CliffordElement::indices(mask);
    Eigen::MatrixXd M(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) M(a, b) = vs[a][idx[b] - 1];
    const double det = k == 0 ? 1.0 : M.determinant();
    if (det != 0.0) f.coeffs[mask] = det;
  }
  return f;
}

/// Clifford multiplication by forms, rho = Gamma o Alt.
inline Eigen::MatrixXcd rho(const Form& f, const SpinRep& rep) {
  if (f.n != rep.n()) throw DomainError("rho: form dimension differs from 2m");
  return rep.of_element(alt_map(f));
}

/// Restriction of an endomorphism of W to W(+-) in the half_basis coordinates.
inline Eigen::MatrixXcd restrict_to_half(const Eigen::MatrixXcd& M, const SpinRep& rep,
                                         bool plus) {
  const Eigen::MatrixXcd B = half_basis(rep, plus);
  return B.adjoint() * M * B;
}

/// Inverse of rho restricted to W(+-) for n = 4: the imaginary (anti-)selfdual
/// 2-form whose Clifford action on the chosen half is `endo`.
inline Form sigma_pm(const Eigen::MatrixXcd& endo, const SpinRep& rep, bool plus = true,
                     double tol = 1e-10) {
  if (rep.m != 2) throw DomainError("sigma_pm: defined for n = 4 only");
  if (endo.rows() != 2 || endo.cols() != 2) throw ShapeError("sigma_pm: expected a 2x2 matrix");
  if ((endo - endo.adjoint()).norm() > tol) throw DomainError("sigma_pm: input is not Hermitian");
  if (std::abs(endo.trace()) > tol) throw DomainError("sigma_pm: input is not traceless");
  const auto basis = dual_basis(plus);
  std::vector<Eigen::MatrixXcd> imgs;
  for (const auto& b : basis) imgs.push_back(restrict_to_half(rho(b.times_i(), rep), rep, plus));
  // Real least squares in the trace inner product; the images span the
  // traceless Hermitian matrices, so the residual vanishes.
  Eigen::Matrix3d A;
  Eigen::Vector3d r;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) A(a, b) = (imgs[a].adjoint() * imgs[b]).trace().real();
    r(a) = (imgs[a].adjoint() * endo).trace().real();
  }
  const Eigen::Vector3d t = A.ldlt().solve(r);
  Form out(4, 2, Scalar::imaginary);
  for (int a = 0; a < 3; ++a) out += t(a) * basis[a].times_i();
  for (auto it = out.coeffs.begin(); it != out.coeffs.end();)
    it = std::abs(it->second) < 1e-15 ? out.coeffs.erase(it) : std::next(it);
  return out;
}

/// (Phi Phi^*)_0 = Phi Phi^* - 1/2 |Phi|^2 Id for Phi in W+ (half_basis coordinates).
inline Eigen::MatrixXcd quadratic_map(const Eigen::VectorXcd& phi, const SpinRep& rep) {
  if (rep.m != 2) throw DomainError("quadratic_map: defined for n = 4 only");
  if (phi.size() != 2) throw ShapeError("quadratic_map: Phi must have two components in W+");
  return phi * phi.adjoint() - 0.5 * phi.squaredNorm() * Eigen::MatrixXcd::Identity(2, 2);
}

struct IdentityCheck {
  std::string name;
  double error = 0;
  bool pass = true;
};

/// Exhaustive identity checks of the algebra and its spin representation for
/// one m, over all basis elements plus `samples` random vectors and forms.
inline std::vector<IdentityCheck> clifford_identity_report(int m, std::uint64_t seed,
                                                           int samples = 20,
                                                           double tol = 1e-12) {
  const int n = 2 * m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  auto rvecn = [&] {
    std::vector<double> v(n);
    for (double& x : v) x = N01(rng);
    return v;
  };
  std::vector<IdentityCheck> out;
  auto put = [&](std::string name, double err) {
    out.push_back({std::move(name), err, err <= tol});
  };

  double e2 = 0, anti = 0;
  for (int i = 1; i <= n; ++i) {
    const auto ei = CliffordElement::basis(n, i);
    e2 = std::max(e2, distance(ei * ei, CliffordElement::scalar(n, -1.0)));
    for (int j = 1; j <= n; ++j)
      if (j != i) {
        const auto ej = CliffordElement::basis(n, j);
        anti = std::max(anti, distance(ei * ej + ej * ei, CliffordElement{n, {}}));
      }
  }
  put("e_i^2 = -1", e2);
  put("e_i e_j + e_j e_i = 0", anti);
  const auto w = volume_element(n);
  put("omega^2 = (-1)^m", distance(w * w, CliffordElement::scalar(n, m % 2 ? -1.0 : 1.0)));

  const SpinRep rep = build_spin_rep(m);
  const int N = rep.dim();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  double g2 = 0, ganti = 0;
  for (int i = 0; i < n; ++i) {
    g2 = std::max(g2, (rep.gamma[i] * rep.gamma[i] + I).cwiseAbs().maxCoeff());
    for (int j = 0; j < n; ++j)
      if (j != i)
        ganti = std::max(
            ganti, (rep.gamma[i] * rep.gamma[j] + rep.gamma[j] * rep.gamma[i]).cwiseAbs().maxCoeff());
  }
  put("Gamma(e_i)^2 = -Id", g2);
  put("Gamma(e_i) Gamma(e_j) + Gamma(e_j) Gamma(e_i) = 0", ganti);

  double skew = 0, norm = 0, unit = 0;
  std::vector<std::vector<double>> vs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    vs.push_back(e);
  }
  for (int s = 0; s < samples; ++s) vs.push_back(rvecn());
  for (const auto& v : vs) {
    const Eigen::MatrixXcd G = rep.of_vector(v);
    double v2 = 0;
    for (double x : v) v2 += x * x;
    skew = std::max(skew, (G.adjoint() + G).cwiseAbs().maxCoeff());
    norm = std::max(norm, (G.adjoint() * G - v2 * I).cwiseAbs().maxCoeff() / std::max(1.0, v2));
    const Eigen::MatrixXcd U = G / std::sqrt(v2);
    unit = std::max(unit, (U.adjoint() * U - I).cwiseAbs().maxCoeff());
  }
  put("Gamma*(v) + Gamma(v) = 0", skew);
  put("Gamma*(v) Gamma(v) = |v|^2 Id", norm);
  put("Gamma(v) unitary for unit v", unit);

  const auto [Pp, Pm] = semi_spinor_projectors(rep);
  put("P+ + P- = Id", (Pp + Pm - I).cwiseAbs().maxCoeff());
  put("P+^2 = P+, P-^2 = P-",
      std::max((Pp * Pp - Pp).cwiseAbs().maxCoeff(), (Pm * Pm - Pm).cwiseAbs().maxCoeff()));
  put("P+ P- = 0", (Pp * Pm).cwiseAbs().maxCoeff());
  put("rank P+ = rank P- = 2^(m-1)",
      std::max(std::abs(Pp.trace().real() - N / 2), std::abs(Pm.trace().real() - N / 2)));
  double inter = 0, even = 0;
  for (const auto& v : vs) {
    const Eigen::MatrixXcd G = rep.of_vector(v);
    inter = std::max(inter, (Pm * G * Pp - G * Pp).cwiseAbs().maxCoeff());
    inter = std::max(inter, (Pp * G * Pm - G * Pm).cwiseAbs().maxCoeff());
  }
  for (std::size_t a = 0; a + 1 < vs.size(); ++a) {
    const Eigen::MatrixXcd E = rep.of_vector(vs[a]) * rep.of_vector(vs[a + 1]);
    even = std::max(even, (Pm * E * Pp).cwiseAbs().maxCoeff() + (Pp * E * Pm).cwiseAbs().maxCoeff());
  }
  put("Gamma(v) interchanges W+ and W-", inter);
  put("even products preserve W+ and W-", even);

  // rho = Gamma o Alt on basis 2-forms, and Alt on decomposable forms.
  double alt = 0, rhoerr = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      Form f(n, 2);
      f.set({i, j}, 1.0);
      const Eigen::MatrixXcd direct = rep.gamma[i - 1] * rep.gamma[j - 1];
      rhoerr = std::max(rhoerr, (rho(f, rep) - direct).cwiseAbs().maxCoeff());
    }
  for (int s = 0; s < samples; ++s) {
    const std::vector<std::vector<double>> two{rvecn(), rvecn()};
    alt = std::max(alt, distance(alt_map(wedge(n, two)), alternating_product(n, two)));
  }
  put("rho(e_i ^ e_j) = Gamma(e_i) Gamma(e_j)", rhoerr);
  put("Alt(v1 ^ v2) = 1/2 (v1 v2 - v2 v1)", alt);

  // Real 2-forms act on W(+-) by anti-Hermitian maps, traceless once the
  // halves have dimension > 1 (m >= 2).
  double skewh = 0;
  for (int s = 0; s < samples; ++s) {
    Form f(n, 2);
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) f.set({i, j}, N01(rng));
    const Eigen::MatrixXcd R = rho(f, rep);
    for (bool plus : {true, false}) {
      const Eigen::MatrixXcd Rh = restrict_to_half(R, rep, plus);
      const double tr = m >= 2 ? std::abs(Rh.trace()) : 0.0;
      skewh = std::max(skewh, (Rh + Rh.adjoint()).cwiseAbs().maxCoeff() + tr);
    }
  }
  put(m >= 2 ? "rho(real 2-form) on W(+-) traceless anti-Hermitian"
             : "rho(real 2-form) on W(+-) anti-Hermitian",
      skewh);

  if (m == 2) {
    double split = 0, trip = 0;
    for (bool plus : {true, false})
      for (const Form& b : dual_basis(plus)) {
        const Eigen::MatrixXcd R = rho(b, rep);
        split = std::max(split, restrict_to_half(R, rep, !plus).cwiseAbs().maxCoeff());
      }
    for (int s = 0; s < samples; ++s)
      for (bool plus : {true, false}) {
        Form eta(4, 2, Scalar::imaginary);
        for (const Form& b : dual_basis(plus)) eta += N01(rng) * b.times_i();
        const Form back = sigma_pm(restrict_to_half(rho(eta, rep), rep, plus), rep, plus);
        trip = std::max(trip, distance(back, eta));
      }
    put("selfdual forms annihilate W-, anti-selfdual annihilate W+", split);
    put("sigma(rho(eta)) = eta", trip);
  }
  return out;
}

}  // namespace vlab
