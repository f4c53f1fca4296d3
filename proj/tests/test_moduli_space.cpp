#include <gtest/gtest.h>

#include "common.hpp"

using namespace vlab;

namespace {
const TorusGrid G32 = TorusGrid::square(32, 100.0);
const TorusGrid G48 = TorusGrid::square(48, 100.0);

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }
}  // namespace

TEST(TangentSolution, OneVortex) {
  const cplx z(5, 5);
  const auto t = tangent_solution(ModuliPoint{{z}}, {1.0, 0.0}, G48);
  EXPECT_LT(t.orthogonality_residual, 1e-8);
  double near = 0, far = 0;
  for (int j = 0; j < G48.ny(); ++j)
    for (int i = 0; i < G48.nx(); ++i) {
      const double r = G48.torus_distance(cplx(G48.x(i), G48.y(j)), z);
      const double a = std::abs(t.dphi[G48.index(i, j)]);
      (r < 2 ? near : far) = std::max(r < 2 ? near : far, r < 2 ? a : (r > 4 ? a : 0.0));
    }
  EXPECT_GT(near, 0.1);
  EXPECT_LT(far, 0.05 * near);
}

TEST(TangentSolution, Linearity) {
  const ModuliPoint m{{cplx(3, 4), cplx(7, 5)}};
  const auto zero = tangent_solution(m, {0, 0, 0, 0}, G32);
  EXPECT_EQ(sup_norm(zero.dphi), 0.0);
  const auto a = tangent_solution(m, {0.3, -0.1, 0.2, 0.5}, G32);
  const auto b = tangent_solution(m, {0.9, -0.3, 0.6, 1.5}, G32);
  double e = 0;
  for (std::size_t k = 0; k < G32.size(); ++k) e = std::max(e, std::abs(b.dphi[k] - 3.0 * a.dphi[k]));
  EXPECT_LT(e, 1e-12 * std::max(1.0, sup_norm(b.dphi)));
  EXPECT_THROW(tangent_solution(m, {1.0}, G32), ShapeError);
}

TEST(Metric, OneVortexIsConstantMultipleOfIdentity) {
  std::vector<Eigen::MatrixXd> gs;
  for (cplx z : {cplx(5, 5), cplx(1.3, 2.7), cplx(8.1, 0.4), cplx(6.6, 9.2), cplx(2.2, 7.7)})
    gs.push_back(metric_at(ModuliPoint{{z}}, G48).g);
  const double m = gs[0](0, 0);
  // Frozen value of the d = 1 metric coefficient on this grid.
  EXPECT_NEAR(m, 3.1416, 0.03);
  for (const auto& g : gs) {
    EXPECT_LT(rel(g, m * Eigen::MatrixXd::Identity(2, 2)), 0.01);
    EXPECT_LT((g - g.transpose()).norm() / g.norm(), 1e-8);
  }
}

TEST(Metric, SeparatedPairIsBlockDiagonal) {
  // Side 20 leaves room for a separation of ten core radii.
  const TorusGrid g = TorusGrid::square(96, 400.0);
  const double m = metric_at(ModuliPoint{{cplx(10, 10)}}, g).g(0, 0);
  const auto s = metric_at(ModuliPoint{{cplx(5, 5), cplx(15, 15)}}, g);
  EXPECT_LT(rel(s.g, m * Eigen::MatrixXd::Identity(4, 4)), 0.01);
}

TEST(Metric, PermutationOfZerosPermutesBlocks) {
  const auto a = metric_at(ModuliPoint{{cplx(3, 4), cplx(5.5, 6)}}, G32).g;
  const auto b = metric_at(ModuliPoint{{cplx(5.5, 6), cplx(3, 4)}}, G32).g;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(4, 4);
  P(0, 2) = P(1, 3) = P(2, 0) = P(3, 1) = 1;
  EXPECT_LT((P * a * P.transpose() - b).norm() / a.norm(), 1e-9);
}

TEST(Metric, PositiveDefiniteAtRandomPoints) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 10);
  for (int d = 1; d <= 3; ++d)
    for (int rep = 0; rep < 2; ++rep) {
      ModuliPoint m;
      for (int k = 0; k < d; ++k) m.zeros.emplace_back(U(rng), U(rng));
      const auto s = metric_at(m, G32);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.g).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Metric, KineticConsistency) {
  const ModuliPoint m{{cplx(3.5, 5), cplx(6.5, 5.5)}};
  const std::vector<double> v{0.4, 0.1, -0.3, 0.2};
  const Eigen::MatrixXd g = metric_at(m, G32).g;
  const Eigen::Map<const Eigen::VectorXd> q(v.data(), 4);
  const double quad = 0.5 * q.dot(g * q);
  const double T = kinetic_energy(prepare_adiabatic_state(m, v, 1.0, G32), G32);
  EXPECT_LT(std::abs(quad - T) / T, 1e-6);
}

TEST(Metric, RichardsonCheckAgrees) {
  MetricOptions o;
  o.richardson = true;
  const auto s = metric_at(ModuliPoint{{cplx(3, 3), cplx(6, 7)}}, G32, o);
  EXPECT_FALSE(s.flagged);
  EXPECT_LT(s.richardson_difference, 0.01);
}

TEST(Charts, CoefficientVelocityRoundTrip) {
  const ModuliPoint m{{cplx(1, 2), cplx(3, -1), cplx(0.5, 0.5)}};
  const std::vector<double> v{0.1, 0.2, -0.3, 0.4, 0.5, -0.6};
  const auto c = convert_velocity(m, v, Chart::positions, Chart::coefficients);
  const auto back = convert_velocity(m, c, Chart::coefficients, Chart::positions);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(back[k], v[k], 1e-12);
  const auto x = chart_coords(m, Chart::coefficients);
  const auto m2 = chart_point(x, Chart::coefficients);
  EXPECT_EQ(m2.degree(), 3);
}

TEST(Geodesic, ZeroVelocityIsConstant) {
  const ModuliPoint m{{cplx(3, 4), cplx(7, 6)}};
  GeodesicOptions o;
  o.dtau = 0.1;
  const auto r = geodesic(m, {0, 0, 0, 0}, 0.3, G32, o);
  ASSERT_TRUE(r.complete);
  for (const auto& p : r.path)
    for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(p.moduli.zeros[k] - m.zeros[k]), 1e-12);
}

TEST(Geodesic, OneVortexMovesInAStraightLine) {
  GeodesicOptions o;
  o.dtau = 0.1;
  const cplx z0(5, 5), v(0.6, -0.8);
  const auto r = geodesic(ModuliPoint{{z0}}, {v.real(), v.imag()}, 1.0, G32, o);
  ASSERT_TRUE(r.complete);
  for (const auto& p : r.path) {
    EXPECT_LT(std::abs(p.moduli.zeros[0] - (z0 + p.tau * v)), 1e-6);
    EXPECT_LT(std::abs(p.speed2 - r.path.front().speed2) / r.path.front().speed2, 1e-4);
  }
}

TEST(Geodesic, SpeedConservedForInteractingPair) {
  GeodesicOptions o;
  o.dtau = 0.05;
  const auto r = geodesic(ModuliPoint{{cplx(3, 5), cplx(6, 5.5)}}, {0.5, 0, -0.5, 0}, 1.0, G32, o);
  ASSERT_TRUE(r.complete);
  const double s0 = r.path.front().speed2;
  for (const auto& p : r.path) EXPECT_LT(std::abs(p.speed2 - s0) / s0, 1e-4);
  EXPECT_NEAR(r.path.back().tau, 1.0, 1e-12);
}

TEST(Geodesic, RejectsBadArguments) {
  EXPECT_THROW(geodesic(ModuliPoint{{cplx(5, 5)}}, {1.0, 0.0}, -1.0, G32), DomainError);
  EXPECT_THROW(geodesic(ModuliPoint{{cplx(5, 5)}}, {1.0}, 1.0, G32), ShapeError);
}
