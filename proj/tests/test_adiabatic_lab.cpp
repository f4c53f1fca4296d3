#include <gtest/gtest.h>

#include "common.hpp"

using namespace vlab;

namespace {
const TorusGrid G32 = TorusGrid::square(32, 100.0);
}

TEST(PrepareAdiabaticState, AtRest) {
  const ModuliPoint m{{cplx(3, 4), cplx(7, 5)}};
  EXPECT_EQ(kinetic_energy(prepare_adiabatic_state(m, {1, 0, -1, 0}, 0.0, G32), G32), 0.0);
  EXPECT_EQ(kinetic_energy(prepare_adiabatic_state(m, {0, 0, 0, 0}, 0.1, G32), G32), 0.0);
  EXPECT_THROW(prepare_adiabatic_state(m, {1, 0, -1, 0}, -0.1, G32), DomainError);
}

TEST(PrepareAdiabaticState, QuadraticScalingAndMetricEnergy) {
  const ModuliPoint m{{cplx(3, 4), cplx(7, 5)}};
  const std::vector<double> v{1, 0.2, -1, -0.1};
  const double eps = 0.2;
  const DynState a = prepare_adiabatic_state(m, v, eps, G32);
  const DynState b = prepare_adiabatic_state(m, v, eps / 2, G32);
  const double Ta = kinetic_energy(a, G32), Tb = kinetic_energy(b, G32);
  EXPECT_NEAR(Ta / Tb, 4.0, 1e-3);
  EXPECT_LT(gauss_residual(a, G32), 1e-10);
  const Eigen::MatrixXd g = metric_at(m, G32).g;
  const Eigen::Map<const Eigen::VectorXd> q(v.data(), 4);
  const double expect = 0.5 * eps * eps * q.dot(g * q);
  EXPECT_LT(std::abs(Ta - expect) / expect, 1e-4);
}

TEST(SeparationAngle, Basics) {
  const ModuliPoint a{{cplx(0, 0), cplx(1, 0)}}, b{{cplx(0, 0), cplx(0, 2)}};
  EXPECT_NEAR(separation_angle(a, b), 90.0, 1e-12);
  EXPECT_NEAR(separation_angle(a, a), 0.0, 1e-12);
  EXPECT_NEAR(separation_angle(a, ModuliPoint{{cplx(1, 1), cplx(0, 0)}}), 45.0, 1e-10);
  EXPECT_THROW(separation_angle(ModuliPoint{{cplx(0)}}, a), DomainError);
}

TEST(ZeroTrajectory, StaticRunIsConstant) {
  const ModuliPoint m{{cplx(3, 4), cplx(7, 5)}};
  const DynState s = DynState::at_rest(solve_vortex(m, G32, 1e-10).pair);
  std::vector<DynState> run(4, s);
  for (int k = 0; k < 4; ++k) run[k].t = k;
  const auto tr = zero_trajectory(run, G32);
  ASSERT_EQ(tr.size(), 4u);
  for (const auto& p : tr) {
    EXPECT_FALSE(p.crossing);
    for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(p.moduli.zeros[k] - tr[0].moduli.zeros[k]), 1e-14);
  }
}

TEST(ZeroTrajectory, BoostedVortexIsLinear) {
  const TorusGrid g = TorusGrid::square(48, 100.0);
  const double eps = 0.1;
  const DynState s0 = prepare_adiabatic_state(ModuliPoint{{cplx(2, 5)}}, {0.6, 0.8}, eps, g);
  std::vector<DynState> run{s0};
  EvolveOptions o;
  o.every = 8;
  o.observer = [&](const DynState& s) { run.push_back(s); };
  const double dt = 0.25 * g.h();
  evolve(s0, dt, 8 * 12, g, o);
  const auto tr = zero_trajectory(run, g);
  const cplx z0 = tr.front().moduli.zeros[0];
  for (const auto& p : tr) {
    if (p.t == 0) continue;
    const cplx vel = (p.moduli.zeros[0] - z0) / p.t;
    EXPECT_NEAR(std::abs(vel), eps, 0.02 * eps);
  }
}

TEST(AdiabaticCompare, StaticDataGivesNoDeviation) {
  const auto rep =
      adiabatic_compare(ModuliPoint{{cplx(3, 4), cplx(7, 5)}}, {0, 0, 0, 0}, {0.2, 0.1}, 0.3, G32);
  ASSERT_EQ(rep.deviations.size(), 2u);
  for (double d : rep.deviations) EXPECT_LT(d, G32.h());
}

TEST(AdiabaticCompare, RejectsIncreasingEps) {
  EXPECT_THROW(adiabatic_compare(ModuliPoint{{cplx(5, 5)}}, {1, 0}, {0.1, 0.2}, 1.0, G32),
               DomainError);
  EXPECT_THROW(adiabatic_compare(ModuliPoint{{cplx(5, 5)}}, {1, 0}, {}, 1.0, G32), DomainError);
}

TEST(AdiabaticCompare, OneVortexShadowsGeodesic) {
  AdiabaticOptions o;
  o.geodesic.dtau = 0.05;
  const auto rep = adiabatic_compare(ModuliPoint{{cplx(4, 5)}}, {1, 0}, {0.2, 0.1}, 0.5, G32, o);
  ASSERT_EQ(rep.deviations.size(), 2u);
  for (const auto& r : rep.runs) EXPECT_TRUE(r.ok) << r.error;
  // Uniform translation; the residual deviation is the O(eps^2) relativistic correction.
  EXPECT_LT(rep.deviations[0], 0.05);
  EXPECT_LT(rep.deviations[1], rep.deviations[0]);
}
