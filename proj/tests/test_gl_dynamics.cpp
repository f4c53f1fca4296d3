#include <gtest/gtest.h>

#include "common.hpp"

using namespace vlab;
using vlab::testing::smooth_field;
using vlab::testing::sup_diff;

namespace {

const TorusGrid G48 = TorusGrid::square(48, 100.0);

DynState random_motion(const GaugePair& p, const TorusGrid& g, std::uint64_t seed) {
  DynState s = DynState::at_rest(p);
  s.va1 = smooth_field(g, seed, 0.05);
  s.va2 = smooth_field(g, seed + 1, 0.05);
  const rvec re = smooth_field(g, seed + 2, 0.05), im = smooth_field(g, seed + 3, 0.05);
  for (std::size_t k = 0; k < g.size(); ++k) s.vphi[k] = cplx(re[k], im[k]) * p.phi[k];
  return s;
}

const VortexSolution& two_vortex() {
  static const VortexSolution v =
      solve_vortex(ModuliPoint{{cplx(3, 4), cplx(7, 6)}}, G48, 1e-11);
  return v;
}

}  // namespace

TEST(KineticEnergy, Values) {
  DynState s = DynState::at_rest(reference_pair(G48, 0, 1.0));
  EXPECT_EQ(kinetic_energy(s, G48), 0.0);
  const cplx c(0.3, -0.4);
  s.vphi.assign(G48.size(), c);
  EXPECT_NEAR(kinetic_energy(s, G48), G48.area() * std::norm(c) / 2, 1e-12);
}

TEST(GaussLaw, ZeroAndPureGaugeMotion) {
  DynState s = DynState::at_rest(two_vortex().pair);
  EXPECT_EQ(gauss_residual(s, G48), 0.0);
  for (std::size_t k = 0; k < G48.size(); ++k) s.vphi[k] = cplx(0, 1) * s.pair.phi[k];
  EXPECT_GT(gauss_residual(s, G48), 0.1);
}

TEST(ProjectConstraint, ProjectsAndIsIdempotent) {
  const DynState s = random_motion(two_vortex().pair, G48, 7);
  EXPECT_GT(gauss_residual(s, G48), 1e-3);
  const DynState p = project_constraint(s, G48);
  EXPECT_LT(gauss_residual(p, G48), 1e-10);
  EXPECT_EQ(sup_diff(p.pair.a1, s.pair.a1), 0.0);
  const DynState q = project_constraint(p, G48);
  EXPECT_LT(sup_diff(q.va1, p.va1), 1e-12);
  EXPECT_LT(sup_diff(q.va2, p.va2), 1e-12);
  double e = 0;
  for (std::size_t k = 0; k < G48.size(); ++k) e = std::max(e, std::abs(q.vphi[k] - p.vphi[k]));
  EXPECT_LT(e, 1e-12);
}

TEST(Evolve, StaticVortexStaysPut) {
  const DynState s0 = DynState::at_rest(two_vortex().pair);
  const double dt = 0.25 * G48.h();
  const DynState s = evolve(s0, dt, 100, G48);
  EXPECT_LT(sup_diff(vlab::testing::abs_phi(s.pair), vlab::testing::abs_phi(s0.pair)), 1e-8);
  EXPECT_LT(sup_diff(curvature(s.pair, G48).b, curvature(s0.pair, G48).b), 1e-8);
  EXPECT_NEAR(s.t, 100 * dt, 1e-12);
}

TEST(Evolve, RefusesUnstableStepAndUnprojectedData) {
  const DynState s0 = DynState::at_rest(two_vortex().pair);
  EXPECT_THROW(evolve(s0, max_stable_dt(G48) * 1.01, 1, G48), DomainError);
  EXPECT_THROW(evolve(s0, -0.1, 1, G48), DomainError);
  EXPECT_THROW(evolve(random_motion(s0.pair, G48, 3), 0.01, 1, G48), DomainError);
}

TEST(Evolve, DivergenceKeepsLastGoodState) {
  DynState s0 = DynState::at_rest(reference_pair(G48, 0, 1.0));
  for (auto& f : s0.pair.phi) f = 1e120;
  EvolveOptions o;
  o.gauss_tol = -1;
  try {
    evolve(s0, 0.05, 50, G48, o);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    for (const cplx& v : e.last_good().vphi) ASSERT_TRUE(std::isfinite(std::abs(v)));
  }
}

TEST(Evolve, EnergyConservedAtSecondOrder) {
  const TorusGrid g = TorusGrid::square(32, 100.0);
  const DynState s0 = prepare_adiabatic_state(ModuliPoint{{cplx(3.5, 5), cplx(6.5, 5)}}, {1, 0, -1, 0}, 0.1, g);
  const double E0 = energy_report(s0, g).total, t_end = 1.0;
  auto drift = [&](double dt) {
    const int steps = static_cast<int>(std::lround(t_end / dt));
    return std::abs(energy_report(evolve(s0, t_end / steps, steps, g), g).total - E0) / E0;
  };
  const double d1 = drift(0.25 * g.h()), d2 = drift(0.125 * g.h());
  EXPECT_LT(d1 / t_end, 1e-6);
  EXPECT_GE(d1 / d2, 3.5);
}

TEST(Evolve, GaugeCovariant) {
  // chi must be resolved by the grid, otherwise the comparison measures aliasing.
  const TorusGrid g = TorusGrid::square(64, 100.0);
  const auto v = solve_vortex(ModuliPoint{{cplx(4, 4)}}, g, 1e-11);
  const DynState s0 = project_constraint(random_motion(v.pair, g, 5), g);
  const rvec chi = smooth_field(g, 9);
  auto transform = [&](const DynState& s) {
    DynState t = s;
    t.pair = gauge_transform(s.pair, chi, g);
    for (std::size_t k = 0; k < g.size(); ++k) t.vphi[k] *= std::polar(1.0, -chi[k]);
    return t;
  };
  const double dt = 0.25 * g.h();
  const DynState a = transform(evolve(s0, dt, 40, g));
  const DynState b = evolve(transform(s0), dt, 40, g);
  EXPECT_LT(sup_diff(vlab::testing::abs_phi(a.pair), vlab::testing::abs_phi(b.pair)), 1e-6);
  EXPECT_LT(sup_diff(curvature(a.pair, g).b, curvature(b.pair, g).b), 1e-6);
  EXPECT_EQ(vortex_number(b.pair, g), 1);
}

TEST(Evolve, BoostedVortexTranslates) {
  const cplx z0(3.0, 5.0);
  const double eps = 0.1, t_end = 8.0;
  const DynState s0 = prepare_adiabatic_state(ModuliPoint{{z0}}, {1.0, 0.0}, eps, G48);
  const double dt = 0.25 * G48.h();
  const int steps = static_cast<int>(std::lround(t_end / dt));
  const DynState s = evolve(s0, t_end / steps, steps, G48);
  const auto z = locate_zeros(s.pair, G48).moduli.zeros;
  ASSERT_EQ(z.size(), 1u);
  const cplx moved = G48.min_image(z[0] - z0);
  EXPECT_NEAR(moved.real(), eps * t_end, 0.02 * eps * t_end);
  EXPECT_NEAR(moved.imag(), 0.0, 0.02 * eps * t_end);
}

TEST(EnergyReport, Values) {
  const auto vac = energy_report(DynState::at_rest(reference_pair(G48, 0, 1.0), 2.5), G48);
  EXPECT_NEAR(vac.total, 0.0, 1e-14);
  EXPECT_EQ(vac.T, 0.0);
  EXPECT_EQ(vac.gauss_residual, 0.0);
  EXPECT_EQ(vac.t, 2.5);
  const auto r = energy_report(DynState::at_rest(two_vortex().pair), G48);
  EXPECT_EQ(r.T, 0.0);
  EXPECT_NEAR(r.U, two_vortex().energy, 1e-9);
  EXPECT_NEAR(r.total, 2 * pi, 1e-6);
}
