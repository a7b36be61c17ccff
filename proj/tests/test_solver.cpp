#include <doctest.h>

#include "helpers.hpp"

using namespace spinor;
using testutil::fixture_grid;
using testutil::fixture_params;

namespace {

SolveOptions quiet_options() {
  SolveOptions o;
  return o;
}

}  // namespace

TEST_CASE("regime endpoints of the full solve") {
  GridPtr g = fixture_grid();

  SUBCASE("fully polarized: only u1 survives, any q") {
    ModelParams p = fixture_params(g, 0.7);
    SolveReport r = solve_ground_state(p, Constraints{1.0, 1.0}, quiet_options());
    CHECK(r.converged);
    CHECK(r.classification == Classification::two_component);
    CHECK(inner(r.state.u0, r.state.u0) < 1e-10);
    CHECK(inner(r.state.um1, r.state.um1) < 1e-10);
  }

  SUBCASE("zero magnetization with positive q collapses the outer pair") {
    ModelParams p = fixture_params(g, 0.5);
    SolveReport r = solve_ground_state(p, Constraints{1.0, 0.0}, quiet_options());
    CHECK(r.converged);
    CHECK(inner(r.state.u1, r.state.u1) < 1e-10);
    CHECK(inner(r.state.um1, r.state.um1) < 1e-10);
    CHECK(r.u0_mass == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("no field: the middle component vanishes") {
    ModelParams p = fixture_params(g, 0.0);
    SolveReport r = solve_ground_state(p, Constraints{1.0, 0.5}, quiet_options());
    CHECK(r.converged);
    CHECK(r.classification == Classification::two_component);
    CHECK(r.u0_mass < 1e-8);
  }
}

TEST_CASE("two-component ground state: q independence and uniqueness") {
  GridPtr g = fixture_grid();
  const Constraints c{1.0, 0.5};

  SolveReport a = solve_two_component(fixture_params(g, 0.0), c, quiet_options());
  SolveReport b = solve_two_component(fixture_params(g, 5.0), c, quiet_options());
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(testutil::l2_state_distance(a.state, b.state) < 1e-10);

  SolveOptions r1 = quiet_options();
  r1.init = InitKind::random;
  r1.seed = 101;
  SolveOptions r2 = r1;
  r2.seed = 202;
  SolveReport s1 = solve_two_component(fixture_params(g, 0.0), Constraints{1.0, 0.3}, r1);
  SolveReport s2 = solve_two_component(fixture_params(g, 0.0), Constraints{1.0, 0.3}, r2);
  CHECK(testutil::l2_state_distance(s1.state, s2.state) < 1e-6);

  // strict componentwise ordering well inside the box
  const double bulk = g->extent() / 2.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (g->radius(i) > bulk) continue;
    CHECK(a.state.um1.v[i] < a.state.u1.v[i]);
  }
}

TEST_CASE("energy is non-increasing along accepted steps") {
  GridPtr g = fixture_grid(129);
  ModelParams p = fixture_params(g, 0.5);
  std::vector<double> trace;
  SolveOptions o = quiet_options();
  o.max_iter = 500;
  o.energy_trace = &trace;
  solve_ground_state(p, Constraints{1.0, 0.4}, o);
  REQUIRE(trace.size() > 2);
  for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
}

TEST_CASE("converged states satisfy constraints, ordering and multiplier facts") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 0.5);
  const Constraints c{1.0, 0.5};
  SolveReport r = solve_ground_state(p, c, quiet_options());
  REQUIRE(r.converged);

  CHECK(std::abs(particle_number(r.state) - 1.0) < 1e-10);
  CHECK(std::abs(magnetization(r.state) - 0.5) < 1e-10);
  for (int j : {1, 0, -1})
    for (double x : r.state.component(j).v) CHECK(x >= 0.0);

  double worst = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    worst = std::max(worst, r.state.um1.v[i] - r.state.u1.v[i]);
  CHECK(worst <= 1e-10);

  REQUIRE(r.mult.has_value());
  CHECK(r.mult->lambda > 0.0);
  CHECK(r.residual <= 10.0 * quiet_options().tol);

  // stationarity: 1% multiplicative noise inflates the residual by >= 100x
  SpinorState noisy = r.state;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int j : {1, 0, -1})
    for (std::size_t i = 0; i < g->size(); ++i)
      if (!g->on_boundary(i)) noisy.component(j).v[i] *= 1.0 + u(rng);
  const double noisy_res = gp_residual(noisy, p, multipliers_robust(noisy, p));
  CHECK(noisy_res > 100.0 * r.residual);

  // multiplier identity, exact up to the stationarity defect
  IdentityGap gap = lambda_identity_gap(r.state, p, *r.mult);
  CHECK(gap.gap <= 1e-3);
}

TEST_CASE("continuation: single point equals a direct solve, sweeps stay 2C at q=0") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 0.0);
  const Constraints base{1.0, 0.0};

  const SweepPoint one[] = {{0.4, 0.3}};
  auto rs = continuation(p, base, quiet_options(), one);
  REQUIRE(rs.size() == 1);
  REQUIRE(rs[0].report.has_value());
  ModelParams pq = fixture_params(g, 0.3);
  SolveReport direct = solve_ground_state(pq, Constraints{1.0, 0.4}, quiet_options());
  CHECK(testutil::l2_state_distance(rs[0].report->state, direct.state) < 1e-9);

  const SweepPoint ms[] = {{0.2, 0.0}, {0.5, 0.0}, {0.8, 0.0}};
  auto sweep = continuation(p, base, quiet_options(), ms);
  for (const auto& res : sweep) {
    REQUIRE(res.report.has_value());
    CHECK(res.report->classification == Classification::two_component);
  }

  // errors are collected per point, not thrown
  const SweepPoint bad[] = {{0.4, 0.1}, {1.7, 0.1}, {0.2, 0.1}};
  auto mixed = continuation(p, base, quiet_options(), bad);
  CHECK(mixed[0].report.has_value());
  CHECK_FALSE(mixed[1].report.has_value());
  CHECK_FALSE(mixed[1].error.empty());
  CHECK(mixed[2].report.has_value());
}

TEST_CASE("ground state energy is monotone in q and M on a coarse probe") {
  GridPtr g = fixture_grid();
  const Constraints base{1.0, 0.0};
  ModelParams p = fixture_params(g, 0.0);

  const SweepPoint qs[] = {{0.5, 0.0}, {0.5, 0.7}, {0.5, 1.4}};
  auto rq = continuation(p, base, quiet_options(), qs);
  REQUIRE(rq.size() == 3);
  for (std::size_t k = 1; k < rq.size(); ++k) {
    const double e0 = rq[k - 1].report->energy.total;
    const double e1 = rq[k].report->energy.total;
    CHECK(e1 >= e0 - 1e-10);
    CHECK(std::abs(e1 - e0) <= 0.7 + 1e-8);  // Lipschitz in q with constant <= 1
  }

  const SweepPoint msweep[] = {{0.1, 0.4}, {0.5, 0.4}, {0.9, 0.4}};
  auto rm = continuation(p, base, quiet_options(), msweep);
  for (std::size_t k = 1; k < rm.size(); ++k)
    CHECK(rm[k].report->energy.total >= rm[k - 1].report->energy.total - 1e-10);
}
