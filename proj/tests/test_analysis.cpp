#include <doctest.h>

#include "helpers.hpp"

using namespace spinor;
using testutil::fixture_grid;
using testutil::fixture_params;

TEST_CASE("two-component necessary condition degenerates correctly") {
  GridPtr g = fixture_grid();
  const Constraints c{1.0, 0.5};

  SpinorState prop = zero_state(g);
  std::mt19937_64 rng(1);
  prop.u1 = testutil::random_positive_field(g, rng);
  prop.um1 = prop.u1;  // proportional: spin gain and cross-gradient both vanish

  ModelParams p0 = fixture_params(g, 0.0);
  VerificationResult r0 = verify_two_component_inequality(prop, p0, c);
  CHECK(r0.rhs == 0.0);
  CHECK(r0.satisfied);

  ModelParams p1 = fixture_params(g, 1.0);
  VerificationResult r1 = verify_two_component_inequality(prop, p1, c);
  CHECK(r1.lhs == doctest::Approx(1.5));  // q (1 + M)
  CHECK_FALSE(r1.satisfied);

  SpinorState with_middle = prop;
  with_middle.u0 = prop.u1;
  CHECK_THROWS_AS(verify_two_component_inequality(with_middle, p1, c), std::domain_error);
  CHECK_THROWS_AS(verify_two_component_inequality(prop, p1, Constraints{1.0, 0.0}),
                  std::domain_error);
}

TEST_CASE("threshold upper bound is nonpositive for proportional components") {
  GridPtr g = fixture_grid();
  const Constraints c{1.0, 0.5};
  ModelParams p = fixture_params(g);
  std::mt19937_64 rng(2);

  SpinorState prop = zero_state(g);
  prop.u1 = testutil::random_positive_field(g, rng);
  prop.um1 = prop.u1;
  CHECK(threshold_upper_bound(prop, p, c) <= 0.0);

  SpinorState mixed = prop;
  mixed.um1 = testutil::random_positive_field(g, rng);
  // equal outer components in mass only: the gain integrand vanishes where
  // u1 == um1 pointwise; here they differ, so U is finite either sign
  CHECK(std::isfinite(threshold_upper_bound(mixed, p, c)));

  CHECK_THROWS_AS(threshold_upper_bound(prop, p, Constraints{1.0, 1.0}), std::domain_error);
}

TEST_CASE("zeeman balance trivial cases") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 2.0);
  const Constraints c{1.0, 0.3};

  SpinorState two = gaussian_ansatz(c, g);
  BalanceCheck empty = verify_zeeman_balance(two, p, c);
  CHECK(empty.equality.lhs == 0.0);
  CHECK(empty.equality.rhs == 0.0);
  CHECK(empty.equality.satisfied);
  CHECK(empty.inequality.satisfied);

  std::mt19937_64 rng(3);
  SpinorState sym = testutil::random_positive_state(g, rng);
  sym.um1 = sym.u1;  // (u1 - um1)^2 factor kills the spin cost
  BalanceCheck b = verify_zeeman_balance(sym, p, c);
  const double pure_s = b.equality.rhs;
  double rad = 0;
  const double kin = 0.5 * (node_s_over_sq(sym.u1, sym.u0, 1e-12, &rad) +
                            node_s_over_sq(sym.um1, sym.u0, 1e-12, &rad));
  CHECK(pure_s == doctest::Approx(kin).epsilon(1e-12));

  CHECK_THROWS_AS(threshold_quotient(two, p), std::domain_error);
}

TEST_CASE("decay fit: synthetic exponential recovered, floor errors") {
  GridPtr g = fixture_grid();
  ScalarField f(g);
  for (std::size_t i = 0; i < g->size(); ++i)
    f.v[i] = std::exp(-2.0 * std::abs(g->coord(static_cast<int>(i))));
  DecayFit fit = decay_fit_field(f, 1, 4.0, 7.0);
  CHECK(std::abs(fit.t - 2.0) < 1e-6);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.accepted);
  // lifted prefactor bounds the field on the window
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->radius(i);
    if (r < 4.0 || r > 7.0) continue;
    CHECK(f.v[i] <= fit.prefactor * std::exp(-fit.t * r) * (1.0 + 1e-6));
  }

  SpinorState s = zero_state(g);
  CHECK_THROWS_AS(decay_fit(s, 0, 4.0, 7.0), std::domain_error);
}

TEST_CASE("midpoint defect: negative three-bump witness, zero degenerate case") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g);
  ConvexityDefect cd = convexity_defect(g, p);
  CHECK(cd.d < 0.0);
  CHECK(std::abs(cd.d - cd.closed_form) < 1e-10);

  // degenerate: no mass in the swapped components
  SpinorState only1 = gaussian_ansatz(Constraints{1.0, 1.0}, g);
  CHECK(std::abs(midpoint_defect(only1, only1, p)) < 1e-14);

  // the defect scales with beta_s but never changes sign
  ModelParams tiny = fixture_params(g, 0.0, 1.0, 1e-4);
  ConvexityDefect cd2 = convexity_defect(g, tiny);
  CHECK(cd2.d < 0.0);
  CHECK(std::abs(cd2.d - cd2.closed_form) < 1e-10);
}

TEST_CASE("two-component midpoint mixing never lowers the pair average") {
  GridPtr g = fixture_grid(129);
  ModelParams p = fixture_params(g, 0.5);
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    SpinorState u = zero_state(g);
    SpinorState v = zero_state(g);
    u.u1 = testutil::random_positive_field(g, rng);
    u.um1 = testutil::random_positive_field(g, rng);
    v.u1 = testutil::random_positive_field(g, rng);
    v.um1 = testutil::random_positive_field(g, rng);
    CHECK(midpoint_defect(u, v, p) >= -1e-10);
  }
}

TEST_CASE("pointwise quotient chain holds on random positive triples") {
  GridPtr g = fixture_grid(129);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    SpinorState s = testutil::random_positive_state(g, rng);
    const double sigma = 0.2 + 3.0 * std::generate_canonical<double, 53>(rng);
    VerificationResult r = pointwise_quotient_chain(s, sigma);
    CHECK(r.satisfied);
  }
}

TEST_CASE("outer exchange probe symmetric degenerate case") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 1.0);
  std::mt19937_64 rng(6);
  SpinorState s = testutil::random_positive_state(g, rng);
  s.um1 = s.u1;
  OuterExchangeProbe probe = probe_outer_exchange(s, p);
  CHECK(probe.both_finite);
  CHECK(probe.lhs == 0.0);
  CHECK(probe.rhs == 0.0);
}

TEST_CASE("sigma balance requires a 3C state") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 1.0);
  SpinorState two = gaussian_ansatz(Constraints{1.0, 0.5}, g);
  CHECK_THROWS_AS(verify_sigma_balance(two, p, Constraints{1.0, 0.5}), std::domain_error);
}
