#include <doctest.h>

#include "helpers.hpp"

using namespace spinor;
using testutil::fixture_grid;
using testutil::fixture_params;

namespace {

RedistributionMatrix random_stochastic(std::size_t rows, std::size_t cols,
                                       std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RedistributionMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.a.assign(rows * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < rows; ++i) col += (m.a[i * cols + j] = u(rng));
    for (std::size_t i = 0; i < rows; ++i) m.a[i * cols + j] /= col;
  }
  m.validate();
  return m;
}

double total_kinetic(std::span<const ScalarField> fs) {
  double acc = 0.0;
  for (const auto& f : fs) acc += kinetic_energy(f);
  return acc;
}

double total_mass(std::span<const ScalarField> fs) {
  double acc = 0.0;
  for (const auto& f : fs) acc += inner(f, f);
  return acc;
}

}  // namespace

TEST_CASE("redistribution: identity, collapse to amplitude, random matrices") {
  GridPtr g = fixture_grid(129);
  std::mt19937_64 rng(31);
  std::vector<ScalarField> fs = {testutil::random_positive_field(g, rng),
                                 testutil::random_positive_field(g, rng),
                                 testutil::random_positive_field(g, rng)};

  auto same = apply_redistribution(RedistributionMatrix::identity(3), fs);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < g->size(); ++i)
      CHECK(same[k].v[i] == doctest::Approx(fs[k].v[i]).epsilon(1e-15));

  // single row of ones: the euclidean amplitude, kinetic sum cannot grow
  RedistributionMatrix row;
  row.rows = 1;
  row.cols = 3;
  row.a = {1.0, 1.0, 1.0};
  auto amp = apply_redistribution(row, fs);
  REQUIRE(amp.size() == 1);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double expect = std::sqrt(fs[0].v[i] * fs[0].v[i] + fs[1].v[i] * fs[1].v[i] +
                                    fs[2].v[i] * fs[2].v[i]);
    CHECK(amp[0].v[i] == doctest::Approx(expect).epsilon(1e-15));
  }
  CHECK(kinetic_energy(amp[0]) <= total_kinetic(fs) + 1e-10);

  for (int rep = 0; rep < 20; ++rep) {
    auto A = random_stochastic(3, 3, rng);
    auto gs = apply_redistribution(A, fs);
    CHECK(std::abs(total_mass(gs) - total_mass(fs)) < 1e-12 * std::max(1.0, total_mass(fs)));
    CHECK(total_kinetic(gs) <= total_kinetic(fs) + 1e-10);
  }

  RedistributionMatrix bad = RedistributionMatrix::identity(3);
  bad.a[0] = 0.7;
  CHECK_THROWS_AS(apply_redistribution(bad, fs), std::invalid_argument);

  std::vector<ScalarField> neg = fs;
  neg[0].v[40] = -0.1;
  CHECK_THROWS_AS(apply_redistribution(RedistributionMatrix::identity(3), neg),
                  std::invalid_argument);
}

TEST_CASE("perturbation families: identity at zero, invariants, feasibility") {
  GridPtr g = fixture_grid();
  const Constraints c{1.0, 0.5};
  SpinorState s = random_admissible(c, g, 77);

  for (auto fam : {PerturbationFamily::lower_magnetization(0.0),
                   PerturbationFamily::raise_magnetization(0.0),
                   PerturbationFamily::open_middle(0.0, 3.0),
                   PerturbationFamily::close_middle(0.0),
                   PerturbationFamily::open_middle_sigma(0.0, mass_ratio_sigma(s)),
                   PerturbationFamily::outer_exchange(0.0, mass_ratio_sigma(s))}) {
    SpinorState t = perturb(s, fam);
    CHECK(testutil::linf_state_distance(s, t) < 1e-15);
  }

  // closing the middle is a no-op when there is no middle component
  SpinorState two = gaussian_ansatz(c, g);
  SpinorState closed = perturb(two, PerturbationFamily::close_middle(0.3));
  CHECK(testutil::linf_state_distance(two, closed) < 1e-15);

  // tau-weighted opening on the 2C trial state at M = 0.5: tau = 3
  SpinorState opened = perturb(two, PerturbationFamily::open_middle(0.01, 3.0));
  CHECK(std::abs(particle_number(opened) - 1.0) < 1e-12);
  CHECK(std::abs(magnetization(opened) - 0.5) < 1e-12);

  CHECK_THROWS_AS(perturb(s, PerturbationFamily::close_middle(0.6)), std::domain_error);
  CHECK_THROWS_AS(perturb(s, PerturbationFamily::open_middle(0.5, 3.0)), std::domain_error);
  CHECK_THROWS_AS(perturb(s, PerturbationFamily::lower_magnetization(-0.1)),
                  std::domain_error);
}

TEST_CASE("families preserve mass and never raise kinetic energy") {
  GridPtr g = fixture_grid();
  std::mt19937_64 rng(13);
  const Constraints c{1.0, 0.35};
  ModelParams p = fixture_params(g, 0.4);
  for (int rep = 0; rep < 5; ++rep) {
    SpinorState s = random_admissible(c, g, 100 + static_cast<std::uint64_t>(rep));
    const double sigma = mass_ratio_sigma(s);
    const double n0 = particle_number(s);
    const double kin0 = energy_parts(s, p).kin;
    const std::vector<PerturbationFamily> fams = {
        PerturbationFamily::lower_magnetization(0.02),
        PerturbationFamily::raise_magnetization(0.02),
        PerturbationFamily::open_middle(0.02, 2.0),
        PerturbationFamily::close_middle(0.02),
        PerturbationFamily::open_middle_sigma(0.02, sigma),
        PerturbationFamily::outer_exchange(0.02, sigma)};
    for (const auto& fam : fams) {
      SpinorState t = perturb(s, fam);
      CHECK(std::abs(particle_number(t) - n0) < 1e-12);
      CHECK(energy_parts(t, p).kin <= kin0 + 1e-10);
    }
    // magnetization bookkeeping per family
    SpinorState lower = perturb(s, PerturbationFamily::lower_magnetization(0.02));
    CHECK(magnetization(lower) ==
          doctest::Approx((1.0 - 0.02) * magnetization(s)).epsilon(1e-12));
    SpinorState raise = perturb(s, PerturbationFamily::raise_magnetization(0.02));
    const double gain =
        0.02 * (inner(s.u0, s.u0) + 2.0 * inner(s.um1, s.um1));
    CHECK(magnetization(raise) == doctest::Approx(magnetization(s) + gain).epsilon(1e-12));
    for (const auto& fam :
         {PerturbationFamily::close_middle(0.02),
          PerturbationFamily::open_middle_sigma(0.02, sigma),
          PerturbationFamily::outer_exchange(0.02, sigma)})
      CHECK(std::abs(magnetization(perturb(s, fam)) - magnetization(s)) < 1e-12);
  }
}

TEST_CASE("directional derivatives: exact zeros and closed forms vs quotients") {
  GridPtr g = fixture_grid();
  ModelParams p = fixture_params(g, 0.8);
  const Constraints c{1.0, 0.5};

  // components built from shared profiles so their pointwise ratios stay
  // bounded, as they do on converged states; the quotient step sizes only
  // resolve the derivative inside that regime
  std::mt19937_64 rng(2024);
  ScalarField base1 = testutil::random_positive_field(g, rng);
  ScalarField base2 = testutil::random_positive_field(g, rng);
  std::uniform_real_distribution<double> coef(0.5, 1.5);
  SpinorState s = zero_state(g);
  for (int j : {1, 0, -1}) {
    const double a = coef(rng), b = coef(rng);
    auto& f = s.component(j);
    for (std::size_t i = 0; i < g->size(); ++i)
      f.v[i] = a * base1.v[i] + b * base2.v[i];
  }
  s = project_constraints(s, c);
  const double sigma = mass_ratio_sigma(s);

  const std::vector<PerturbationFamily> fams = {
      PerturbationFamily::lower_magnetization(0.0),
      PerturbationFamily::raise_magnetization(0.0),
      PerturbationFamily::open_middle(0.0, 3.0),
      PerturbationFamily::close_middle(0.0),
      PerturbationFamily::open_middle_sigma(0.0, sigma),
      PerturbationFamily::outer_exchange(0.0, sigma)};
  for (const auto& fam : fams) {
    CHECK(directional_derivative(s, fam, EnergyPart::pot, p) == 0.0);
    CHECK(directional_derivative(s, fam, EnergyPart::n, p) == 0.0);
  }

  // open_middle on the 2C trial state: Zeeman derivative is -q(1+M)
  SpinorState two = gaussian_ansatz(c, g);
  const double tau = 3.0;
  const double dzee = directional_derivative(two, PerturbationFamily::open_middle(0.0, tau),
                                             EnergyPart::zee, p);
  CHECK(std::abs(dzee - (-p.q * 1.5)) < 1e-9);

  // closed forms against Richardson quotients of the discrete energy
  auto quotient = [&](const SpinorState& st, FamilyKind kind, double mix,
                      EnergyPart part) {
    auto eval = [&](double d) {
      PerturbationFamily f{kind, d, mix};
      return energy_parts(perturb(st, f), p);
    };
    auto pick = [&](const EnergyBreakdown& e) {
      switch (part) {
        case EnergyPart::kin: return e.kin;
        case EnergyPart::s: return e.s;
        case EnergyPart::zee: return e.zee;
        case EnergyPart::total: return e.total;
        default: return 0.0;
      }
    };
    const double base = pick(energy_parts(st, p));
    const double q1 = (pick(eval(1e-4)) - base) / 1e-4;
    const double q2 = (pick(eval(5e-5)) - base) / 5e-5;
    return 2.0 * q2 - q1;
  };

  for (EnergyPart part : {EnergyPart::kin, EnergyPart::s, EnergyPart::zee,
                          EnergyPart::total}) {
    const double analytic = directional_derivative(
        two, PerturbationFamily::open_middle(0.0, tau), part, p);
    const double numeric = quotient(two, FamilyKind::open_middle, tau, part);
    CHECK(std::abs(analytic - numeric) <=
          std::max(1e-6 * std::max(std::abs(analytic), std::abs(numeric)), 3e-10));
  }
  for (EnergyPart part : {EnergyPart::kin, EnergyPart::s, EnergyPart::zee,
                          EnergyPart::total}) {
    const double analytic =
        directional_derivative(s, PerturbationFamily::close_middle(0.0), part, p);
    const double numeric = quotient(s, FamilyKind::close_middle, 0.0, part);
    CHECK(std::abs(analytic - numeric) <=
          std::max(1e-6 * std::max(std::abs(analytic), std::abs(numeric)), 3e-10));
  }

  CHECK_THROWS_AS(parse_energy_part("bogus"), std::invalid_argument);
  CHECK(parse_energy_part("kin") == EnergyPart::kin);
}
