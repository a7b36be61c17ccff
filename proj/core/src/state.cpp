#include "spinor/state.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spinor {

namespace {

constexpr double kMassFloor = 1e-14;  // component treated as absent below this

double component_mass(const ScalarField& f) { return inner(f, f); }

ScalarField scaled(const ScalarField& f, double c) {
  ScalarField out = f;
  for (double& x : out.v) x *= c;
  return out;
}

ScalarField normalized_gaussian(const GridPtr& grid) {
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r = grid->radius(i);
    f.v[i] = std::exp(-0.5 * r * r);
  }
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (grid->on_boundary(i)) f.v[i] = 0.0;
  const double m = component_mass(f);
  return scaled(f, 1.0 / std::sqrt(m));
}

// Smooth strictly-bounded bump mixture; vanishes on the boundary layer.
ScalarField random_bumps(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> center(-grid->extent() / 3.0, grid->extent() / 3.0);
  std::uniform_real_distribution<double> width(grid->extent() / 10.0, grid->extent() / 4.0);
  const int nb = 3;
  std::vector<std::array<double, 3>> centers(nb);
  std::vector<double> amps(nb), widths(nb);
  for (int b = 0; b < nb; ++b) {
    amps[static_cast<std::size_t>(b)] = amp(rng);
    for (int a = 0; a < 3; ++a) centers[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = center(rng);
    widths[static_cast<std::size_t>(b)] = width(rng);
  }
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (grid->on_boundary(i)) continue;
    double acc = 0.0;
    for (int b = 0; b < nb; ++b) {
      double d2 = 0.0;
      for (int a = 0; a < grid->dim(); ++a) {
        const double dx = grid->coord(grid->axis_index(i, a)) -
                          centers[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
        d2 += dx * dx;
      }
      const double w = widths[static_cast<std::size_t>(b)];
      acc += amps[static_cast<std::size_t>(b)] * std::exp(-d2 / (2.0 * w * w));
    }
    f.v[i] = acc;
  }
  return f;
}

}  // namespace

void Constraints::validate() const {
  if (!(particle_number > 0.0)) throw std::invalid_argument("particle number must be positive");
  if (magnetization < 0.0 || magnetization > particle_number)
    throw std::invalid_argument("magnetization must lie in [0, N]");
}

SpinorState zero_state(const GridPtr& grid) {
  return SpinorState{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
}

double particle_number(const SpinorState& s) {
  return component_mass(s.u1) + component_mass(s.u0) + component_mass(s.um1);
}

double magnetization(const SpinorState& s) {
  return component_mass(s.u1) - component_mass(s.um1);
}

SpinorState gaussian_ansatz(const Constraints& c, const GridPtr& grid) {
  c.validate();
  const double N = c.particle_number;
  const double M = c.magnetization;
  ScalarField f = normalized_gaussian(grid);
  SpinorState s = zero_state(grid);
  s.u1 = scaled(f, std::sqrt((N + M) / 2.0));
  s.um1 = scaled(f, std::sqrt((N - M) / 2.0));
  return s;
}

SpinorState three_component_ansatz(const Constraints& c, const GridPtr& grid) {
  c.validate();
  const double N = c.particle_number;
  const double M = c.magnetization;
  const double n0 = (N - M) / 2.0;
  const double n1 = (N - n0 + M) / 2.0;
  const double nm1 = (N - n0 - M) / 2.0;
  ScalarField f = normalized_gaussian(grid);
  SpinorState s = zero_state(grid);
  s.u1 = scaled(f, std::sqrt(n1));
  s.u0 = scaled(f, std::sqrt(n0));
  s.um1 = scaled(f, std::sqrt(nm1));
  return s;
}

SpinorState random_admissible(const Constraints& c, const GridPtr& grid,
                              std::uint64_t seed) {
  c.validate();
  std::mt19937_64 rng(seed);
  SpinorState s = zero_state(grid);
  s.u1 = random_bumps(grid, rng);
  s.u0 = random_bumps(grid, rng);
  s.um1 = random_bumps(grid, rng);
  if (c.magnetization == c.particle_number) {
    s.u0 = ScalarField(grid);
    s.um1 = ScalarField(grid);
  }
  return project_constraints(s, c);
}

SpinorState project_constraints(const SpinorState& s, const Constraints& c) {
  c.validate();
  const double N = c.particle_number;
  const double M = c.magnetization;
  const double a = component_mass(s.u1);
  const double b = component_mass(s.u0);
  const double cc = component_mass(s.um1);

  auto rescaled = [&](double s1, double s0, double sm1) {
    SpinorState out = s;
    for (double& x : out.u1.v) x *= s1;
    for (double& x : out.u0.v) x *= s0;
    for (double& x : out.um1.v) x *= sm1;
    return out;
  };

  if (M > kMassFloor && a <= kMassFloor)
    throw std::domain_error("cannot project: positive magnetization but u1 vanishes");

  // Degenerate corners first: they divide by zero in the general system.
  if (M >= N - kMassFloor) {  // fully polarized
    return rescaled(std::sqrt(N / a), 0.0, 0.0);
  }
  if (b <= kMassFloor) {  // two-component split
    if (cc <= kMassFloor)
      throw std::domain_error("cannot project: u0 and um1 both vanish but M < N");
    return rescaled(std::sqrt((N + M) / (2.0 * a)), 0.0, std::sqrt((N - M) / (2.0 * cc)));
  }
  if (cc <= kMassFloor) {  // um1 absent: u0 absorbs the residual mass
    const double s1 = (M > kMassFloor) ? std::sqrt(M / a) : 0.0;
    return rescaled(s1, std::sqrt((N - M) / b), 0.0);
  }
  if (a <= kMassFloor) {  // u1 absent (only reachable with M ~ 0)
    return rescaled(0.0, std::sqrt(N / b), 0.0);
  }

  // General case. Write X, Y, Z for the post-scale masses of u1, u0, um1.
  // X + Y + Z = N, X - Z = M, and the closure s0^2 = s1*sm1 gives
  // Y = b sqrt(X Z / (a c)). Eliminating X = Z + M leaves one increasing
  // scalar equation for Z on [0, (N - M)/2].
  const double k = b / std::sqrt(a * cc);
  auto psi = [&](double Z) { return 2.0 * Z + M + k * std::sqrt(Z * (Z + M)) - N; };
  double lo = 0.0, hi = (N - M) / 2.0;
  double Z = hi * 0.5;
  for (int it = 0; it < 200; ++it) {
    const double val = psi(Z);
    if (std::abs(val) < 1e-15 * std::max(1.0, N)) break;
    if (val > 0.0) hi = Z; else lo = Z;
    const double sq = std::sqrt(std::max(Z * (Z + M), 1e-300));
    const double dpsi = 2.0 + k * (2.0 * Z + M) / (2.0 * sq);
    double next = Z - val / dpsi;  // Newton, bisection fallback
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    Z = next;
  }
  const double X = Z + M;
  const double s1 = std::sqrt(X / a);
  const double sm1 = std::sqrt(Z / cc);
  const double s0 = std::sqrt(s1 * sm1);
  return rescaled(s1, s0, sm1);
}

std::array<double, 3> reconstruct_phases() {
  return {0.0, std::numbers::pi / 2.0, 0.0};
}

}  // namespace spinor
