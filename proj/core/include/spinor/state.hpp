#pragma once

#include <array>
#include <cstdint>

#include "spinor/grid.hpp"

namespace spinor {

/// Integral constraints: total density integrates to `particle_number`,
/// density difference of the outer components to `magnetization`.
struct Constraints {
  double particle_number = 1.0;
  double magnetization = 0.0;

  void validate() const;  // 0 <= M <= N required
};

/// Nonnegative amplitude triple (u1, u0, um1) on a shared grid.
struct SpinorState {
  ScalarField u1, u0, um1;

  const GridPtr& grid() const { return u1.grid; }
  const ScalarField& component(int j) const {
    return j == 1 ? u1 : (j == 0 ? u0 : um1);
  }
  ScalarField& component(int j) { return j == 1 ? u1 : (j == 0 ? u0 : um1); }
};

SpinorState zero_state(const GridPtr& grid);

double particle_number(const SpinorState& s);
double magnetization(const SpinorState& s);

/// Two-component Gaussian trial state: (sqrt((1+M)/2) f, 0, sqrt((1-M)/2) f)
/// with f the discretely normalized Gaussian exp(-|x|^2/2).
SpinorState gaussian_ansatz(const Constraints& c, const GridPtr& grid);

/// Gaussian trial state with all three components populated (middle component
/// carries (1-M)/2 of the mass). Used to seed full solves, since a flow
/// started at u0 == 0 can never leave that subspace.
SpinorState three_component_ansatz(const Constraints& c, const GridPtr& grid);

/// Smooth positive random bumps, rescaled to the constraints. Deterministic
/// per seed. M == N forces u0 = um1 = 0.
SpinorState random_admissible(const Constraints& c, const GridPtr& grid,
                              std::uint64_t seed);

/// Componentwise rescale (s1*u1, s0*u0, sm1*um1) onto the constraint set.
/// The two constraints leave one scale free; it is closed with s0^2 = s1*sm1,
/// which reduces to plain normalization in the degenerate corners. Falls back
/// to letting s0 absorb residual mass when u1 or um1 vanishes.
SpinorState project_constraints(const SpinorState& s, const Constraints& c);

/// Constant phases (th1, th0, thm1) with cos(th1 - 2 th0 + thm1) = -1,
/// turning an amplitude triple back into a complex-valued minimizer.
std::array<double, 3> reconstruct_phases();

}  // namespace spinor
