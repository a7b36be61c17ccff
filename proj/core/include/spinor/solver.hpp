#pragma once

#include <optional>
#include <string>

#include "spinor/energy.hpp"

namespace spinor {

enum class InitKind { gaussian, random, warm };

struct SolveOptions {
  double dt = 1e-2;       // pseudo-time step
  double tol = 1e-9;      // energy-decrease-per-unit-time and residual scale
  int max_iter = 200000;
  InitKind init = InitKind::gaussian;
  std::uint64_t seed = 1;
  std::optional<SpinorState> warm_state;

  // solve_ground_state also relaxes within the u0 == 0 class and returns
  // whichever candidate ends lower; a precomputed two-component ground
  // state can be supplied to skip that inner solve.
  bool use_two_component_candidate = true;
  std::optional<SpinorState> two_component_candidate;

  std::vector<double>* energy_trace = nullptr;  // optional accepted-energy log
};

enum class Classification { two_component, three_component };

struct SolveReport {
  SpinorState state;
  EnergyBreakdown energy;
  std::optional<Multipliers> mult;  // absent when the formula degenerates
  double residual = 0.0;
  int iterations = 0;
  Classification classification = Classification::two_component;
  double u0_mass = 0.0;
  bool converged = false;
};

/// Gradient flow on the full three-component energy: linear terms (-Lap + V)
/// stepped implicitly, the rest explicitly, alternated with constraint
/// projection. Terminates when the energy decrease per step drops below
/// tol * dt and the stationarity residual below 10 * tol.
SolveReport solve_ground_state(const ModelParams& p, const Constraints& c,
                               const SolveOptions& o);

/// Same flow restricted to (u1, um1) with u0 pinned to zero and the split
/// constraints int u1^2 = (N+M)/2, int um1^2 = (N-M)/2. The Zeeman term is
/// constant on that class and is dropped from the flow, so the result is
/// exactly independent of q.
SolveReport solve_two_component(const ModelParams& p, const Constraints& c,
                                const SolveOptions& o);

struct SweepPoint {
  double M = 0.0;
  double q = 0.0;
};

struct SweepResult {
  double M = 0.0;
  double q = 0.0;
  std::optional<SolveReport> report;
  std::string error;  // nonempty when the point failed
};

/// Solve each (M, q) in order, warm-starting from the previous success
/// re-projected onto the new constraints. Per-point failures are recorded
/// without aborting the sweep.
std::vector<SweepResult> continuation(const ModelParams& p, const Constraints& base,
                                      const SolveOptions& o,
                                      std::span<const SweepPoint> sweep);

}  // namespace spinor
