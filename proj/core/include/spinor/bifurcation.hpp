#pragma once

#include "spinor/analysis.hpp"
#include "spinor/solver.hpp"

namespace spinor {

struct BifurcationOptions {
  double bracket_tol = 1e-3;
  double q_lo_seed = 1e-3;
  SolveOptions solve;  // base solver settings for classification solves
};

/// One point of the 2C/3C boundary: the bisection bracket around the
/// threshold (q_lo classified 2C, q_hi 3C), the closed-form upper bound U
/// evaluated on the two-component ground state, and that state's uniform
/// ceiling 2 beta_s (1+M) max(z1)^2.
struct BifurcationPoint {
  double M = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  double U = 0.0;
  double qbar_contribution = 0.0;
  SpinorState state_lo, state_hi;  // bracket endpoint states for inspection
};

/// Bisection on the solve classification. Monotonicity of the classification
/// in q makes the bracket invariant sound: q_lo stays 2C, q_hi stays 3C, the
/// width halves each step. Seed failures are reported, never widened over.
/// Near the threshold solves run at 4x tighter tolerance with extra starts.
BifurcationPoint find_qc(double M, const ModelParams& p, const BifurcationOptions& o);

struct PhaseCurvePoint {
  double M = 0.0;
  std::optional<BifurcationPoint> point;
  std::string error;
};

struct PhaseCurve {
  std::vector<PhaseCurvePoint> points;
  double qbar_est = 0.0;  // max of q_hi over the curve
  double max_U = 0.0;
};

/// Independent find_qc per M, merged in M order.
PhaseCurve phase_curve(std::span<const double> Ms, const ModelParams& p,
                       const BifurcationOptions& o);

/// Classification labels on a q-grid at fixed M via a warm continuation
/// sweep; used to cross-check that no 3C label appears below a 2C label.
std::vector<Classification> classification_sweep(double M, std::span<const double> qs,
                                                 const ModelParams& p,
                                                 const SolveOptions& o);

}  // namespace spinor
