#pragma once

#include <string>
#include <vector>

#include "spinor/energy.hpp"

namespace spinor {

/// Outcome of one inequality or equality check. For inequalities satisfied
/// means lhs <= rhs + tolerance; for equalities gap <= tolerance.
struct VerificationResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // relative, guarded denominator
  double tolerance = 0.0;
  bool satisfied = false;
  bool equality = false;
  double restriction_radius = 0.0;  // support cut used by quotient integrals
  std::string note;
};

/// Necessary condition for a two-component state to be a ground state at
/// (M, q): the one-sided energy derivative along the middle-opening family
/// must be nonnegative. Failure certifies the 2C state is not the ground
/// state there. Requires u0 == 0 and 0 < M < 1.
VerificationResult verify_two_component_inequality(const SpinorState& z,
                                                   const ModelParams& p,
                                                   const Constraints& c);

/// Largest q at which the two-component state passes the necessary
/// condition; upper bound for the 2C/3C threshold. Requires 0 < M < 1.
double threshold_upper_bound(const SpinorState& z, const ModelParams& p,
                             const Constraints& c);

/// Zeeman balance of a stationary 3C state: q int u0^2 against the spin cost
/// plus half the cross-gradient cost of closing the middle component.
/// Reports both the inequality direction and the equality gap.
struct BalanceCheck {
  VerificationResult inequality;
  VerificationResult equality;
};
BalanceCheck verify_zeeman_balance(const SpinorState& u, const ModelParams& p,
                                   const Constraints& c);

/// The ratio whose value a stationary 3C state pins to q and whose infimum
/// over 3C ground states is the threshold. Errors below the 2C mass cut.
double threshold_quotient(const SpinorState& u, const ModelParams& p);

/// Sigma-weighted stationarity equality on 3C states; divides by u0^2, so
/// the tolerance is looser than the Zeeman balance.
VerificationResult verify_sigma_balance(const SpinorState& u, const ModelParams& p,
                                        const Constraints& c);

/// Regime-dependent qualitative facts: componentwise ordering, interior
/// positivity, multiplier sign, and collapse at the degenerate corners.
std::vector<VerificationResult> check_qualitative(const SpinorState& u,
                                                  const ModelParams& p,
                                                  const Constraints& c);

struct DecayFit {
  int component = 1;      // +1, 0, -1
  double t = 0.0;         // fitted decay rate, positive for accepted fits
  double prefactor = 0.0; // lifted so u <= prefactor * exp(-t |x|) on the window
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r2 = 0.0;
  bool accepted = false;  // r2 > 0.99 and negative slope
};

/// Log-linear least squares of one component over a radial window.
DecayFit decay_fit(const SpinorState& u, int component, double window_lo,
                   double window_hi);
DecayFit decay_fit_field(const ScalarField& f, int component, double window_lo,
                         double window_hi);

/// Midpoint-mixing defect D = (E[u] + E[v])/2 - E[w], w_j^2 = (u_j^2+v_j^2)/2.
/// Nonnegative on the u0 == 0 class; sign-indefinite in general.
double midpoint_defect(const SpinorState& u, const SpinorState& v,
                       const ModelParams& p);

/// Three disjoint bumps arranged so the midpoint defect is strictly negative,
/// together with its closed form -beta_s (int g^4 + int h^4)/4.
struct ConvexityDefect {
  double d = 0.0;
  double closed_form = 0.0;
  SpinorState u, v;
};
ConvexityDefect convexity_defect(const GridPtr& grid, const ModelParams& p);

/// Both sides of the exploratory outer-exchange derivative bound, evaluated
/// on the grid (always finite there), plus tail ordering diagnostics. No
/// satisfied verdict: the continuum quantities are not known to be finite.
struct OuterExchangeProbe {
  double lhs = 0.0;
  double rhs = 0.0;
  bool both_finite = false;
  double tail_ratio_u0_um1 = 0.0;
  double tail_ratio_um1_u1 = 0.0;
  double tail_radius = 0.0;
};
OuterExchangeProbe probe_outer_exchange(const SpinorState& u, const ModelParams& p);

/// Pointwise completed-square chain: at every interior node with positive
/// components, [S(u0,u1) + sigma S(u0,um1)]/u0^2 >= sigma S(u1,um1)/(u1^2 +
/// sigma um1^2) with central-difference gradients. Algebraic identity.
VerificationResult pointwise_quotient_chain(const SpinorState& u, double sigma);

}  // namespace spinor
