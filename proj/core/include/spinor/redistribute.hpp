#pragma once

#include <string_view>
#include <vector>

#include "spinor/energy.hpp"

namespace spinor {

/// Column-stochastic nonnegative coefficients a_ij: output i collects
/// a_ij of the squared density of input j, every column summing to one.
struct RedistributionMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  void validate() const;
  static RedistributionMatrix identity(std::size_t n);
};

/// g_i = sqrt(sum_j a_ij f_j^2) pointwise. Preserves the total squared
/// density at every node and never increases the edge-based kinetic sum.
std::vector<ScalarField> apply_redistribution(const RedistributionMatrix& A,
                                              std::span<const ScalarField> fs);

/// One-parameter mass-exchange families between the three components.
/// All of them preserve the total density pointwise; the magnetization
/// behaviour and the feasible delta range depend on the family.
enum class FamilyKind {
  lower_magnetization,  // outer mass leaks into the middle, M -> (1-2d)M
  raise_magnetization,  // middle and um1 mass leak into u1
  open_middle,          // 2C state grows a middle component, tau-weighted
  close_middle,         // middle mass splits evenly into the outer pair
  open_middle_sigma,    // sigma-weighted variant valid on 3C states
  outer_exchange,       // sigma-weighted swap between u1 and um1
};

struct PerturbationFamily {
  FamilyKind kind = FamilyKind::close_middle;
  double delta = 0.0;
  double mix = 0.0;  // tau for open_middle, sigma for the *_sigma families

  static PerturbationFamily lower_magnetization(double delta);
  static PerturbationFamily raise_magnetization(double delta);
  static PerturbationFamily open_middle(double delta, double tau);
  static PerturbationFamily close_middle(double delta);
  static PerturbationFamily open_middle_sigma(double delta, double sigma);
  static PerturbationFamily outer_exchange(double delta, double sigma);
};

/// sigma(u) = int u1^2 / int um1^2 (the M-preserving mixing weight).
double mass_ratio_sigma(const SpinorState& s);

/// Largest delta keeping every squared coefficient nonnegative.
double feasible_delta_bound(FamilyKind kind, double mix);

/// Apply the family at its stored delta. Squared components are transformed
/// and rooted once; infeasible delta is an error, never a clamp.
SpinorState perturb(const SpinorState& s, const PerturbationFamily& fam);

enum class EnergyPart { kin, pot, n, s, zee, total };
EnergyPart parse_energy_part(std::string_view name);

/// One-sided derivative of the chosen energy part along the family at
/// delta = 0+. pot and n parts are exactly zero for every family. The
/// open_middle (on 2C states) and close_middle families use the closed
/// forms, which differentiate the discrete energy exactly; the remaining
/// families use one-sided quotients with Richardson extrapolation over
/// delta in {1e-4, 5e-5}.
double directional_derivative(const SpinorState& st, const PerturbationFamily& fam,
                              EnergyPart part, const ModelParams& p);

}  // namespace spinor
