#include "spinor/redistribute.hpp"

#include <cmath>
#include <stdexcept>

namespace spinor {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kNodeFloor = 1e-30;

std::array<ScalarField, 3> squared_components(const SpinorState& s) {
  std::array<ScalarField, 3> sq = {s.u1, s.u0, s.um1};
  for (auto& f : sq)
    for (double& x : f.v) x *= x;
  return sq;
}

SpinorState rooted(std::array<ScalarField, 3>&& sq) {
  for (auto& f : sq)
    for (double& x : f.v) x = std::sqrt(std::max(x, 0.0));
  return SpinorState{std::move(sq[0]), std::move(sq[1]), std::move(sq[2])};
}

}  // namespace

void RedistributionMatrix::validate() const {
  if (rows == 0 || cols == 0 || a.size() != rows * cols)
    throw std::invalid_argument("redistribution matrix has inconsistent shape");
  for (double x : a)
    if (!(x >= 0.0)) throw std::invalid_argument("redistribution coefficients must be nonnegative");
  for (std::size_t j = 0; j < cols; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < rows; ++i) col += at(i, j);
    if (std::abs(col - 1.0) > kStochasticTol)
      throw std::invalid_argument("redistribution matrix columns must sum to one");
  }
}

RedistributionMatrix RedistributionMatrix::identity(std::size_t n) {
  RedistributionMatrix m;
  m.rows = m.cols = n;
  m.a.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.a[i * n + i] = 1.0;
  return m;
}

std::vector<ScalarField> apply_redistribution(const RedistributionMatrix& A,
                                              std::span<const ScalarField> fs) {
  A.validate();
  if (fs.size() != A.cols)
    throw std::invalid_argument("redistribution needs one input field per column");
  for (const auto& f : fs) {
    require_same_grid(fs[0], f);
    for (double x : f.v)
      if (!(x >= 0.0)) throw std::invalid_argument("redistribution inputs must be nonnegative");
  }
  std::vector<ScalarField> out;
  out.reserve(A.rows);
  const std::size_t nodes = fs[0].size();
  for (std::size_t i = 0; i < A.rows; ++i) {
    ScalarField gi(fs[0].grid);
    for (std::size_t k = 0; k < nodes; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < A.cols; ++j) {
        const double fj = fs[j].v[k];
        acc += A.at(i, j) * fj * fj;
      }
      gi.v[k] = std::sqrt(acc);
    }
    out.push_back(std::move(gi));
  }
  return out;
}

PerturbationFamily PerturbationFamily::lower_magnetization(double delta) {
  return {FamilyKind::lower_magnetization, delta, 0.0};
}
PerturbationFamily PerturbationFamily::raise_magnetization(double delta) {
  return {FamilyKind::raise_magnetization, delta, 0.0};
}
PerturbationFamily PerturbationFamily::open_middle(double delta, double tau) {
  return {FamilyKind::open_middle, delta, tau};
}
PerturbationFamily PerturbationFamily::close_middle(double delta) {
  return {FamilyKind::close_middle, delta, 0.0};
}
PerturbationFamily PerturbationFamily::open_middle_sigma(double delta, double sigma) {
  return {FamilyKind::open_middle_sigma, delta, sigma};
}
PerturbationFamily PerturbationFamily::outer_exchange(double delta, double sigma) {
  return {FamilyKind::outer_exchange, delta, sigma};
}

double mass_ratio_sigma(const SpinorState& s) {
  const double num = inner(s.u1, s.u1);
  const double den = inner(s.um1, s.um1);
  if (den <= 0.0) throw std::domain_error("mass ratio undefined: um1 vanishes");
  return num / den;
}

double feasible_delta_bound(FamilyKind kind, double mix) {
  switch (kind) {
    case FamilyKind::lower_magnetization:
    case FamilyKind::raise_magnetization:
      return 1.0;
    case FamilyKind::close_middle:
      return 0.5;
    case FamilyKind::open_middle:
    case FamilyKind::open_middle_sigma:
    case FamilyKind::outer_exchange:
      if (!(mix > 0.0)) throw std::invalid_argument("family needs a positive mixing weight");
      return std::min(1.0, 1.0 / mix);
  }
  return 0.0;
}

SpinorState perturb(const SpinorState& s, const PerturbationFamily& fam) {
  const double d = fam.delta;
  if (!(d >= 0.0)) throw std::domain_error("delta must be nonnegative");
  const double bound = feasible_delta_bound(fam.kind, fam.mix);
  if (d > bound) throw std::domain_error("delta exceeds the family's feasibility bound");

  auto sq = squared_components(s);
  auto& q1 = sq[0].v;
  auto& q0 = sq[1].v;
  auto& qm1 = sq[2].v;
  const std::size_t n = q1.size();
  switch (fam.kind) {
    case FamilyKind::lower_magnetization:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = d * (q1[i] + qm1[i]);
        q1[i] *= (1.0 - d);
        qm1[i] *= (1.0 - d);
        q0[i] += t;
      }
      break;
    case FamilyKind::raise_magnetization:
      for (std::size_t i = 0; i < n; ++i) {
        q1[i] += d * (q0[i] + qm1[i]);
        q0[i] *= (1.0 - d);
        qm1[i] *= (1.0 - d);
      }
      break;
    case FamilyKind::open_middle:
    case FamilyKind::open_middle_sigma:
      for (std::size_t i = 0; i < n; ++i) {
        q0[i] += d * q1[i] + fam.mix * d * qm1[i];
        q1[i] *= (1.0 - d);
        qm1[i] *= (1.0 - fam.mix * d);
      }
      break;
    case FamilyKind::close_middle:
      for (std::size_t i = 0; i < n; ++i) {
        q1[i] += d * q0[i];
        qm1[i] += d * q0[i];
        q0[i] *= (1.0 - 2.0 * d);
      }
      break;
    case FamilyKind::outer_exchange:
      for (std::size_t i = 0; i < n; ++i) {
        const double p1 = q1[i], pm1 = qm1[i];
        q1[i] = (1.0 - d) * p1 + fam.mix * d * pm1;
        qm1[i] = d * p1 + (1.0 - fam.mix * d) * pm1;
      }
      break;
  }
  return rooted(std::move(sq));
}

EnergyPart parse_energy_part(std::string_view name) {
  if (name == "kin") return EnergyPart::kin;
  if (name == "pot") return EnergyPart::pot;
  if (name == "n") return EnergyPart::n;
  if (name == "s") return EnergyPart::s;
  if (name == "zee") return EnergyPart::zee;
  if (name == "total") return EnergyPart::total;
  throw std::invalid_argument("unknown energy part name");
}

namespace {

double part_value(const EnergyBreakdown& e, EnergyPart part) {
  switch (part) {
    case EnergyPart::kin: return e.kin;
    case EnergyPart::pot: return e.pot;
    case EnergyPart::n: return e.n;
    case EnergyPart::s: return e.s;
    case EnergyPart::zee: return e.zee;
    case EnergyPart::total: return e.total;
  }
  return 0.0;
}

double richardson_quotient(const SpinorState& st, const PerturbationFamily& fam,
                           EnergyPart part, const ModelParams& p) {
  const double base = part_value(energy_parts(st, p), part);
  auto quotient = [&](double d) {
    PerturbationFamily f = fam;
    f.delta = d;
    const double e = part_value(energy_parts(perturb(st, f), p), part);
    return (e - base) / d;
  };
  const double big = 1e-4, small = 5e-5;
  return 2.0 * quotient(small) - quotient(big);
}

// d/ddelta of the spin part along close_middle, differentiated under the
// integral: -2 beta_s int u0^2 (u1-um1)^2 (2 + u0^2/(u1 um1)).
double close_middle_spin_derivative(const SpinorState& st, const ModelParams& p) {
  const Grid& g = *st.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.trapezoid_weight(i);
    const double a = st.u1.v[i], b = st.u0.v[i], c = st.um1.v[i];
    const double b2 = b * b, diff2 = (a - c) * (a - c);
    acc += w * (2.0 * b2 * diff2 + b2 * b2 * diff2 / std::max(a * c, kNodeFloor));
  }
  return -2.0 * p.beta_s * acc * g.cell_volume();
}

// d/ddelta of the spin part along open_middle on a 2C state:
// 4 beta_s int u1 um1 (u1 - um1)(tau um1 - u1).
double open_middle_spin_derivative(const SpinorState& st, const ModelParams& p, double tau) {
  const Grid& g = *st.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.trapezoid_weight(i);
    const double a = st.u1.v[i], c = st.um1.v[i];
    acc += w * a * c * (a - c) * (tau * c - a);
  }
  return 4.0 * p.beta_s * acc * g.cell_volume();
}

}  // namespace

double directional_derivative(const SpinorState& st, const PerturbationFamily& fam,
                              EnergyPart part, const ModelParams& p) {
  // Redistributions keep |u|^2 pointwise, so the trap and density parts
  // are constant along every family.
  if (part == EnergyPart::pot || part == EnergyPart::n) return 0.0;

  const double u0_mass = inner(st.u0, st.u0);
  const bool two_component = u0_mass < 1e-14;

  if (fam.kind == FamilyKind::close_middle) {
    switch (part) {
      case EnergyPart::kin:
        return -edge_s_over_sq(st.u1, st.u0) - edge_s_over_sq(st.um1, st.u0);
      case EnergyPart::s:
        return close_middle_spin_derivative(st, p);
      case EnergyPart::zee:
        return 2.0 * p.q * u0_mass;
      case EnergyPart::total:
        return directional_derivative(st, fam, EnergyPart::kin, p) +
               directional_derivative(st, fam, EnergyPart::s, p) +
               directional_derivative(st, fam, EnergyPart::zee, p);
      default: break;
    }
  }
  if (fam.kind == FamilyKind::open_middle && two_component) {
    switch (part) {
      case EnergyPart::kin:
        return -edge_s_over_mix(st.u1, st.um1, fam.mix);
      case EnergyPart::s:
        return open_middle_spin_derivative(st, p, fam.mix);
      case EnergyPart::zee:
        return -p.q * (inner(st.u1, st.u1) + fam.mix * inner(st.um1, st.um1));
      case EnergyPart::total:
        return directional_derivative(st, fam, EnergyPart::kin, p) +
               directional_derivative(st, fam, EnergyPart::s, p) +
               directional_derivative(st, fam, EnergyPart::zee, p);
      default: break;
    }
  }
  return richardson_quotient(st, fam, part, p);
}

}  // namespace spinor
