#include "spinor/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spinor {

namespace {

constexpr double kNodeFloor = 1e-30;
constexpr double kSupportRel = 1e-12;

double ineq_tolerance(double lhs, double rhs, double rel) {
  return rel * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

// trapezoid integral of a pointwise function of the node index
template <class F>
double integral_pointwise(const Grid& g, F&& fn) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g.trapezoid_weight(i) * fn(i);
  return acc * g.cell_volume();
}

double middle_mass(const SpinorState& u) { return inner(u.u0, u.u0); }

void require_interior_magnetization(const Constraints& c) {
  const double M = c.magnetization / c.particle_number;
  if (!(M > 1e-12) || !(M < 1.0 - 1e-12))
    throw std::domain_error("check needs 0 < M < 1");
}

// 4 beta_s int z1 zm1 (z1 - zm1)(tau zm1 - z1): spin-energy derivative of
// opening the middle component on a 2C state.
double opening_spin_gain(const SpinorState& z, const ModelParams& p, double tau) {
  const Grid& g = *z.grid();
  return 4.0 * p.beta_s *
         integral_pointwise(g, [&](std::size_t i) {
           const double a = z.u1.v[i], c = z.um1.v[i];
           return a * c * (a - c) * (tau * c - a);
         });
}

}  // namespace

VerificationResult verify_two_component_inequality(const SpinorState& z,
                                                   const ModelParams& p,
                                                   const Constraints& c) {
  if (middle_mass(z) > 1e-14)
    throw std::domain_error("two-component check needs u0 == 0");
  require_interior_magnetization(c);
  const double M = c.magnetization / c.particle_number;
  const double tau = (1.0 + M) / (1.0 - M);

  VerificationResult r;
  r.name = "two_component_necessary";
  r.lhs = p.q * (1.0 + M) + edge_s_over_mix(z.u1, z.um1, tau);
  r.rhs = opening_spin_gain(z, p, tau);
  r.gap = relative_gap(r.lhs, r.rhs);
  r.tolerance = ineq_tolerance(r.lhs, r.rhs, 1e-9);
  r.satisfied = r.lhs <= r.rhs + r.tolerance;
  r.note = "necessary for the 2C state to be the ground state at this (M, q)";
  return r;
}

double threshold_upper_bound(const SpinorState& z, const ModelParams& p,
                             const Constraints& c) {
  if (middle_mass(z) > 1e-14)
    throw std::domain_error("threshold bound needs a two-component state");
  require_interior_magnetization(c);
  const double M = c.magnetization / c.particle_number;
  const double tau = (1.0 + M) / (1.0 - M);
  const double gain = opening_spin_gain(z, p, tau);
  const double cost = edge_s_over_mix(z.u1, z.um1, tau);
  return (gain - cost) / (1.0 + M);
}

namespace {

// Spin part of the middle-closing cost:
//   beta_s int u0^2 (u1-um1)^2 (2 + u0^2/(u1 um1)),
// quotient restricted to nodes where both outer components exceed
// kSupportRel of their maxima.
double closing_spin_cost(const SpinorState& u, const ModelParams& p,
                         double* out_radius) {
  const Grid& g = *u.grid();
  const double cut1 = kSupportRel * max_abs(u.u1);
  const double cutm = kSupportRel * max_abs(u.um1);
  double radius = 0.0;
  const double val = integral_pointwise(g, [&](std::size_t i) {
    const double a = u.u1.v[i], b = u.u0.v[i], cc = u.um1.v[i];
    const double b2 = b * b;
    const double diff2 = (a - cc) * (a - cc);
    double acc = 2.0 * b2 * diff2;
    if (a > cut1 && cc > cutm) {
      acc += b2 * b2 * diff2 / std::max(a * cc, kNodeFloor);
      radius = std::max(radius, g.radius(i));
    }
    return acc;
  });
  if (out_radius) *out_radius = radius;
  return p.beta_s * val;
}

// Kinetic part: 1/2 sum_j S(u_j, u0)/u_j^2, node-based central differences.
double closing_kinetic_cost(const SpinorState& u, double* out_radius) {
  double r1 = 0, r2 = 0;
  const double a = node_s_over_sq(u.u1, u.u0, kSupportRel, &r1);
  const double b = node_s_over_sq(u.um1, u.u0, kSupportRel, &r2);
  if (out_radius) *out_radius = std::max(r1, r2);
  return 0.5 * (a + b);
}

}  // namespace

BalanceCheck verify_zeeman_balance(const SpinorState& u, const ModelParams& p,
                                   const Constraints& c) {
  (void)c;
  const double m0 = middle_mass(u);
  double rad_s = 0, rad_k = 0;
  const double zeeman = p.q * m0;
  const double cost = closing_spin_cost(u, p, &rad_s) + closing_kinetic_cost(u, &rad_k);
  const double radius = std::max(rad_s, rad_k);

  BalanceCheck out;
  out.inequality.name = "zeeman_balance_inequality";
  out.inequality.lhs = cost;
  out.inequality.rhs = zeeman;
  out.inequality.gap = relative_gap(cost, zeeman);
  // the equality behind it is discretization-limited, so the inequality
  // inherits the same slack
  out.inequality.tolerance = ineq_tolerance(cost, zeeman, 1e-3);
  out.inequality.satisfied = cost <= zeeman + out.inequality.tolerance;
  out.inequality.restriction_radius = radius;

  out.equality.name = "zeeman_balance_equality";
  out.equality.equality = true;
  out.equality.lhs = zeeman;
  out.equality.rhs = cost;
  out.equality.gap = relative_gap(zeeman, cost);
  out.equality.tolerance = 1e-3;
  out.equality.satisfied = out.equality.gap <= out.equality.tolerance;
  out.equality.restriction_radius = radius;
  return out;
}

double threshold_quotient(const SpinorState& u, const ModelParams& p) {
  const double m0 = middle_mass(u);
  if (m0 < kTwoComponentMassCut)
    throw std::domain_error("threshold quotient needs a three-component state");
  return (closing_spin_cost(u, p, nullptr) + closing_kinetic_cost(u, nullptr)) / m0;
}

VerificationResult verify_sigma_balance(const SpinorState& u, const ModelParams& p,
                                        const Constraints& c) {
  require_interior_magnetization(c);
  if (middle_mass(u) < kTwoComponentMassCut)
    throw std::domain_error("sigma balance needs a three-component state");
  const Grid& g = *u.grid();
  const double sigma = inner(u.u1, u.u1) / inner(u.um1, u.um1);

  const double spin_gain =
      integral_pointwise(g, [&](std::size_t i) {
        const double a = u.u1.v[i], b = u.u0.v[i], cc = u.um1.v[i];
        const double factor = (a - cc) * (sigma * cc - a);
        return (4.0 * p.beta_s * a * cc + 2.0 * p.beta_s * b * b) * factor;
      });
  const double zeeman = p.q * integral_pointwise(g, [&](std::size_t i) {
    const double a = u.u1.v[i], cc = u.um1.v[i];
    return a * a + sigma * cc * cc;
  });
  double rad1 = 0, rad2 = 0;
  const double kin = node_s_over_sq(u.u0, u.u1, kSupportRel, &rad1) +
                     sigma * node_s_over_sq(u.u0, u.um1, kSupportRel, &rad2);

  VerificationResult r;
  r.name = "sigma_balance_equality";
  r.equality = true;
  r.lhs = spin_gain;
  r.rhs = zeeman + kin;
  r.gap = relative_gap(r.lhs, r.rhs);
  r.tolerance = 1e-2;  // divides by u0^2, tail noise amplified
  r.satisfied = r.gap <= r.tolerance;
  r.restriction_radius = std::max(rad1, rad2);
  return r;
}

std::vector<VerificationResult> check_qualitative(const SpinorState& u,
                                                  const ModelParams& p,
                                                  const Constraints& c) {
  const Grid& g = *u.grid();
  const double M = c.magnetization / c.particle_number;
  std::vector<VerificationResult> out;

  {
    VerificationResult r;
    r.name = "ordering_um1_le_u1";
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, u.um1.v[i] - u.u1.v[i]);
    r.lhs = worst;
    r.rhs = 0.0;
    r.tolerance = 1e-10;
    r.satisfied = worst <= r.tolerance;
    out.push_back(r);
  }

  const double bulk = g.extent() / 2.0;
  if (M > 1e-12) {
    VerificationResult r;
    r.name = "strict_ordering_interior";
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.radius(i) > bulk) continue;
      min_gap = std::min(min_gap, u.u1.v[i] - u.um1.v[i]);
    }
    r.lhs = 0.0;
    r.rhs = min_gap;
    r.tolerance = 0.0;
    r.satisfied = min_gap > 0.0;
    r.restriction_radius = bulk;
    r.note = "min of u1 - um1 over |x| <= L/2";
    out.push_back(r);
  }

  if (M > 1e-12 && M < 1.0 - 1e-12) {
    {
      VerificationResult r;
      r.name = "outer_components_positive";
      double min_val = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.radius(i) > bulk) continue;
        min_val = std::min({min_val, u.u1.v[i], u.um1.v[i]});
      }
      r.rhs = min_val;
      r.satisfied = min_val > 0.0;
      r.restriction_radius = bulk;
      out.push_back(r);
    }
    {
      VerificationResult r;
      r.name = "lambda_positive";
      try {
        const Multipliers m = multipliers(u, p);
        r.rhs = m.lambda;
        r.satisfied = m.lambda > 0.0;
      } catch (const std::domain_error& e) {
        r.satisfied = false;
        r.note = e.what();
      }
      out.push_back(r);
    }
  }

  if (M <= 1e-12 && p.q > 0.0) {
    VerificationResult r;
    r.name = "outer_collapse_at_m0";
    r.lhs = std::max(inner(u.u1, u.u1), inner(u.um1, u.um1));
    r.rhs = 0.0;
    r.tolerance = 1e-10;
    r.satisfied = r.lhs <= r.tolerance;
    out.push_back(r);
  }
  if (M >= 1.0 - 1e-12) {
    VerificationResult r;
    r.name = "collapse_at_m1";
    r.lhs = std::max(inner(u.u0, u.u0), inner(u.um1, u.um1));
    r.rhs = 0.0;
    r.tolerance = 1e-10;
    r.satisfied = r.lhs <= r.tolerance;
    out.push_back(r);
  }
  return out;
}

DecayFit decay_fit_field(const ScalarField& f, int component, double window_lo,
                         double window_hi) {
  const Grid& g = *f.grid;
  std::vector<double> rs, ys;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.radius(i);
    if (r < window_lo || r > window_hi) continue;
    if (!(f.v[i] > 1e-14)) continue;
    rs.push_back(r);
    ys.push_back(std::log(f.v[i]));
  }
  if (rs.size() < 3)
    throw std::domain_error("decay window empty or amplitudes below floor");

  const double n = static_cast<double>(rs.size());
  double sr = 0, sy = 0, srr = 0, sry = 0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    sr += rs[k];
    sy += ys[k];
    srr += rs[k] * rs[k];
    sry += rs[k] * ys[k];
  }
  const double denom = n * srr - sr * sr;
  if (!(std::abs(denom) > 0.0)) throw std::domain_error("degenerate decay window");
  const double slope = (n * sry - sr * sy) / denom;
  const double intercept = (sy - slope * sr) / n;

  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / n;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double fit = intercept + slope * rs[k];
    ss_res += (ys[k] - fit) * (ys[k] - fit);
    ss_tot += (ys[k] - ymean) * (ys[k] - ymean);
  }

  DecayFit out;
  out.component = component;
  out.t = -slope;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  out.accepted = out.r2 > 0.99 && slope < 0.0;
  // lift the prefactor so the bound holds pointwise on the window
  double lift = 0.0;
  for (std::size_t k = 0; k < rs.size(); ++k)
    lift = std::max(lift, std::exp(ys[k] + out.t * rs[k]));
  out.prefactor = lift;
  return out;
}

DecayFit decay_fit(const SpinorState& u, int component, double window_lo,
                   double window_hi) {
  return decay_fit_field(u.component(component), component, window_lo, window_hi);
}

double midpoint_defect(const SpinorState& u, const SpinorState& v,
                       const ModelParams& p) {
  require_same_grid(u.u1, v.u1);
  SpinorState w = zero_state(u.grid());
  for (int j : {1, 0, -1}) {
    const ScalarField& a = u.component(j);
    const ScalarField& b = v.component(j);
    ScalarField& wj = w.component(j);
    for (std::size_t i = 0; i < a.size(); ++i)
      wj.v[i] = std::sqrt(0.5 * (a.v[i] * a.v[i] + b.v[i] * b.v[i]));
  }
  return 0.5 * (energy_parts(u, p).total + energy_parts(v, p).total) -
         energy_parts(w, p).total;
}

namespace {

// C^1 compactly supported bump centred at c along axis 0.
ScalarField cos2_bump(const GridPtr& grid, double center, double width) {
  ScalarField f(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double d2 = 0.0;
    {
      const double dx = grid->coord(grid->axis_index(i, 0)) - center;
      d2 += dx * dx;
    }
    for (int a = 1; a < grid->dim(); ++a) {
      const double dx = grid->coord(grid->axis_index(i, a));
      d2 += dx * dx;
    }
    const double r = std::sqrt(d2);
    if (r < width) {
      const double cs = std::cos(std::numbers::pi * r / (2.0 * width));
      f.v[i] = cs * cs;
    }
  }
  return f;
}

void rescale_mass(ScalarField& f, double target) {
  const double m = inner(f, f);
  if (!(m > 0.0)) throw std::domain_error("empty bump");
  const double s = std::sqrt(target / m);
  for (double& x : f.v) x *= s;
}

}  // namespace

ConvexityDefect convexity_defect(const GridPtr& grid, const ModelParams& p) {
  const double L = grid->extent();
  const double width = L / 8.0;
  ScalarField f = cos2_bump(grid, -L / 2.0, width);
  ScalarField gb = cos2_bump(grid, 0.0, width);
  ScalarField hb = cos2_bump(grid, L / 2.0, width);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const int overlaps = (f.v[i] > 0.0) + (gb.v[i] > 0.0) + (hb.v[i] > 0.0);
    if (overlaps > 1) throw std::domain_error("bump overlap detected");
  }
  rescale_mass(f, 0.5);
  rescale_mass(gb, 0.25);
  rescale_mass(hb, 0.25);

  ConvexityDefect out;
  out.u = SpinorState{f, gb, hb};
  out.v = SpinorState{f, hb, gb};
  out.d = midpoint_defect(out.u, out.v, p);
  const Grid& g = *grid;
  const double quartic = integral_pointwise(g, [&](std::size_t i) {
    const double gv = gb.v[i], hv = hb.v[i];
    return gv * gv * gv * gv + hv * hv * hv * hv;
  });
  out.closed_form = -p.beta_s * quartic / 4.0;
  return out;
}

OuterExchangeProbe probe_outer_exchange(const SpinorState& u, const ModelParams& p) {
  const Grid& g = *u.grid();
  const double sigma = inner(u.u1, u.u1) / inner(u.um1, u.um1);

  OuterExchangeProbe out;
  double r1 = 0, r2 = 0;
  out.lhs = sigma * node_s_over_sq(u.u1, u.um1, kSupportRel, &r1) +
            node_s_over_sq(u.um1, u.u1, kSupportRel, &r2);

  const double cut1 = kSupportRel * max_abs(u.u1);
  const double cutm = kSupportRel * max_abs(u.um1);
  out.rhs = 2.0 * p.beta_s *
            integral_pointwise(g, [&](std::size_t i) {
              const double a = u.u1.v[i], b = u.u0.v[i], cc = u.um1.v[i];
              if (!(a > cut1 && cc > cutm)) return 0.0;
              return (a * a - cc * cc) * (sigma * cc * cc - a * a) *
                     (b * b / std::max(a * cc, kNodeFloor) + 2.0);
            });
  out.both_finite = std::isfinite(out.lhs) && std::isfinite(out.rhs);

  // outermost node where all three components are above the floor
  double best_r = -1.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (u.u1.v[i] > 1e-14 && u.u0.v[i] > 1e-14 && u.um1.v[i] > 1e-14) {
      const double r = g.radius(i);
      if (r > best_r) {
        best_r = r;
        best = i;
      }
    }
  }
  if (best_r >= 0.0) {
    out.tail_radius = best_r;
    out.tail_ratio_u0_um1 = u.u0.v[best] / u.um1.v[best];
    out.tail_ratio_um1_u1 = u.um1.v[best] / u.u1.v[best];
  }
  return out;
}

VerificationResult pointwise_quotient_chain(const SpinorState& u, double sigma) {
  const Grid& g = *u.grid();
  const double inv_2h = 1.0 / (2.0 * g.spacing());
  const int n = g.nodes_per_axis();
  const double cut1 = kSupportRel * max_abs(u.u1);
  const double cut0 = kSupportRel * max_abs(u.u0);
  const double cutm = kSupportRel * max_abs(u.um1);

  double worst = -std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.on_boundary(i)) continue;
    const double a = u.u1.v[i], b = u.u0.v[i], cc = u.um1.v[i];
    if (!(a > cut1 && b > cut0 && cc > cutm)) continue;
    double lhs = 0.0, cross = 0.0;
    bool usable = true;
    for (int ax = 0; ax < g.dim(); ++ax) {
      const std::size_t s = g.stride(ax);
      const int ia = g.axis_index(i, ax);
      if (ia <= 0 || ia >= n - 1) { usable = false; break; }
      const double d1 = (u.u1.v[i + s] - u.u1.v[i - s]) * inv_2h;
      const double d0 = (u.u0.v[i + s] - u.u0.v[i - s]) * inv_2h;
      const double dm = (u.um1.v[i + s] - u.um1.v[i - s]) * inv_2h;
      const double c01 = b * d1 - a * d0;
      const double c0m = b * dm - cc * d0;
      const double c1m = a * dm - cc * d1;
      lhs += (c01 * c01 + sigma * c0m * c0m);
      cross += c1m * c1m;
    }
    if (!usable) continue;
    lhs /= (b * b);
    const double rhs = sigma * cross / (a * a + sigma * cc * cc);
    const double scale = std::max({lhs, rhs, kGapFloor});
    worst = std::max(worst, (rhs - lhs) / scale);
    ++checked;
  }

  VerificationResult r;
  r.name = "pointwise_quotient_chain";
  r.lhs = (checked > 0) ? worst : 0.0;
  r.rhs = 0.0;
  r.tolerance = 1e-12;
  r.satisfied = checked > 0 && worst <= r.tolerance;
  r.note = "worst relative violation over " + std::to_string(checked) + " nodes";
  return r;
}

}  // namespace spinor
