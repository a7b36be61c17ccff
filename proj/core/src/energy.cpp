#include "spinor/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace spinor {

namespace {
constexpr double kDegenerateMass = 1e-12;
}

void ModelParams::validate() const {
  if (!(beta_n > 0.0)) throw std::invalid_argument("beta_n must be positive");
  if (!(beta_s > 0.0)) throw std::invalid_argument("beta_s must be positive");
  if (q < 0.0) throw std::invalid_argument("q must be nonnegative");
  if (!potential.grid) throw std::invalid_argument("model has no trap potential");
  for (double v : potential.v)
    if (v < 0.0) throw std::invalid_argument("trap potential must be nonnegative");
}

ModelParams make_params(const GridPtr& grid, double beta_n, double beta_s,
                        double q, std::span<const double> gammas) {
  ModelParams p;
  p.beta_n = beta_n;
  p.beta_s = beta_s;
  p.q = q;
  p.potential = trap_potential(grid, TrapKind::harmonic, gammas);
  p.validate();
  return p;
}

EnergyBreakdown energy_parts(const SpinorState& s, const ModelParams& p) {
  require_same_grid(s.u1, p.potential);
  require_same_grid(s.u1, s.u0);
  require_same_grid(s.u1, s.um1);
  const Grid& g = *s.grid();

  EnergyBreakdown e;
  e.kin = kinetic_energy(s.u1) + kinetic_energy(s.u0) + kinetic_energy(s.um1);

  double pot = 0, dens = 0, spin = 0, zee = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.trapezoid_weight(i);
    const double a = s.u1.v[i], b = s.u0.v[i], c = s.um1.v[i];
    const double rho = a * a + b * b + c * c;
    pot += w * p.potential.v[i] * rho;
    dens += w * rho * rho;
    const double diff = a - c;
    const double d2 = a * a - c * c;
    spin += w * (2.0 * b * b * diff * diff + d2 * d2);
    zee += w * (a * a + c * c);
  }
  const double vol = g.cell_volume();
  e.pot = pot * vol;
  e.n = p.beta_n * dens * vol;
  e.s = p.beta_s * spin * vol;
  e.zee = p.q * zee * vol;
  e.total = e.kin + e.pot + e.n + e.s + e.zee;
  return e;
}

std::array<ScalarField, 3> gp_apply(const SpinorState& s, const ModelParams& p) {
  require_same_grid(s.u1, p.potential);
  const Grid& g = *s.grid();
  std::array<ScalarField, 3> out = {laplacian(s.u1), laplacian(s.u0), laplacian(s.um1)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.on_boundary(i)) {
      out[0].v[i] = out[1].v[i] = out[2].v[i] = 0.0;
      continue;
    }
    const double a = s.u1.v[i], b = s.u0.v[i], c = s.um1.v[i];
    const double rho = a * a + b * b + c * c;
    const double lin = p.potential.v[i] + 2.0 * p.beta_n * rho;
    out[0].v[i] = -out[0].v[i] + lin * a +
                  2.0 * p.beta_s * (b * b * (a - c) + a * (a * a - c * c)) + p.q * a;
    out[1].v[i] = -out[1].v[i] + lin * b + 2.0 * p.beta_s * b * (a - c) * (a - c);
    out[2].v[i] = -out[2].v[i] + lin * c +
                  2.0 * p.beta_s * (b * b * (c - a) + c * (c * c - a * a)) + p.q * c;
  }
  return out;
}

Multipliers multipliers(const SpinorState& s, const ModelParams& p) {
  const double m1 = inner(s.u1, s.u1);
  const double mm1 = inner(s.um1, s.um1);
  if (m1 < kDegenerateMass || mm1 < kDegenerateMass)
    throw std::domain_error("multiplier formula degenerates: outer component mass below 1e-12");
  const auto A = gp_apply(s, p);
  const double f1 = inner(s.u1, A[0]) / m1;
  const double fm1 = inner(s.um1, A[2]) / mm1;
  return Multipliers{0.5 * (f1 + fm1), 0.5 * (f1 - fm1)};
}

Multipliers multipliers_robust(const SpinorState& s, const ModelParams& p) {
  const double m1 = inner(s.u1, s.u1);
  const double mm1 = inner(s.um1, s.um1);
  if (m1 >= kDegenerateMass && mm1 >= kDegenerateMass) return multipliers(s, p);
  const auto A = gp_apply(s, p);
  if (m1 >= kDegenerateMass) {
    const double f1 = inner(s.u1, A[0]) / m1;
    return Multipliers{f1, 0.0};
  }
  const double m0 = inner(s.u0, s.u0);
  if (m0 >= kDegenerateMass) {
    const double f0 = inner(s.u0, A[1]) / m0;
    return Multipliers{f0, 0.0};
  }
  if (mm1 >= kDegenerateMass) {
    const double fm1 = inner(s.um1, A[2]) / mm1;
    return Multipliers{fm1, 0.0};
  }
  return Multipliers{0.0, 0.0};
}

double gp_residual(const SpinorState& s, const ModelParams& p, const Multipliers& m) {
  const Grid& g = *s.grid();
  const auto A = gp_apply(s, p);
  const double c1 = m.mu + m.lambda;
  const double c0 = m.mu;
  const double cm1 = m.mu - m.lambda;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.on_boundary(i)) continue;
    const double r1 = A[0].v[i] - c1 * s.u1.v[i];
    const double r0 = A[1].v[i] - c0 * s.u0.v[i];
    const double rm1 = A[2].v[i] - cm1 * s.um1.v[i];
    acc += r1 * r1 + r0 * r0 + rm1 * rm1;
    count += 3;
  }
  return count ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
}

EdgeField cross_gradient_sq(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid;
  EdgeField out(f.grid);
  const double inv_h2 = 1.0 / (gr.spacing() * gr.spacing());
  for (int a = 0; a < gr.dim(); ++a) {
    auto& slot = out.axis[static_cast<std::size_t>(a)];
    for_each_edge(gr, a, [&](std::size_t i, std::size_t j) {
      const double cross = f.v[i] * g.v[j] - f.v[j] * g.v[i];
      slot[i] = cross * cross * inv_h2;
    });
  }
  return out;
}

IdentityGap lambda_identity_gap(const SpinorState& s, const ModelParams& p,
                                const Multipliers& m) {
  const Grid& g = *s.grid();
  double cross = 0, weighted = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.trapezoid_weight(i);
    const double a = s.u1.v[i], b = s.u0.v[i], c = s.um1.v[i];
    cross += w * a * c;
    weighted += w * (a * a - c * c) * (b * b + 2.0 * a * c);
  }
  const double vol = g.cell_volume();
  IdentityGap out;
  out.lhs = m.lambda * cross * vol;
  out.rhs = p.beta_s * weighted * vol;
  out.gap = relative_gap(out.lhs, out.rhs);
  return out;
}

double edge_s_over_sq(const ScalarField& f, const ScalarField& g, double floor_abs) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid;
  const double inv_h2 = 1.0 / (gr.spacing() * gr.spacing());
  double acc = 0.0;
  for (int a = 0; a < gr.dim(); ++a) {
    for_each_edge(gr, a, [&](std::size_t i, std::size_t j) {
      const double den = f.v[i] * f.v[j];
      if (den <= floor_abs) return;
      const double cross = f.v[i] * g.v[j] - f.v[j] * g.v[i];
      acc += cross * cross * inv_h2 / den;
    });
  }
  return acc * gr.cell_volume();
}

double edge_s_over_mix(const ScalarField& f, const ScalarField& g, double tau) {
  require_same_grid(f, g);
  if (!(tau > 0.0)) throw std::invalid_argument("mixing weight must be positive");
  const Grid& gr = *f.grid;
  const double inv_h2 = 1.0 / (gr.spacing() * gr.spacing());
  double acc = 0.0;
  for (int a = 0; a < gr.dim(); ++a) {
    for_each_edge(gr, a, [&](std::size_t i, std::size_t j) {
      const double Gi = std::sqrt(f.v[i] * f.v[i] + tau * g.v[i] * g.v[i]);
      const double Gj = std::sqrt(f.v[j] * f.v[j] + tau * g.v[j] * g.v[j]);
      const double den = 0.5 * (Gi * Gj + f.v[i] * f.v[j] + tau * g.v[i] * g.v[j]);
      if (den <= 1e-30) return;
      const double cross = f.v[i] * g.v[j] - f.v[j] * g.v[i];
      acc += tau * cross * cross * inv_h2 / den;
    });
  }
  return acc * gr.cell_volume();
}

double node_s_over_sq(const ScalarField& f, const ScalarField& g,
                      double rel_floor, double* out_radius) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid;
  const double cut = rel_floor * max_abs(f);
  const double inv_2h = 1.0 / (2.0 * gr.spacing());
  const int n = gr.nodes_per_axis();
  double acc = 0.0, radius = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    if (gr.on_boundary(i)) continue;
    if (!(f.v[i] > cut)) continue;
    double snum = 0.0;
    for (int a = 0; a < gr.dim(); ++a) {
      const std::size_t s = gr.stride(a);
      const int ia = gr.axis_index(i, a);
      if (ia <= 0 || ia >= n - 1) continue;
      const double df = (f.v[i + s] - f.v[i - s]) * inv_2h;
      const double dg = (g.v[i + s] - g.v[i - s]) * inv_2h;
      const double cross = f.v[i] * dg - g.v[i] * df;
      snum += cross * cross;
    }
    acc += gr.trapezoid_weight(i) * snum / (f.v[i] * f.v[i]);
    radius = std::max(radius, gr.radius(i));
  }
  if (out_radius) *out_radius = radius;
  return acc * gr.cell_volume();
}

}  // namespace spinor
