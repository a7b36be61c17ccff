#include "spinor/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace spinor {

namespace {

constexpr double kMassFloor = 1e-14;
constexpr int kMaxHalvings = 30;

// Explicit part of the flow: everything in the stationarity operator except
// (-Lap + V). Must stay in sync with gp_apply.
void nonlinear_terms(const SpinorState& u, const ModelParams& p, bool zeeman,
                     std::array<ScalarField, 3>& out) {
  const std::size_t n = u.u1.size();
  const double q = zeeman ? p.q : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u.u1.v[i], b = u.u0.v[i], c = u.um1.v[i];
    const double rho2 = 2.0 * p.beta_n * (a * a + b * b + c * c);
    out[0].v[i] = rho2 * a + 2.0 * p.beta_s * (b * b * (a - c) + a * (a * a - c * c)) + q * a;
    out[1].v[i] = rho2 * b + 2.0 * p.beta_s * b * (a - c) * (a - c);
    out[2].v[i] = rho2 * c + 2.0 * p.beta_s * (b * b * (c - a) + c * (c * c - a * a)) + q * c;
  }
}

// Solve (I + dt (-Lap + V)) x = rhs with zero-Dirichlet boundary.
// 1D uses the Thomas algorithm; higher dimensions a Jacobi-preconditioned CG.
ScalarField implicit_solve(const ScalarField& rhs, const ScalarField& V, double dt) {
  const Grid& g = *rhs.grid;
  const double h2 = g.spacing() * g.spacing();
  ScalarField x(rhs.grid);

  if (g.dim() == 1) {
    const int n = g.nodes_per_axis();
    const int m = n - 2;  // interior unknowns
    if (m <= 0) return x;
    std::vector<double> c(static_cast<std::size_t>(m)), d(static_cast<std::size_t>(m));
    const double off = -dt / h2;
    for (int i = 0; i < m; ++i) {
      const std::size_t node = static_cast<std::size_t>(i + 1);
      const double diag = 1.0 + dt * (2.0 / h2 + V.v[node]);
      const double cp = (i == 0) ? 0.0 : c[static_cast<std::size_t>(i - 1)];
      const double dp = (i == 0) ? 0.0 : d[static_cast<std::size_t>(i - 1)];
      const double denom = diag - off * cp;
      c[static_cast<std::size_t>(i)] = off / denom;
      d[static_cast<std::size_t>(i)] = (rhs.v[node] - off * dp) / denom;
    }
    double prev = 0.0;
    for (int i = m - 1; i >= 0; --i) {
      const double xi = d[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)] * prev;
      x.v[static_cast<std::size_t>(i + 1)] = xi;
      prev = xi;
    }
    return x;
  }

  auto apply = [&](const ScalarField& in, ScalarField& out) {
    ScalarField lap = laplacian(in);
    for (std::size_t i = 0; i < g.size(); ++i)
      out.v[i] = g.on_boundary(i) ? 0.0 : in.v[i] + dt * (-lap.v[i] + V.v[i] * in.v[i]);
  };
  ScalarField r = rhs, z(rhs.grid), q(rhs.grid), pdir(rhs.grid);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_boundary(i)) r.v[i] = 0.0;
  auto precond = [&](const ScalarField& in, ScalarField& out) {
    for (std::size_t i = 0; i < g.size(); ++i)
      out.v[i] = in.v[i] / (1.0 + dt * (2.0 * g.dim() / h2 + V.v[i]));
  };
  precond(r, z);
  pdir = z;
  double rz = 0.0, rhs_norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    rz += r.v[i] * z.v[i];
    rhs_norm += r.v[i] * r.v[i];
  }
  const double stop = std::max(rhs_norm, 1e-300) * 1e-26;
  for (int it = 0; it < 500; ++it) {
    apply(pdir, q);
    double pq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) pq += pdir.v[i] * q.v[i];
    if (pq <= 0.0) break;
    const double alpha = rz / pq;
    double rr = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      x.v[i] += alpha * pdir.v[i];
      r.v[i] -= alpha * q.v[i];
      rr += r.v[i] * r.v[i];
    }
    if (rr < stop) break;
    precond(r, z);
    double rz_next = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rz_next += r.v[i] * z.v[i];
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < g.size(); ++i) pdir.v[i] = z.v[i] + beta * pdir.v[i];
  }
  return x;
}

SpinorState project_two_component(const SpinorState& s, const Constraints& c) {
  const double N = c.particle_number, M = c.magnetization;
  const double a = inner(s.u1, s.u1);
  const double mm = inner(s.um1, s.um1);
  SpinorState out = s;
  out.u0 = ScalarField(s.grid());
  const double s1 = std::sqrt((N + M) / (2.0 * a));
  for (double& x : out.u1.v) x *= s1;
  if (N - M < kMassFloor || mm < kMassFloor) {
    if (N - M >= kMassFloor)
      throw std::domain_error("two-component projection: um1 vanishes but M < N");
    for (double& x : out.um1.v) x = 0.0;
  } else {
    const double sm1 = std::sqrt((N - M) / (2.0 * mm));
    for (double& x : out.um1.v) x *= sm1;
  }
  return out;
}

struct FlowSetup {
  bool two_component = false;  // u0 pinned, split constraints, no Zeeman
};

SpinorState initial_state(const ModelParams& p, const Constraints& c,
                          const SolveOptions& o, const FlowSetup& setup) {
  const GridPtr grid = p.potential.grid;
  switch (o.init) {
    case InitKind::warm: {
      if (!o.warm_state) throw std::invalid_argument("warm init without a warm state");
      try {
        if (setup.two_component) return project_two_component(*o.warm_state, c);
        return project_constraints(*o.warm_state, c);
      } catch (const std::domain_error&) {
        // warm state infeasible for the new constraints; fall back to gaussian
        return setup.two_component ? gaussian_ansatz(c, grid)
                                   : three_component_ansatz(c, grid);
      }
    }
    case InitKind::random: {
      SpinorState s = random_admissible(c, grid, o.seed);
      if (setup.two_component) return project_two_component(s, c);
      return s;
    }
    case InitKind::gaussian:
    default:
      return setup.two_component ? gaussian_ansatz(c, grid)
                                 : three_component_ansatz(c, grid);
  }
}

SolveReport run_flow(const ModelParams& p, const Constraints& c,
                     const SolveOptions& o, const FlowSetup& setup) {
  p.validate();
  c.validate();
  if (!(o.dt > 0.0) || !(o.tol > 0.0) || o.max_iter < 1)
    throw std::invalid_argument("invalid solve options");

  const bool polarized = c.magnetization >= c.particle_number - kMassFloor;
  // The two-component flow minimizes with the Zeeman part dropped (it is
  // the constant q*N on that class), which makes the iterates exactly
  // independent of q.
  ModelParams p_flow = p;
  if (setup.two_component) p_flow.q = 0.0;

  SpinorState u = initial_state(p, c, o, setup);
  double energy = energy_parts(u, p_flow).total;
  if (o.energy_trace) o.energy_trace->push_back(energy);

  std::array<ScalarField, 3> nl = {ScalarField(u.grid()), ScalarField(u.grid()),
                                   ScalarField(u.grid())};
  const double dt0 = o.dt;
  double dt = o.dt;
  int iter = 0;
  bool converged = false;
  double residual = -1.0;
  int residual_cooldown = 0;

  auto project = [&](const SpinorState& s) {
    return setup.two_component ? project_two_component(s, c) : project_constraints(s, c);
  };

  while (iter < o.max_iter) {
    ++iter;
    nonlinear_terms(u, p, /*zeeman=*/!setup.two_component, nl);

    // Shift the explicit terms by the current multiplier estimate so the
    // discrete stationary point is an exact fixed point of the scheme;
    // without the shift the projection absorbs an O(dt) residual forever.
    double mult[3] = {0.0, 0.0, 0.0};
    {
      double mass[3], ray[3];
      for (int j : {1, 0, -1}) {
        const std::size_t k = static_cast<std::size_t>(1 - j);
        const ScalarField& uj = u.component(j);
        mass[k] = inner(uj, uj);
        ray[k] = kinetic_energy(uj) + inner(uj, nl[k]);
        double pot = 0.0;
        for (std::size_t i = 0; i < uj.size(); ++i)
          pot += uj.grid->trapezoid_weight(i) * p.potential.v[i] * uj.v[i] * uj.v[i];
        ray[k] += pot * uj.grid->cell_volume();
      }
      if (setup.two_component) {
        // the 2C class fixes each outer mass separately
        for (int k : {0, 2})
          mult[k] = (mass[k] > kMassFloor) ? ray[k] / mass[k] : 0.0;
      } else {
        // least-squares multipliers of the two true constraints: the
        // shifted direction is the tangent-space projection of the
        // gradient, so mass may still flow between u0 and the outer pair
        const double msum = mass[0] + mass[1] + mass[2];
        const double mdiff = mass[0] - mass[2];
        const double mout = mass[0] + mass[2];
        const double rsum = ray[0] + ray[1] + ray[2];
        const double rdiff = ray[0] - ray[2];
        const double det = msum * mout - mdiff * mdiff;
        double mu = 0.0, lam = 0.0;
        if (det > 1e-14 * std::max(msum * msum, 1e-300)) {
          mu = (rsum * mout - rdiff * mdiff) / det;
          lam = (msum * rdiff - mdiff * rsum) / det;
        } else if (msum > kMassFloor) {
          mu = rsum / msum;
        }
        mult[0] = mu + lam;
        mult[1] = mu;
        mult[2] = mu - lam;
      }
    }

    SpinorState next = u;
    double next_energy = energy;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      SpinorState trial = u;
      for (int j : {1, 0, -1}) {
        if (setup.two_component && j == 0) continue;
        if (polarized && j != 1) continue;
        const ScalarField& uj = u.component(j);
        const std::size_t k = static_cast<std::size_t>(1 - j);
        const ScalarField& nj = nl[k];
        ScalarField rhs = uj;
        for (std::size_t i = 0; i < rhs.size(); ++i)
          rhs.v[i] -= dt * (nj.v[i] - mult[k] * uj.v[i]);
        ScalarField solved = implicit_solve(rhs, p.potential, dt);
        for (double& x : solved.v) x = std::max(x, 0.0);
        trial.component(j) = std::move(solved);
      }
      trial = project(trial);
      const double e = energy_parts(trial, p_flow).total;
      // roundoff slack: near the minimum genuine decreases sit below the
      // ulp of the total and must not trigger backtracking
      if (e <= energy + 1e-14 * std::max(1.0, std::abs(energy))) {
        next = std::move(trial);
        next_energy = e;
        accepted = true;
        break;
      }
      dt *= 0.5;
    }
    if (!accepted) break;  // energy cannot decrease at any admissible step

    const double decrease = std::max(0.0, energy - next_energy);
    u = std::move(next);
    energy = next_energy;
    if (o.energy_trace) o.energy_trace->push_back(energy);

    const bool energy_flat = decrease < o.tol * dt;

    if (energy_flat && residual_cooldown <= 0) {
      residual = gp_residual(u, p, multipliers_robust(u, p));
      if (residual < 10.0 * o.tol) {
        converged = true;
        break;
      }
      residual_cooldown = 25;
    }
    --residual_cooldown;

    // Flat energy with a live residual means a slow linear mode (typically
    // a collapsing component); the implicit linear part tolerates much
    // larger steps there, and backtracking still guards the growth.
    dt = energy_flat ? std::min(dt * 1.2, 8.0 * dt0) : std::min(dt * 1.1, dt0);
  }

  SolveReport rep;
  rep.state = std::move(u);
  rep.energy = energy_parts(rep.state, p);
  rep.iterations = iter;
  const Multipliers robust = multipliers_robust(rep.state, p);
  rep.residual = (residual >= 0.0 && converged) ? residual : gp_residual(rep.state, p, robust);
  if (!converged) converged = rep.residual < 10.0 * o.tol;
  rep.converged = converged;
  const double m1 = inner(rep.state.u1, rep.state.u1);
  const double mm1 = inner(rep.state.um1, rep.state.um1);
  if (m1 >= 1e-12 && mm1 >= 1e-12) rep.mult = multipliers(rep.state, p);
  rep.u0_mass = inner(rep.state.u0, rep.state.u0);
  rep.classification = rep.u0_mass < kTwoComponentMassCut ? Classification::two_component
                                                          : Classification::three_component;
  return rep;
}

}  // namespace

SolveReport solve_two_component(const ModelParams& p, const Constraints& c,
                                const SolveOptions& o) {
  FlowSetup setup;
  setup.two_component = true;
  return run_flow(p, c, o, setup);
}

SolveReport solve_ground_state(const ModelParams& p, const Constraints& c,
                               const SolveOptions& o) {
  FlowSetup setup;
  SolveReport rep = run_flow(p, c, o, setup);

  const bool polarized = c.magnetization >= c.particle_number - kMassFloor;
  if (!o.use_two_component_candidate || polarized) return rep;

  // The flow cannot cross u0 == 0, so the restricted minimizer is checked
  // as an independent candidate and the lower-energy state wins.
  SolveReport two;
  if (o.two_component_candidate) {
    SolveOptions warm = o;
    warm.init = InitKind::warm;
    warm.warm_state = o.two_component_candidate;
    two = solve_two_component(p, c, warm);
  } else {
    SolveOptions inner = o;
    inner.init = InitKind::warm;
    SpinorState seed = rep.state;
    seed.u0 = ScalarField(seed.grid());
    inner.warm_state = std::move(seed);
    inner.energy_trace = nullptr;
    two = solve_two_component(p, c, inner);
  }
  two.iterations += rep.iterations;
  if (two.energy.total < rep.energy.total) return two;
  return rep;
}

std::vector<SweepResult> continuation(const ModelParams& p, const Constraints& base,
                                      const SolveOptions& o,
                                      std::span<const SweepPoint> sweep) {
  if (sweep.empty()) throw std::invalid_argument("continuation needs a nonempty sweep");
  std::vector<SweepResult> out;
  out.reserve(sweep.size());
  std::optional<SpinorState> prev;
  for (const SweepPoint& pt : sweep) {
    SweepResult res;
    res.M = pt.M;
    res.q = pt.q;
    try {
      Constraints c = base;
      c.magnetization = pt.M;
      c.validate();
      ModelParams pq = p;
      pq.q = pt.q;
      SolveOptions opts = o;
      if (prev) {
        opts.init = InitKind::warm;
        opts.warm_state = prev;
      }
      SolveReport rep = solve_ground_state(pq, c, opts);
      prev = rep.state;
      res.report = std::move(rep);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace spinor
