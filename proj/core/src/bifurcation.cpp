#include "spinor/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinor {

namespace {

struct Classifier {
  const ModelParams& p;
  const Constraints& c;
  const BifurcationOptions& o;
  SpinorState two_component;       // z, reused as the 2C candidate everywhere
  std::optional<SpinorState> hot;  // most recent 3C state, for warm starts

  SolveReport classify(double q, bool near_threshold) {
    ModelParams pq = p;
    pq.q = q;
    SolveOptions base = o.solve;
    base.two_component_candidate = two_component;
    base.use_two_component_candidate = true;
    if (near_threshold) base.tol = o.solve.tol / 4.0;

    std::vector<SolveOptions> attempts;
    {
      SolveOptions a = base;
      if (hot) {
        a.init = InitKind::warm;
        a.warm_state = hot;
      }
      attempts.push_back(std::move(a));
    }
    if (near_threshold) {
      SolveOptions b = base;
      b.init = InitKind::gaussian;
      attempts.push_back(std::move(b));
      SolveOptions r = base;
      r.init = InitKind::random;
      r.seed = o.solve.seed + 17;
      attempts.push_back(std::move(r));
    }

    std::optional<SolveReport> best;
    for (auto& a : attempts) {
      SolveReport rep = solve_ground_state(pq, c, a);
      if (!best || rep.energy.total < best->energy.total) best = std::move(rep);
    }
    if (best->classification == Classification::three_component) hot = best->state;
    return std::move(*best);
  }
};

}  // namespace

BifurcationPoint find_qc(double M, const ModelParams& p, const BifurcationOptions& o) {
  if (!(M > 0.0) || !(M < 1.0))
    throw std::invalid_argument("threshold search needs 0 < M < 1");
  Constraints c{1.0, M};

  ModelParams p0 = p;
  p0.q = 0.0;
  SolveReport z = solve_two_component(p0, c, o.solve);
  const double U = threshold_upper_bound(z.state, p, c);

  BifurcationPoint pt;
  pt.M = M;
  pt.U = U;
  pt.qbar_contribution = 2.0 * p.beta_s * (1.0 + M) * max_abs(z.state.u1) * max_abs(z.state.u1);

  Classifier cls{p, c, o, z.state, std::nullopt};

  double q_lo = o.q_lo_seed;
  double q_hi = std::max(U, q_lo * 2.0) * 1.25 + 0.5;

  SolveReport lo_rep = cls.classify(q_lo, false);
  if (lo_rep.classification != Classification::two_component)
    throw std::runtime_error("bracket seed failure: expected 2C at the lower seed");
  SolveReport hi_rep = cls.classify(q_hi, false);
  if (hi_rep.classification != Classification::three_component)
    throw std::runtime_error("bracket seed failure: expected 3C at the upper seed");

  pt.state_lo = lo_rep.state;
  pt.state_hi = hi_rep.state;

  while (q_hi - q_lo > o.bracket_tol) {
    const bool near = (q_hi - q_lo) < 8.0 * o.bracket_tol;
    const double mid = 0.5 * (q_lo + q_hi);
    SolveReport rep = cls.classify(mid, near);
    if (rep.classification == Classification::three_component) {
      q_hi = mid;
      pt.state_hi = rep.state;
    } else {
      q_lo = mid;
      pt.state_lo = rep.state;
    }
  }
  pt.q_lo = q_lo;
  pt.q_hi = q_hi;
  return pt;
}

PhaseCurve phase_curve(std::span<const double> Ms, const ModelParams& p,
                       const BifurcationOptions& o) {
  std::vector<double> sorted(Ms.begin(), Ms.end());
  std::sort(sorted.begin(), sorted.end());

  PhaseCurve out;
  for (double M : sorted) {
    PhaseCurvePoint pt;
    pt.M = M;
    try {
      pt.point = find_qc(M, p, o);
      out.qbar_est = std::max(out.qbar_est, pt.point->q_hi);
      out.max_U = std::max(out.max_U, pt.point->U);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::vector<Classification> classification_sweep(double M, std::span<const double> qs,
                                                 const ModelParams& p,
                                                 const SolveOptions& o) {
  Constraints c{1.0, M};
  ModelParams p0 = p;
  p0.q = 0.0;
  SolveReport z = solve_two_component(p0, c, o);

  std::vector<Classification> labels;
  std::optional<SpinorState> warm;
  for (double q : qs) {
    ModelParams pq = p;
    pq.q = q;
    SolveOptions opts = o;
    opts.two_component_candidate = z.state;
    if (warm) {
      opts.init = InitKind::warm;
      opts.warm_state = warm;
    }
    SolveReport rep = solve_ground_state(pq, c, opts);
    labels.push_back(rep.classification);
    if (rep.classification == Classification::three_component) warm = rep.state;
  }
  return labels;
}

}  // namespace spinor
