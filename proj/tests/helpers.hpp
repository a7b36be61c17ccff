#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "spinor/analysis.hpp"
#include "spinor/bifurcation.hpp"
#include "spinor/energy.hpp"
#include "spinor/grid.hpp"
#include "spinor/io.hpp"
#include "spinor/redistribute.hpp"
#include "spinor/solver.hpp"
#include "spinor/state.hpp"

namespace testutil {

using namespace spinor;

// Desk fixture: 1D box [-8, 8], 257 nodes, V = x^2, beta_n = 1, beta_s = 0.5.
inline GridPtr fixture_grid(int n = 257, double L = 8.0, int dim = 1) {
  return Grid::make(GridSpec{dim, L, n});
}

inline ModelParams fixture_params(const GridPtr& g, double q = 0.0,
                                  double beta_n = 1.0, double beta_s = 0.5) {
  std::vector<double> gammas(static_cast<std::size_t>(g->dim()), 1.0);
  return make_params(g, beta_n, beta_s, q, gammas);
}

// Smooth nonnegative bump mixture vanishing on the boundary layer.
inline ScalarField random_positive_field(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.1, 1.0);
  std::uniform_real_distribution<double> center(-g->extent() / 3.0, g->extent() / 3.0);
  std::uniform_real_distribution<double> width(g->extent() / 12.0, g->extent() / 5.0);
  ScalarField f(g);
  for (int b = 0; b < 4; ++b) {
    const double A = amp(rng), c0 = center(rng), w = width(rng);
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (g->on_boundary(i)) continue;
      double d2 = 0.0;
      for (int a = 0; a < g->dim(); ++a) {
        const double dx = g->coord(g->axis_index(i, a)) - (a == 0 ? c0 : 0.0);
        d2 += dx * dx;
      }
      f.v[i] += A * std::exp(-d2 / (2.0 * w * w));
    }
  }
  return f;
}

// Smooth signed field vanishing on the boundary layer (a valid flow
// direction in the Dirichlet space).
inline ScalarField random_direction(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  ScalarField f = random_positive_field(g, rng);
  ScalarField h = random_positive_field(g, rng);
  const double s = sign(rng);
  for (std::size_t i = 0; i < g->size(); ++i) f.v[i] = s * f.v[i] - 0.5 * h.v[i];
  return f;
}

inline SpinorState random_positive_state(const GridPtr& g, std::mt19937_64& rng) {
  return SpinorState{random_positive_field(g, rng), random_positive_field(g, rng),
                     random_positive_field(g, rng)};
}

inline double linf_state_distance(const SpinorState& a, const SpinorState& b) {
  double d = 0.0;
  for (int j : {1, 0, -1}) {
    const auto& fa = a.component(j);
    const auto& fb = b.component(j);
    for (std::size_t i = 0; i < fa.size(); ++i)
      d = std::max(d, std::abs(fa.v[i] - fb.v[i]));
  }
  return d;
}

inline double l2_state_distance(const SpinorState& a, const SpinorState& b) {
  double acc = 0.0;
  for (int j : {1, 0, -1}) {
    ScalarField diff = a.component(j);
    for (std::size_t i = 0; i < diff.size(); ++i) diff.v[i] -= b.component(j).v[i];
    acc += inner(diff, diff);
  }
  return std::sqrt(acc);
}

}  // namespace testutil
