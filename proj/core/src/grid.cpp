#include "spinor/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinor {

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dim must be 1, 2 or 3");
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
  if (n % 2 == 0) throw std::invalid_argument("grid n must be odd so x = 0 is a node");
}

Grid::Grid(GridSpec spec) : spec_(spec) {
  spec_.validate();
  h_ = 2.0 * spec_.extent / static_cast<double>(spec_.n - 1);
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < spec_.dim; ++a) {
    size_ *= static_cast<std::size_t>(spec_.n);
    cell_volume_ *= h_;
  }
  // row-major, axis 0 slowest
  for (int a = spec_.dim - 1, s = 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = static_cast<std::size_t>(s);
    s *= spec_.n;
  }
}

GridPtr Grid::make(GridSpec spec) { return std::make_shared<const Grid>(spec); }

bool Grid::on_boundary(std::size_t flat) const {
  for (int a = 0; a < spec_.dim; ++a) {
    const int i = axis_index(flat, a);
    if (i == 0 || i == spec_.n - 1) return true;
  }
  return false;
}

double Grid::trapezoid_weight(std::size_t flat) const {
  double w = 1.0;
  for (int a = 0; a < spec_.dim; ++a) {
    const int i = axis_index(flat, a);
    if (i == 0 || i == spec_.n - 1) w *= 0.5;
  }
  return w;
}

double Grid::radius(std::size_t flat) const {
  double r2 = 0.0;
  for (int a = 0; a < spec_.dim; ++a) {
    const double x = coord(axis_index(flat, a));
    r2 += x * x;
  }
  return std::sqrt(r2);
}

EdgeField::EdgeField(GridPtr g) : grid(std::move(g)) {
  for (int a = 0; a < grid->dim(); ++a)
    axis[static_cast<std::size_t>(a)].assign(grid->size(), 0.0);
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.grid || !b.grid) throw std::invalid_argument("field has no grid");
  if (a.grid == b.grid) return;
  if (a.grid->spec() == b.grid->spec()) return;
  throw std::invalid_argument("field shape mismatch");
}

void require_finite(const ScalarField& f, const char* what) {
  for (double x : f.v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

ScalarField zeros_like(const ScalarField& f) { return ScalarField(f.grid); }

double integrate(const ScalarField& f) {
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g.trapezoid_weight(i) * f.v[i];
  return acc * g.cell_volume();
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i)
    acc += gr.trapezoid_weight(i) * f.v[i] * g.v[i];
  return acc * gr.cell_volume();
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = *f.grid;
  ScalarField out(f.grid);
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const int n = g.nodes_per_axis();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.on_boundary(i)) continue;  // Dirichlet layer pinned to zero
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t s = g.stride(a);
      const int ia = g.axis_index(i, a);
      const double left = (ia > 0) ? f.v[i - s] : 0.0;
      const double right = (ia < n - 1) ? f.v[i + s] : 0.0;
      acc += (left + right - 2.0 * f.v[i]) * inv_h2;
    }
    out.v[i] = acc;
  }
  return out;
}

double kinetic_energy(const ScalarField& f) { return kinetic_inner(f, f); }

double kinetic_inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g);
  const Grid& gr = *f.grid;
  const double inv_h2 = 1.0 / (gr.spacing() * gr.spacing());
  double acc = 0.0;
  for (int a = 0; a < gr.dim(); ++a) {
    for_each_edge(gr, a, [&](std::size_t p, std::size_t q) {
      acc += (f.v[q] - f.v[p]) * (g.v[q] - g.v[p]);
    });
  }
  return acc * inv_h2 * gr.cell_volume();
}

ScalarField trap_potential(const GridPtr& grid, TrapKind kind,
                           std::span<const double> gammas) {
  if (kind != TrapKind::harmonic) throw std::invalid_argument("unknown trap kind");
  if (static_cast<int>(gammas.size()) != grid->dim())
    throw std::invalid_argument("need one trap strength per axis");
  for (double gm : gammas)
    if (!(gm > 0.0)) throw std::invalid_argument("trap strength must be positive");
  ScalarField V(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double acc = 0.0;
    for (int a = 0; a < grid->dim(); ++a) {
      const double x = grid->coord(grid->axis_index(i, a));
      acc += gammas[static_cast<std::size_t>(a)] * gammas[static_cast<std::size_t>(a)] * x * x;
    }
    V.v[i] = acc;
  }
  return V;
}

}  // namespace spinor
