#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spinor {

/// Rectangular box [-L, L]^dim with n nodes per axis, zero-Dirichlet boundary.
/// n must be odd so that x = 0 is a node; spacing h = 2L/(n-1).
struct GridSpec {
  int dim = 1;
  double extent = 8.0;  // half-width L
  int n = 257;          // nodes per axis

  void validate() const;  // throws std::invalid_argument
  bool operator==(const GridSpec&) const = default;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  static GridPtr make(GridSpec spec);

  int dim() const { return spec_.dim; }
  int nodes_per_axis() const { return spec_.n; }
  double extent() const { return spec_.extent; }
  double spacing() const { return h_; }
  double cell_volume() const { return cell_volume_; }  // h^dim
  std::size_t size() const { return size_; }           // n^dim
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  const GridSpec& spec() const { return spec_; }

  double coord(int index) const { return -spec_.extent + h_ * index; }
  int axis_index(std::size_t flat, int axis) const {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(axis)]) %
                            static_cast<std::size_t>(spec_.n));
  }
  bool on_boundary(std::size_t flat) const;
  /// Composite trapezoid weight: product over axes of 1/2 at axis ends, else 1.
  double trapezoid_weight(std::size_t flat) const;
  double radius(std::size_t flat) const;  // |x| of node

  explicit Grid(GridSpec spec);

 private:
  GridSpec spec_;
  double h_ = 0.0;
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
  std::array<std::size_t, 3> strides_{1, 1, 1};
};

/// Dense real values on the nodes of a Grid. Admissible physics states keep
/// the boundary layer at exactly zero (Dirichlet); plain fields need not.
struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g) : grid(std::move(g)), v(grid->size(), 0.0) {}

  double operator[](std::size_t i) const { return v[i]; }
  double& operator[](std::size_t i) { return v[i]; }
  std::size_t size() const { return v.size(); }
};

/// Values on cell edges, one array per axis. The entry for the edge between
/// node `i` and its +axis neighbour is stored at the flat index of `i`;
/// slots whose axis index equals n-1 are unused and stay zero.
struct EdgeField {
  GridPtr grid;
  std::array<std::vector<double>, 3> axis;

  explicit EdgeField(GridPtr g);
};

void require_same_grid(const ScalarField& a, const ScalarField& b);
void require_finite(const ScalarField& f, const char* what);

ScalarField zeros_like(const ScalarField& f);

/// Composite trapezoid rule, prod(h) weighting; exact for constants.
double integrate(const ScalarField& f);
/// Trapezoid quadrature of f*g.
double inner(const ScalarField& f, const ScalarField& g);
double max_abs(const ScalarField& f);

/// Second-order central stencil per axis with zero-Dirichlet closure.
/// Output is zero on the boundary layer.
ScalarField laplacian(const ScalarField& f);

/// Edge-based squared-gradient energy:  sum over axes and edges of
/// h^dim * ((f_b - f_a)/h)^2.  For fields vanishing on the boundary this
/// matches -integrate(f * laplacian(f)) exactly.
double kinetic_energy(const ScalarField& f);
double kinetic_inner(const ScalarField& f, const ScalarField& g);

enum class TrapKind { harmonic };

/// V(x) = sum_i gamma_i^2 x_i^2; gammas.size() must equal grid dim.
ScalarField trap_potential(const GridPtr& grid, TrapKind kind,
                           std::span<const double> gammas);

/// Visit every +axis edge of the grid: fn(flat_a, flat_b).
template <class F>
void for_each_edge(const Grid& g, int ax, F&& fn) {
  const std::size_t s = g.stride(ax);
  const int n = g.nodes_per_axis();
  const std::size_t total = g.size();
  for (std::size_t i = 0; i < total; ++i) {
    if (g.axis_index(i, ax) == n - 1) continue;
    fn(i, i + s);
  }
}

}  // namespace spinor
