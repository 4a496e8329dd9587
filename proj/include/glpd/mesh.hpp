#pragma once

// Discrete geometry of the unit box (0,1)^d with homogeneous Dirichlet data.
//
// Nodes are the interior lattice points x_i = (i+1) h, i = 0..n-1 on each
// axis. Edges of axis a join consecutive nodes along a, including the two
// half-links to the boundary, so axis a carries n_a + 1 edges per line.
// Node and edge arrays are flattened row-major with axis 0 slowest.
//
// gradient() and divergence() are exact negative adjoints under the uniform
// quadrature weight prod(h_i), on nodes and edges alike:
//
//   inner_edges(gradient(u), p) == -inner(u, divergence(p))
//
// up to floating point summation order.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace glpd {

class GridSpec {
 public:
  static constexpr int kMaxDimension = 3;

  /// Throws std::invalid_argument unless 1 <= counts.size() <= 3 and every
  /// count is >= 1.
  explicit GridSpec(const std::vector<int>& interior_counts);

  static GridSpec line(int n) { return GridSpec({n}); }

  int dimension() const { return dim_; }
  int count(int axis) const { return counts_.at(axis); }
  std::vector<int> counts() const;
  double spacing(int axis) const { return spacing_.at(axis); }

  /// Number of interior nodes.
  Eigen::Index size() const { return size_; }
  Eigen::Index edge_count(int axis) const;

  /// Quadrature weight of one node (or one edge): prod h_i.
  double cell_volume() const { return cell_volume_; }

  /// Coordinate of interior node `index` along `axis`.
  double coordinate(int axis, int index) const { return (index + 1) * spacing_.at(axis); }

  /// Per-axis node index of flattened node `flat`.
  std::array<int, kMaxDimension> unflatten(Eigen::Index flat) const;

  bool operator==(const GridSpec& other) const { return dim_ == other.dim_ && counts_ == other.counts_; }
  bool operator!=(const GridSpec& other) const { return !(*this == other); }

 private:
  int dim_;
  std::array<int, kMaxDimension> counts_{1, 1, 1};
  std::array<double, kMaxDimension> spacing_{1.0, 1.0, 1.0};
  Eigen::Index size_;
  double cell_volume_;
};

/// Values on interior nodes. Boundary values are zero and never stored.
class ScalarField {
 public:
  /// Zero field.
  explicit ScalarField(const GridSpec& grid);

  /// Throws std::invalid_argument on a length mismatch or non-finite entry.
  ScalarField(const GridSpec& grid, Eigen::VectorXd values);

  /// Skips the finiteness check; used by arithmetic that may legitimately
  /// overflow during line searches.
  static ScalarField unchecked(const GridSpec& grid, Eigen::VectorXd values);

  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

  bool all_finite() const { return values_.allFinite(); }
  double max_abs() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  struct NoCheck {};
  ScalarField(const GridSpec& grid, Eigen::VectorXd values, NoCheck);

  GridSpec grid_;
  Eigen::VectorXd values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Per-axis edge values. Only the first grid.dimension() components are used.
class VectorField {
 public:
  explicit VectorField(const GridSpec& grid);

  /// Throws std::invalid_argument when the number of components or any
  /// component length disagrees with the grid, or on non-finite entries.
  VectorField(const GridSpec& grid, std::vector<Eigen::VectorXd> components);

  const GridSpec& grid() const { return grid_; }
  const Eigen::VectorXd& component(int axis) const { return components_.at(axis); }
  Eigen::VectorXd& component(int axis) { return components_.at(axis); }
  int dimension() const { return grid_.dimension(); }

  double max_abs() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<Eigen::VectorXd> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
VectorField operator-(VectorField a);

/// Throws std::invalid_argument when the grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& p);

/// divergence(gradient(u)).
ScalarField laplacian(const ScalarField& u);

/// Stencil assembly of the discrete Laplacian with coefficients 1/h_a^2.
/// Exactly symmetric.
Eigen::SparseMatrix<double> laplacian_matrix(const GridSpec& grid);

double inner(const ScalarField& u, const ScalarField& v);
double inner_edges(const VectorField& p, const VectorField& q);

/// inner_edges(gradient(u), gradient(u)).
double dirichlet_energy(const ScalarField& u);

/// sin(pi x_1) ... sin(pi x_d) sampled on the nodes and scaled to max 1.
ScalarField sine_bump(const GridSpec& grid);

}  // namespace glpd
