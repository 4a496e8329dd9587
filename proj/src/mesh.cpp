#include "glpd/mesh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace glpd {

namespace {

using Extents = std::array<int, GridSpec::kMaxDimension>;

Extents node_extents(const GridSpec& g) {
  Extents e{1, 1, 1};
  for (int a = 0; a < g.dimension(); ++a) e[a] = g.count(a);
  return e;
}

Extents edge_extents(const GridSpec& g, int axis) {
  Extents e = node_extents(g);
  e[axis] += 1;
  return e;
}

Eigen::Index flatten(const Extents& ext, int i0, int i1, int i2) {
  return (static_cast<Eigen::Index>(i0) * ext[1] + i1) * ext[2] + i2;
}

}  // namespace

GridSpec::GridSpec(const std::vector<int>& interior_counts) {
  if (interior_counts.empty() || interior_counts.size() > kMaxDimension) {
    throw std::invalid_argument("grid: dimension must be 1, 2 or 3, got " +
                                std::to_string(interior_counts.size()));
  }
  dim_ = static_cast<int>(interior_counts.size());
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const int n = interior_counts[a];
    if (n < 1) {
      throw std::invalid_argument("grid: interior_counts[" + std::to_string(a) + "] must be >= 1, got " +
                                  std::to_string(n));
    }
    counts_[a] = n;
    spacing_[a] = 1.0 / (n + 1);
    size_ *= n;
    cell_volume_ *= spacing_[a];
  }
}

std::vector<int> GridSpec::counts() const { return {counts_.begin(), counts_.begin() + dim_}; }

Eigen::Index GridSpec::edge_count(int axis) const {
  if (axis < 0 || axis >= dim_) throw std::out_of_range("grid: axis out of range");
  return size_ / counts_[axis] * (counts_[axis] + 1);
}

std::array<int, GridSpec::kMaxDimension> GridSpec::unflatten(Eigen::Index flat) const {
  std::array<int, kMaxDimension> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % counts_[a]);
    flat /= counts_[a];
  }
  return idx;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(Eigen::VectorXd::Zero(grid.size())) {}

ScalarField::ScalarField(const GridSpec& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("scalar field: expected " + std::to_string(grid_.size()) + " values, got " +
                                std::to_string(values_.size()));
  }
  if (!values_.allFinite()) throw std::invalid_argument("scalar field: non-finite value");
}

ScalarField::ScalarField(const GridSpec& grid, Eigen::VectorXd values, NoCheck)
    : grid_(grid), values_(std::move(values)) {}

ScalarField ScalarField::unchecked(const GridSpec& grid, Eigen::VectorXd values) {
  if (values.size() != grid.size()) throw std::invalid_argument("scalar field: length mismatch");
  return ScalarField(grid, std::move(values), NoCheck{});
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "scalar field +");
  values_ += other.values_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "scalar field -");
  values_ -= other.values_;
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  values_ *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  return ScalarField::unchecked(a.grid(), a.values().cwiseProduct(b.values()));
}

// ---------------------------------------------------------------------------

VectorField::VectorField(const GridSpec& grid) : grid_(grid) {
  for (int a = 0; a < grid.dimension(); ++a) components_.push_back(Eigen::VectorXd::Zero(grid.edge_count(a)));
}

VectorField::VectorField(const GridSpec& grid, std::vector<Eigen::VectorXd> components)
    : grid_(grid), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid_.dimension()) {
    throw std::invalid_argument("vector field: expected one component per axis");
  }
  for (int a = 0; a < grid_.dimension(); ++a) {
    if (components_[a].size() != grid_.edge_count(a)) {
      throw std::invalid_argument("vector field: axis " + std::to_string(a) + " expects " +
                                  std::to_string(grid_.edge_count(a)) + " edges");
    }
    if (!components_[a].allFinite()) throw std::invalid_argument("vector field: non-finite value");
  }
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  require_same_grid(grid_, other.grid_, "vector field +");
  for (std::size_t a = 0; a < components_.size(); ++a) components_[a] += other.components_[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  require_same_grid(grid_, other.grid_, "vector field -");
  for (std::size_t a = 0; a < components_.size(); ++a) components_[a] -= other.components_[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }
VectorField operator-(VectorField a) { return a *= -1.0; }

// ---------------------------------------------------------------------------

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

VectorField gradient(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const Extents nodes = node_extents(g);
  const Eigen::VectorXd& v = u.values();
  VectorField out(g);
  for (int a = 0; a < g.dimension(); ++a) {
    const Extents edges = edge_extents(g, a);
    const double h = g.spacing(a);
    Eigen::VectorXd& p = out.component(a);
    Eigen::Index e = 0;
    for (int i0 = 0; i0 < edges[0]; ++i0) {
      for (int i1 = 0; i1 < edges[1]; ++i1) {
        for (int i2 = 0; i2 < edges[2]; ++i2) {
          std::array<int, 3> idx{i0, i1, i2};
          const int k = idx[a];
          const double right = k < nodes[a] ? v[flatten(nodes, idx[0], idx[1], idx[2])] : 0.0;
          idx[a] = k - 1;
          const double left = k >= 1 ? v[flatten(nodes, idx[0], idx[1], idx[2])] : 0.0;
          p[e++] = (right - left) / h;
        }
      }
    }
  }
  return out;
}

ScalarField divergence(const VectorField& p) {
  const GridSpec& g = p.grid();
  const Extents nodes = node_extents(g);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (int a = 0; a < g.dimension(); ++a) {
    const Extents edges = edge_extents(g, a);
    const double h = g.spacing(a);
    const Eigen::VectorXd& c = p.component(a);
    Eigen::Index n = 0;
    for (int i0 = 0; i0 < nodes[0]; ++i0) {
      for (int i1 = 0; i1 < nodes[1]; ++i1) {
        for (int i2 = 0; i2 < nodes[2]; ++i2) {
          std::array<int, 3> idx{i0, i1, i2};
          const double left = c[flatten(edges, idx[0], idx[1], idx[2])];
          idx[a] += 1;
          const double right = c[flatten(edges, idx[0], idx[1], idx[2])];
          out[n++] += (right - left) / h;
        }
      }
    }
  }
  return ScalarField::unchecked(g, std::move(out));
}

ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

Eigen::SparseMatrix<double> laplacian_matrix(const GridSpec& grid) {
  const Extents nodes = node_extents(grid);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(grid.size()) * (1 + 2 * grid.dimension()));
  for (Eigen::Index row = 0; row < grid.size(); ++row) {
    const auto idx = grid.unflatten(row);
    double diag = 0.0;
    for (int a = 0; a < grid.dimension(); ++a) {
      const double c = 1.0 / (grid.spacing(a) * grid.spacing(a));
      diag -= 2.0 * c;
      for (int step : {-1, 1}) {
        auto nb = idx;
        nb[a] += step;
        if (nb[a] < 0 || nb[a] >= nodes[a]) continue;
        triplets.emplace_back(row, flatten(nodes, nb[0], nb[1], nb[2]), c);
      }
    }
    triplets.emplace_back(row, row, diag);
  }
  Eigen::SparseMatrix<double> L(grid.size(), grid.size());
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

double inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u.grid(), v.grid(), "inner");
  return u.values().dot(v.values()) * u.grid().cell_volume();
}

double inner_edges(const VectorField& p, const VectorField& q) {
  require_same_grid(p.grid(), q.grid(), "inner_edges");
  double s = 0.0;
  for (int a = 0; a < p.dimension(); ++a) s += p.component(a).dot(q.component(a));
  return s * p.grid().cell_volume();
}

double dirichlet_energy(const ScalarField& u) {
  const VectorField g = gradient(u);
  return inner_edges(g, g);
}

ScalarField sine_bump(const GridSpec& grid) {
  Eigen::VectorXd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unflatten(i);
    double s = 1.0;
    for (int a = 0; a < grid.dimension(); ++a) s *= std::sin(std::numbers::pi * grid.coordinate(a, idx[a]));
    v[i] = s;
  }
  const double m = v.cwiseAbs().maxCoeff();
  if (m > 0.0) v /= m;
  return ScalarField(grid, std::move(v));
}

}  // namespace glpd
