#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace glpd {

/// Dense assembly is refused above this many unknowns.
inline constexpr Eigen::Index kMaxDenseDimension = 2048;

/// A self-adjoint linear map on R^N, available matrix-free and, for small N,
/// as an exactly symmetric dense matrix.
class SymmetricOperator {
 public:
  using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Assemble = std::function<Eigen::SparseMatrix<double>()>;

  SymmetricOperator(Eigen::Index dimension, Apply apply, Assemble assemble);

  /// Wraps an explicit matrix. The matrix is symmetrised from its upper
  /// triangle.
  static SymmetricOperator from_dense(const Eigen::MatrixXd& m);

  Eigen::Index dimension() const { return dim_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const { return apply_(w); }

  /// Sparse assembly; not size-capped.
  Eigen::SparseMatrix<double> sparse() const { return assemble_(); }

  /// Throws std::length_error when dimension() > kMaxDenseDimension. The
  /// lower triangle is mirrored from the upper one, so the result equals its
  /// transpose bit for bit.
  Eigen::MatrixXd dense() const;

 private:
  Eigen::Index dim_;
  Apply apply_;
  Assemble assemble_;
};

}  // namespace glpd
