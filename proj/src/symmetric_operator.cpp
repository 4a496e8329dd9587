#include "glpd/symmetric_operator.hpp"

#include <stdexcept>
#include <string>

namespace glpd {

SymmetricOperator::SymmetricOperator(Eigen::Index dimension, Apply apply, Assemble assemble)
    : dim_(dimension), apply_(std::move(apply)), assemble_(std::move(assemble)) {
  if (dim_ < 1) throw std::invalid_argument("symmetric operator: dimension must be >= 1");
}

SymmetricOperator SymmetricOperator::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetric operator: matrix must be square");
  Eigen::MatrixXd sym = m.triangularView<Eigen::Upper>();
  sym.triangularView<Eigen::StrictlyLower>() = sym.transpose().eval();
  return SymmetricOperator(
      sym.rows(), [sym](const Eigen::VectorXd& w) -> Eigen::VectorXd { return sym * w; },
      [sym] { return Eigen::SparseMatrix<double>(sym.sparseView()); });
}

Eigen::MatrixXd SymmetricOperator::dense() const {
  if (dim_ > kMaxDenseDimension) {
    throw std::length_error("dense assembly refused: dimension " + std::to_string(dim_) + " exceeds " +
                            std::to_string(kMaxDenseDimension));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd(assemble_());
  m.triangularView<Eigen::StrictlyLower>() = m.transpose().eval();
  return m;
}

}  // namespace glpd
