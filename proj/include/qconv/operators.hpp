// Dense operator wrapper plus the handful of matrix helpers used everywhere.
#pragma once

#include <Eigen/Dense>

#include "qconv/shape.hpp"

namespace qconv {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct DenseOperator {
  Matrix m;
  SystemShape shape;

  DenseOperator() = default;
  DenseOperator(Matrix mat, SystemShape s) : m(std::move(mat)), shape(s) {
    if (m.rows() != shape.dim || m.cols() != shape.dim) {
      throw validation_error("DenseOperator: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " but shape.dim = " +
                             std::to_string(shape.dim));
    }
  }
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Partial trace over the trailing factor of a (dim_a*dim_b) square matrix.
inline Matrix trace_out_tail(const Matrix& m, long long dim_a, long long dim_b) {
  Matrix out = Matrix::Zero(dim_a, dim_a);
  for (long long i = 0; i < dim_a; ++i)
    for (long long j = 0; j < dim_a; ++j)
      for (long long k = 0; k < dim_b; ++k)
        out(i, j) += m(i * dim_b + k, j * dim_b + k);
  return out;
}

// Partial trace over the leading factor.
inline Matrix trace_out_head(const Matrix& m, long long dim_a, long long dim_b) {
  Matrix out = Matrix::Zero(dim_b, dim_b);
  for (long long i = 0; i < dim_b; ++i)
    for (long long j = 0; j < dim_b; ++j)
      for (long long k = 0; k < dim_a; ++k)
        out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qconv
