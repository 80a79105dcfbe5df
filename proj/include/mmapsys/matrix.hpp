#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <string>
#include <vector>

#include "mmapsys/errors.hpp"

namespace mmapsys {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

/// Column of ones, as an n x 1 matrix so it composes with kron.
inline Matrix ones_col(Index n) { return Matrix::Ones(n, 1); }

/// Row of ones, 1 x n.
inline Matrix ones_row(Index n) { return Matrix::Ones(1, n); }

inline Matrix as_row(const RowVector& v) { return Matrix(v); }
inline Matrix as_col(const Vector& v) { return Matrix(v); }

/// Kronecker product; (A⊗B)[bi+k][bj+l] = A[i][j]·B[k][l].
inline Matrix kron_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Left fold of kron_product over any number of factors.
template <typename... Rest>
Matrix kron(const Matrix& first, const Rest&... rest) {
  Matrix acc = first;
  ((acc = kron_product(acc, Matrix(rest))), ...);
  return acc;
}

/// Kronecker sum a⊕b = a⊗I + I⊗b.
inline Matrix kron_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw DimensionError("kron_sum: operands must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return kron_product(a, identity(b.rows())) + kron_product(identity(a.rows()), b);
}

/// Appends the nonzeros of `block` at offset (row0, col0).
inline void place_block(std::vector<Triplet>& out, Index row0, Index col0, const Matrix& block) {
  for (Index j = 0; j < block.cols(); ++j) {
    for (Index i = 0; i < block.rows(); ++i) {
      const double v = block(i, j);
      if (v != 0.0) out.emplace_back(row0 + i, col0 + j, v);
    }
  }
}

inline SparseMatrix sparse_from_triplets(Index dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

/// Row sums of a sparse matrix as a dense column.
inline Vector row_sums(const SparseMatrix& m) {
  return m * Vector::Ones(m.cols());
}

inline void require_same_dims(const Matrix& a, Index rows, Index cols, const char* what) {
  if (a.rows() != rows || a.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
}

}  // namespace mmapsys
