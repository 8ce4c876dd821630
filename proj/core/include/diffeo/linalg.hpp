#pragma once

// Dense linear algebra used by rank, span and least-squares decisions.
// Matrices are row-major with an explicit row count.

#include <cstddef>
#include <vector>

#include "diffeo/jet.hpp"

namespace diffeo {

struct Matrix {
  int rows = 0;
  int cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }

  static Matrix identity(int n);
  // Columns given as vectors of equal length.
  static Matrix from_columns(const std::vector<Vector>& columns, int rows);
  static Matrix from_rows(const std::vector<Vector>& rows, int cols);

  Vector column(int c) const;
  Matrix transpose() const;
  double max_abs() const;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, std::span<const double> x);

struct RankInfo {
  int rank = 0;
  Vector singular_values;  // descending
  double threshold = 0.0;
  // sigma_rank / max(sigma_{rank+1}, eps * sigma_max); +inf when the matrix is
  // empty, zero, or of full rank with no trailing singular value.
  double gap = 0.0;
};

struct RankPolicy {
  double relative = 1e-9;
  // Singular values below this are zero regardless of scale; keeps rank 0
  // decisions stable when every entry is rounding noise.
  double absolute = 1e-10;
};

RankInfo numeric_rank(const Matrix& a, const RankPolicy& policy = {});

// Orthonormal basis of ker(a), one column per null direction.
Matrix null_space(const Matrix& a, const RankPolicy& policy = {});
// Orthonormal basis of the column space.
Matrix column_space(const Matrix& a, const RankPolicy& policy = {});

Matrix pseudo_inverse(const Matrix& a, const RankPolicy& policy = {});

struct LeastSquares {
  Vector solution;
  double residual = 0.0;  // max abs entry of a x - b
};

LeastSquares solve_least_squares(const Matrix& a, std::span<const double> b, const RankPolicy& policy = {});

}  // namespace diffeo
