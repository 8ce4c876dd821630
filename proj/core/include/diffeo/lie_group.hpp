#pragma once

// Built-in finite-dimensional matrix groups and their coadjoint action.
//
// Conventions: the dual of the Lie algebra is identified with R^dim through
// the fixed basis {xi_i}, so F_i = F(xi_i). The coadjoint action is
// K(g)F = Ad(g^{-1})^T F, i.e. (K(g)F)_i = sum_j F_j coord_j(g^{-1} xi_i g),
// and its differential at the identity is dK(xi)F = -ad(xi)^T F.

#include <string>
#include <string_view>
#include <vector>

#include "diffeo/linalg.hpp"
#include "diffeo/smooth_map.hpp"

namespace diffeo {

class MatrixGroup {
 public:
  // "SO3", "SE2" or "SL2R"; anything else raises UnsupportedGroup.
  static MatrixGroup builtin(std::string_view id);
  static std::vector<std::string> catalog();

  const std::string& id() const { return id_; }
  int matrix_size() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const Matrix& generator(int i) const { return basis_[static_cast<std::size_t>(i)]; }

  // Coordinates of an algebra element in the basis (least squares on entries).
  Vector coordinates(const Matrix& element) const;
  // Column j holds the coordinates of [xi_i, xi_j].
  Matrix ad(int i) const;
  // The linear map F |-> dK(xi_i) F = -ad(xi_i)^T F.
  Matrix coadjoint_generator(int i) const;
  // [dK(xi_1)F, ..., dK(xi_dim)F] as columns.
  Matrix coadjoint_differential(std::span<const double> f) const;

  // Row i of the returned matrix maps vec(M) (row-major) to coord_i(M).
  const Matrix& coordinate_functional() const { return coord_; }

 private:
  MatrixGroup(std::string id, int n, std::vector<Matrix> basis);

  std::string id_;
  int n_;
  std::vector<Matrix> basis_;
  Matrix coord_;
};

Matrix matrix_exp(const Matrix& a);

// Jet-valued square matrices, row-major, all entries scalar jets of one shape.
using JetMatrix = std::vector<Jet>;

JetMatrix jet_matrix_multiply(const JetMatrix& a, const JetMatrix& b, int n);
// Scaling and squaring with a Taylor series of degree >= max(18, jet order).
JetMatrix jet_matrix_exp(const JetMatrix& a, int n);

// r |-> K(exp(sum_i r_i xi_i)) F, a map R^dim -> R^dim.
SmoothMapPtr coadjoint_plaque_map(const MatrixGroup& group, Vector f);

}  // namespace diffeo
