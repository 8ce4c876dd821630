#include "diffeo/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace diffeo {

namespace {

using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Dense to_eigen(const Matrix& a) {
  Dense m(a.rows, a.cols);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) m(r, c) = a(r, c);
  return m;
}

Matrix from_eigen(const Eigen::MatrixXd& m) {
  Matrix a(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) a(r, c) = m(r, c);
  return a;
}

struct Decomposition {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
  RankInfo info;
};

RankInfo rank_from(const Eigen::VectorXd& sigma, const RankPolicy& policy) {
  RankInfo info;
  info.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  info.threshold = std::max(policy.relative * smax, policy.absolute);
  int r = 0;
  while (r < sigma.size() && sigma(r) > info.threshold) ++r;
  info.rank = r;
  const double floor = std::numeric_limits<double>::epsilon() * std::max(smax, 1.0);
  if (r == 0) {
    // Everything is noise: the gap compares the threshold to the largest value.
    info.gap = smax > 0.0 ? info.threshold / std::max(smax, floor) : std::numeric_limits<double>::infinity();
  } else if (r == sigma.size()) {
    info.gap = std::numeric_limits<double>::infinity();
  } else {
    info.gap = sigma(r - 1) / std::max(sigma(r), floor);
  }
  return info;
}

Decomposition decompose(const Matrix& a, const RankPolicy& policy) {
  Decomposition d;
  if (a.rows == 0 || a.cols == 0) {
    d.u = Eigen::MatrixXd::Identity(a.rows, a.rows);
    d.v = Eigen::MatrixXd::Identity(a.cols, a.cols);
    d.info.gap = std::numeric_limits<double>::infinity();
    return d;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a), Eigen::ComputeFullU | Eigen::ComputeFullV);
  d.u = svd.matrixU();
  d.sigma = svd.singularValues();
  d.v = svd.matrixV();
  d.info = rank_from(d.sigma, policy);
  return d;
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& columns, int rows) {
  Matrix m(rows, static_cast<int>(columns.size()));
  for (int c = 0; c < m.cols; ++c) {
    require(static_cast<int>(columns[static_cast<std::size_t>(c)].size()) == rows, ErrorCode::kShapeMismatch,
            "column length mismatch");
    for (int r = 0; r < rows; ++r) m(r, c) = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows, int cols) {
  Matrix m(static_cast<int>(rows.size()), cols);
  for (int r = 0; r < m.rows; ++r) {
    require(static_cast<int>(rows[static_cast<std::size_t>(r)].size()) == cols, ErrorCode::kShapeMismatch,
            "row length mismatch");
    for (int c = 0; c < cols; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

Vector Matrix::column(int c) const {
  Vector v(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) v[static_cast<std::size_t>(r)] = (*this)(r, c);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data) m = std::max(m, std::abs(x));
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, ErrorCode::kShapeMismatch, "matrix product shape");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  require(static_cast<int>(x.size()) == a.cols, ErrorCode::kShapeMismatch, "matrix-vector shape");
  Vector y(static_cast<std::size_t>(a.rows), 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) y[static_cast<std::size_t>(i)] += a(i, j) * x[static_cast<std::size_t>(j)];
  return y;
}

RankInfo numeric_rank(const Matrix& a, const RankPolicy& policy) {
  if (a.rows == 0 || a.cols == 0) {
    RankInfo info;
    info.gap = std::numeric_limits<double>::infinity();
    return info;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a));
  return rank_from(svd.singularValues(), policy);
}

Matrix null_space(const Matrix& a, const RankPolicy& policy) {
  const Decomposition d = decompose(a, policy);
  const int r = d.info.rank;
  return from_eigen(d.v.rightCols(a.cols - r));
}

Matrix column_space(const Matrix& a, const RankPolicy& policy) {
  const Decomposition d = decompose(a, policy);
  return from_eigen(d.u.leftCols(d.info.rank));
}

Matrix pseudo_inverse(const Matrix& a, const RankPolicy& policy) {
  const Decomposition d = decompose(a, policy);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.cols, a.rows);
  for (int i = 0; i < d.info.rank; ++i) out += d.v.col(i) * (1.0 / d.sigma(i)) * d.u.col(i).transpose();
  return from_eigen(out);
}

LeastSquares solve_least_squares(const Matrix& a, std::span<const double> b, const RankPolicy& policy) {
  require(static_cast<int>(b.size()) == a.rows, ErrorCode::kShapeMismatch, "least-squares right-hand side");
  LeastSquares ls;
  ls.solution = multiply(pseudo_inverse(a, policy), b);
  const Vector fit = multiply(a, ls.solution);
  for (std::size_t i = 0; i < b.size(); ++i) ls.residual = std::max(ls.residual, std::abs(fit[i] - b[i]));
  return ls;
}

}  // namespace diffeo
