#include "diffeo/lie_group.hpp"

#include <algorithm>
#include <cmath>

namespace diffeo {

namespace {

Matrix unit_matrix(int n, std::initializer_list<std::tuple<int, int, double>> entries) {
  Matrix m(n, n);
  for (const auto& [r, c, v] : entries) m(r, c) = v;
  return m;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  Matrix ab = multiply(a, b);
  const Matrix ba = multiply(b, a);
  for (std::size_t i = 0; i < ab.data.size(); ++i) ab.data[i] -= ba.data[i];
  return ab;
}

Jet zero_like(const Jet& j) {
  return Jet(j.num_vars(), j.order(), 1, Vector(j.origin().begin(), j.origin().end()));
}

Jet one_like(const Jet& j) {
  return Jet::constant(1.0, j.num_vars(), j.order(), Vector(j.origin().begin(), j.origin().end()));
}

class CoadjointPlaqueMap final : public SmoothMap {
 public:
  CoadjointPlaqueMap(MatrixGroup group, Vector f) : group_(std::move(group)), f_(std::move(f)) {
    require(static_cast<int>(f_.size()) == group_.dim(), ErrorCode::kShapeMismatch,
            "dual vector length must equal the group dimension");
  }

  int in_dim() const override { return group_.dim(); }
  int out_dim() const override { return group_.dim(); }

  Jet evaluate(const Jet& r) const override {
    require(r.target_dim() == group_.dim(), ErrorCode::kShapeMismatch, "coadjoint plaque input");
    const int n = group_.matrix_size();
    const int dim = group_.dim();
    const Jet zero = zero_like(r.component(0));

    // A = -sum r_i xi_i, so exp(A) = g^{-1} and exp(-A) = g.
    JetMatrix a(static_cast<std::size_t>(n * n), zero);
    for (int i = 0; i < dim; ++i) {
      const Jet ri = r.component(i);
      const Matrix& xi = group_.generator(i);
      for (int e = 0; e < n * n; ++e) {
        const double v = xi.data[static_cast<std::size_t>(e)];
        if (v != 0.0) a[static_cast<std::size_t>(e)] = jet_axpy(a[static_cast<std::size_t>(e)], -v, ri);
      }
    }
    JetMatrix minus_a = a;
    for (auto& x : minus_a) x = jet_scale(x, -1.0);
    const JetMatrix g_inv = jet_matrix_exp(a, n);
    const JetMatrix g = jet_matrix_exp(minus_a, n);

    std::vector<Jet> out;
    out.reserve(static_cast<std::size_t>(dim));
    const Matrix& coord = group_.coordinate_functional();
    for (int i = 0; i < dim; ++i) {
      JetMatrix xi(static_cast<std::size_t>(n * n), zero);
      for (int e = 0; e < n * n; ++e) {
        xi[static_cast<std::size_t>(e)] = jet_axpy(zero, group_.generator(i).data[static_cast<std::size_t>(e)], one_like(zero));
      }
      const JetMatrix conj = jet_matrix_multiply(jet_matrix_multiply(g_inv, xi, n), g, n);
      Jet value = zero;
      for (int j = 0; j < dim; ++j) {
        if (f_[static_cast<std::size_t>(j)] == 0.0) continue;
        for (int e = 0; e < n * n; ++e) {
          const double w = coord(j, e) * f_[static_cast<std::size_t>(j)];
          if (w != 0.0) value = jet_axpy(value, w, conj[static_cast<std::size_t>(e)]);
        }
      }
      out.push_back(std::move(value));
    }
    return Jet::stack(out);
  }

 private:
  MatrixGroup group_;
  Vector f_;
};

}  // namespace

MatrixGroup::MatrixGroup(std::string id, int n, std::vector<Matrix> basis)
    : id_(std::move(id)), n_(n), basis_(std::move(basis)) {
  // coord = pinv(B) where column i of B is vec(xi_i).
  std::vector<Vector> cols;
  for (const auto& b : basis_) cols.push_back(b.data);
  coord_ = pseudo_inverse(Matrix::from_columns(cols, n_ * n_));
}

MatrixGroup MatrixGroup::builtin(std::string_view id) {
  if (id == "SO3") {
    return MatrixGroup("SO3", 3,
                       {unit_matrix(3, {{1, 2, -1.0}, {2, 1, 1.0}}),
                        unit_matrix(3, {{0, 2, 1.0}, {2, 0, -1.0}}),
                        unit_matrix(3, {{0, 1, -1.0}, {1, 0, 1.0}})});
  }
  if (id == "SE2") {
    return MatrixGroup("SE2", 3,
                       {unit_matrix(3, {{0, 1, -1.0}, {1, 0, 1.0}}),
                        unit_matrix(3, {{0, 2, 1.0}}),
                        unit_matrix(3, {{1, 2, 1.0}})});
  }
  if (id == "SL2R") {
    return MatrixGroup("SL2R", 2,
                       {unit_matrix(2, {{0, 0, 1.0}, {1, 1, -1.0}}),
                        unit_matrix(2, {{0, 1, 1.0}}),
                        unit_matrix(2, {{1, 0, 1.0}})});
  }
  fail(ErrorCode::kUnsupportedGroup, "no built-in matrix group named '" + std::string(id) + "'");
}

std::vector<std::string> MatrixGroup::catalog() { return {"SO3", "SE2", "SL2R"}; }

Vector MatrixGroup::coordinates(const Matrix& element) const {
  require(element.rows == n_ && element.cols == n_, ErrorCode::kShapeMismatch, "algebra element size");
  return multiply(coord_, element.data);
}

Matrix MatrixGroup::ad(int i) const {
  Matrix m(dim(), dim());
  for (int j = 0; j < dim(); ++j) {
    const Vector c = coordinates(commutator(generator(i), generator(j)));
    for (int k = 0; k < dim(); ++k) m(k, j) = c[static_cast<std::size_t>(k)];
  }
  return m;
}

Matrix MatrixGroup::coadjoint_generator(int i) const {
  Matrix m = ad(i).transpose();
  for (double& x : m.data) x = -x;
  return m;
}

Matrix MatrixGroup::coadjoint_differential(std::span<const double> f) const {
  require(static_cast<int>(f.size()) == dim(), ErrorCode::kShapeMismatch, "dual vector length");
  std::vector<Vector> cols;
  for (int i = 0; i < dim(); ++i) cols.push_back(multiply(coadjoint_generator(i), f));
  return Matrix::from_columns(cols, dim());
}

Matrix matrix_exp(const Matrix& a) {
  require(a.rows == a.cols, ErrorCode::kShapeMismatch, "matrix exponential needs a square matrix");
  const int n = a.rows;
  double norm = 0.0;
  for (int r = 0; r < n; ++r) {
    double row = 0.0;
    for (int c = 0; c < n; ++c) row += std::abs(a(r, c));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  Matrix scaled = a;
  for (double& x : scaled.data) x = std::ldexp(x, -squarings);
  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = multiply(term, scaled);
    for (double& x : term.data) x /= k;
    for (std::size_t i = 0; i < result.data.size(); ++i) result.data[i] += term.data[i];
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return result;
}

JetMatrix jet_matrix_multiply(const JetMatrix& a, const JetMatrix& b, int n) {
  require(static_cast<int>(a.size()) == n * n && static_cast<int>(b.size()) == n * n, ErrorCode::kShapeMismatch,
          "jet matrix size");
  JetMatrix out;
  out.reserve(a.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Jet acc = jet_mul(a[static_cast<std::size_t>(i * n)], b[static_cast<std::size_t>(k)]);
      for (int j = 1; j < n; ++j) {
        acc = jet_add(acc, jet_mul(a[static_cast<std::size_t>(i * n + j)], b[static_cast<std::size_t>(j * n + k)]));
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

JetMatrix jet_matrix_exp(const JetMatrix& a, int n) {
  require(static_cast<int>(a.size()) == n * n && n > 0, ErrorCode::kShapeMismatch, "jet matrix size");
  // Scale by the largest coefficient magnitude across all derivative entries.
  double norm = 0.0;
  for (int r = 0; r < n; ++r) {
    double row = 0.0;
    for (int c = 0; c < n; ++c) {
      double m = 0.0;
      for (double x : a[static_cast<std::size_t>(r * n + c)].raw()) m = std::max(m, std::abs(x));
      row += m;
    }
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  JetMatrix scaled = a;
  for (auto& x : scaled) x = jet_scale(x, scale);

  const Jet zero = zero_like(a[0]);
  const Jet one = one_like(a[0]);
  JetMatrix identity(static_cast<std::size_t>(n * n), zero);
  for (int i = 0; i < n; ++i) identity[static_cast<std::size_t>(i * n + i)] = one;

  const int degree = std::max(18, a[0].order() + 2);
  JetMatrix result = identity;
  JetMatrix term = identity;
  for (int k = 1; k <= degree; ++k) {
    term = jet_matrix_multiply(term, scaled, n);
    for (auto& x : term) x = jet_scale(x, 1.0 / k);
    for (std::size_t i = 0; i < result.size(); ++i) result[i] = jet_add(result[i], term[i]);
  }
  for (int s = 0; s < squarings; ++s) result = jet_matrix_multiply(result, result, n);
  return result;
}

SmoothMapPtr coadjoint_plaque_map(const MatrixGroup& group, Vector f) {
  return std::make_shared<CoadjointPlaqueMap>(group, std::move(f));
}

}  // namespace diffeo
