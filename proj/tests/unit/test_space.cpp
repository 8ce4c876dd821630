#include <cmath>

#include "common.hpp"

using namespace diffeo;

TEST(Space, EuclideanCharts) {
  const SpacePtr e = euclidean_space(3);
  EXPECT_EQ(e->ambient_dim, 3);
  EXPECT_TRUE(e->smooth());
  const Chart c = chart_at(*e, Vector{0.1, 0.2, 0.3});
  EXPECT_EQ(c.plaque.base(), (Vector{0.1, 0.2, 0.3}));
  EXPECT_EQ(probe_rank(*e, Vector{0.0, 0.0, 0.0}).rank, 3);
}

TEST(Space, FiniteOrder) {
  const SpacePtr e = euclidean_space(2, 2);
  EXPECT_FALSE(e->smooth());
  EXPECT_DIFFEO_ERROR(e->check_order(3), ErrorCode::kOrderExceeded);
}

TEST(Space, CircleSamplesStayOnTheCircle) {
  const SpacePtr s = circle();
  for (const auto& p : sample_points(*s, 30)) EXPECT_NEAR(p[0] * p[0] + p[1] * p[1], 1.0, 1e-12);
  const auto charts = charts_through(*s, Vector{0.6, 0.8});
  ASSERT_FALSE(charts.empty());
  EXPECT_NEAR(charts[0].plaque.base()[0], 0.6, 1e-9);
  EXPECT_DIFFEO_ERROR(chart_at(*s, Vector{0.5, 0.5}), ErrorCode::kUnreachablePoint);
}

TEST(Space, CrossingCurvesCharts) {
  const SpacePtr x = crossing_curves();
  EXPECT_EQ(charts_through(*x, Vector{0.0, 0.0}).size(), 2u);
  EXPECT_EQ(charts_through(*x, Vector{0.0, -0.7}).size(), 1u);
  EXPECT_TRUE(charts_through(*x, Vector{0.3, 0.3}).empty());
}

TEST(Space, ProductOfCircles) {
  const SpacePtr t = product(circle(), circle());
  EXPECT_EQ(t->ambient_dim, 4);
  const TangentReport r = tangent_set_dimension(*t, Vector{1.0, 0.0, 0.0, 1.0}, 1);
  EXPECT_EQ(r.span_dimension, 2);
  EXPECT_TRUE(r.linear);
}

TEST(Space, SubspaceMembership) {
  // A family that leaves the unit circle is refused.
  const expr::VariableTable v{{"t", 0}, {"a", 1}};
  const SmoothMapPtr joint = expression_map({expr::parse("2*cos(t + a)", v), expr::parse("sin(t + a)", v)}, 2);
  auto family = make_family("bad", 1, 1, joint, 1.0, {{0.0, 6.28}});
  const auto on_circle = [](std::span<const double> p) { return std::abs(p[0] * p[0] + p[1] * p[1] - 1.0) < 1e-9; };
  EXPECT_DIFFEO_ERROR(subspace(euclidean_space(2), {family}, "ellipse", on_circle), ErrorCode::kMembershipViolation);
}

TEST(LieGroup, Catalog) {
  for (const auto& id : MatrixGroup::catalog()) {
    const MatrixGroup g = MatrixGroup::builtin(id);
    EXPECT_GT(g.dim(), 0) << id;
    // ad is antisymmetric in its two slots
    for (int i = 0; i < g.dim(); ++i)
      for (int j = 0; j < g.dim(); ++j) {
        const Matrix ai = g.ad(i), aj = g.ad(j);
        for (int k = 0; k < g.dim(); ++k) EXPECT_NEAR(ai(k, j), -aj(k, i), 1e-12) << id;
      }
  }
  EXPECT_DIFFEO_ERROR(MatrixGroup::builtin("SU7"), ErrorCode::kUnsupportedGroup);
}

TEST(LieGroup, CoadjointOrbitPreservesNorm) {
  const MatrixGroup so3 = MatrixGroup::builtin("SO3");
  const SmoothMapPtr k = coadjoint_plaque_map(so3, {0.3, -0.4, 1.2});
  const Vector y = k->evaluate(Vector{0.7, -1.1, 0.4});
  EXPECT_NEAR(y[0] * y[0] + y[1] * y[1] + y[2] * y[2], 0.09 + 0.16 + 1.44, 1e-12);
}

TEST(LieGroup, MatrixExp) {
  Matrix a(2, 2);
  a(0, 1) = -1.0;
  a(1, 0) = 1.0;
  const Matrix e = matrix_exp(a);
  EXPECT_NEAR(e(0, 0), std::cos(1.0), 1e-14);
  EXPECT_NEAR(e(1, 0), std::sin(1.0), 1e-14);
}

TEST(Linalg, RankGapAndNullSpace) {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}}, 3);
  const RankInfo r = numeric_rank(m);
  EXPECT_EQ(r.rank, 2);
  EXPECT_GT(r.gap, 1e10);
  const Matrix n = null_space(m);
  ASSERT_EQ(n.cols, 1);
  const Vector z = multiply(m, n.column(0));
  for (double v : z) EXPECT_NEAR(v, 0.0, 1e-14);
  const LeastSquares ls = solve_least_squares(m, Vector{1, 2, 0});
  EXPECT_LT(ls.residual, 1e-12);
}
