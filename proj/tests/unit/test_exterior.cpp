#include <cmath>

#include "common.hpp"
#include "diffeo/cli/spec_file.hpp"
#include "fixtures.hpp"

using namespace diffeo;
using cli::ambient_expressions;

TEST(Rings, HarmonicOnTheCircle) {
  std::vector<std::string> names;
  const auto ring = harmonic_ring(2, 0, 2, &names);
  ASSERT_EQ(ring.size(), 5u);
  const double th = 0.7;
  const Vector p{std::cos(th), std::sin(th)};
  EXPECT_NEAR(evaluate_scalar(*ring[0], p), 1.0, 1e-15);
  EXPECT_NEAR(evaluate_scalar(*ring[3], p), std::cos(2 * th), 1e-14);
  EXPECT_NEAR(evaluate_scalar(*ring[4], p), std::sin(2 * th), 1e-14);
  EXPECT_EQ(names.size(), ring.size());
}

TEST(Rings, MonomialCounts) {
  EXPECT_EQ(monomial_ring(2, 3).size(), 10u);
  const auto keep = [](std::span<const int> e) { return e[2] <= 1; };
  EXPECT_EQ(monomial_ring(3, 4, nullptr, keep).size(), 25u);
  EXPECT_EQ(product_ring(monomial_ring(1, 2), monomial_ring(1, 1)).size(), 6u);
}

TEST(Rings, PolynomialFunction) {
  const SmoothFunction f = polynomial_function(2, {{{2, 1}, 3.0}, {{0, 0}, -1.0}});
  EXPECT_DOUBLE_EQ(evaluate_scalar(*f, Vector{2.0, 0.5}), 5.0);
}

TEST(Forms, WedgeDegreeOverflow) {
  const AlgebraPtr a = fixture::algebra("euclidean2");
  const auto w = DifferentialForm::exact(a, ambient_expressions({"x1"}, 2));
  const auto ww = wedge(w, w);
  EXPECT_DIFFEO_ERROR(wedge(ww, w), ErrorCode::kDegreeOverflow);
}

TEST(Forms, ExactFormsOnThePlane) {
  const AlgebraPtr a = fixture::algebra("euclidean2");
  const auto& dx = a->fields()[0];
  const auto& dy = a->fields()[1];
  const SmoothFunction f = ambient_expressions({"x1^2*x2"}, 2);
  const auto df = exterior_derivative(DifferentialForm::function(a, f));
  const Vector p{1.5, -2.0};
  EXPECT_NEAR(evaluate_scalar(*df({dx}), p), 2 * 1.5 * -2.0, 1e-12);
  EXPECT_NEAR(evaluate_scalar(*df({dy}), p), 2.25, 1e-12);
  // d(x dy) = dx ^ dy
  const auto xdy = DifferentialForm::expansion(a, {ambient_expressions({"x2"}, 2)}, {{ambient_expressions({"x1"}, 2), {0}}});
  const auto d2 = exterior_derivative(xdy);
  EXPECT_NEAR(evaluate_scalar(*d2({dx, dy}), p), 1.0, 1e-12);
  EXPECT_NEAR(evaluate_scalar(*d2({dy, dx}), p), -1.0, 1e-12);
  const auto sum = add_forms(df, df, -1.0);
  EXPECT_NEAR(evaluate_scalar(*sum({dx}), p), 0.0, 0.0);
}

TEST(Cohomology, DegenerateBasis) {
  const auto& spec = fixture::spec("circle");
  const AlgebraPtr a = fixture::algebra("circle");
  FunctionBasis basis = single_ring_basis(
      {ambient_expressions({"1"}, 2), ambient_expressions({"x1^2 + x2^2"}, 2), ambient_expressions({"x1"}, 2)}, {"1", "r2", "x"});
  (void)spec;
  EXPECT_DIFFEO_ERROR(de_rham_cohomology(a, basis, 1), ErrorCode::kBasisDegenerate);
}

TEST(Cohomology, AmbiguousThreshold) {
  const auto& spec = fixture::spec("circle");
  CohomologyOptions o;
  o.svd.relative = 0.3;
  EXPECT_DIFFEO_ERROR(de_rham_cohomology(fixture::algebra("circle"), *spec.basis, 1, o), ErrorCode::kToleranceAmbiguous);
}

TEST(Cohomology, ParallelMatchesSerial) {
  const auto& spec = fixture::spec("euclidean2");
  CohomologyOptions serial, parallel;
  parallel.jobs = 4;
  const Matrix a = assemble_d_matrix(fixture::algebra("euclidean2"), *spec.basis, 1, serial);
  const Matrix b = assemble_d_matrix(fixture::algebra("euclidean2"), *spec.basis, 1, parallel);
  ASSERT_EQ(a.rows, b.rows);
  ASSERT_EQ(a.cols, b.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_EQ(a.data[i], b.data[i]);
}

TEST(Cohomology, PlaneReport) {
  const auto& spec = fixture::spec("euclidean2");
  const CohomologyReport r = de_rham_cohomology(fixture::algebra("euclidean2"), *spec.basis, 2);
  EXPECT_EQ(r.betti[0], 1);
  EXPECT_EQ(r.betti[1], 0);
  EXPECT_EQ(r.betti[2], 0);
  for (std::size_t n = 0; n < r.betti.size(); ++n) EXPECT_EQ(r.betti[n], r.dim_z[n] - r.dim_b[n]);
  EXPECT_LT(r.d_squared, 1e-10);
}
