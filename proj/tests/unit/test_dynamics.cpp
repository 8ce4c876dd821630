#include <cmath>
#include <numbers>

#include "common.hpp"
#include "diffeo/cli/spec_file.hpp"
#include "fixtures.hpp"

using namespace diffeo;
using cli::ambient_expressions;

TEST(Fields, BracketOfCoordinateFields) {
  const SpacePtr e = euclidean_space(2);
  const VectorField dx = make_field(e, constant_map(2, {1, 0}), "dx");
  const VectorField shear = make_field(e, ambient_expressions({"0", "x1"}, 2), "x dy");
  const Vector v = derivation_velocity(bracket(dx, shear), 2, Vector{0.3, 0.7});
  EXPECT_NEAR(v[0], 0.0, 1e-14);
  EXPECT_NEAR(v[1], 1.0, 1e-14);
}

TEST(Fields, ScaleAndCombine) {
  const SpacePtr e = euclidean_space(2);
  const VectorField dx = make_field(e, constant_map(2, {1, 0}), "dx");
  const VectorField dy = make_field(e, constant_map(2, {0, 1}), "dy");
  const VectorField c = combine_fields({dx, dy}, Vector{2.0, -1.0});
  EXPECT_EQ(c.velocity->evaluate(Vector{5, 5}), (Vector{2.0, -1.0}));
  const VectorField s = scale_field(dx, ambient_expressions({"x2"}, 2));
  EXPECT_EQ(s.velocity->evaluate(Vector{5, 3}), (Vector{3.0, 0.0}));
  EXPECT_EQ(zero_field(e).velocity->evaluate(Vector{1, 1}), (Vector{0.0, 0.0}));
}

TEST(Fields, FieldVectorOnTheCircle) {
  const auto& spec = fixture::spec("circle");
  const TangentVector v = field_vector(spec.fields[0], Vector{0.6, 0.8});
  EXPECT_NEAR(v.class_jet.at(1, 0), -0.8, 1e-9);
  EXPECT_NEAR(v.class_jet.at(1, 1), 0.6, 1e-9);
  const Vector q = v.representative(Vector{0.2});
  EXPECT_NEAR(q[0] * q[0] + q[1] * q[1], 1.0, 1e-12);
}

TEST(Algebra, RotationStructureConstants) {
  const AlgebraPtr a = fixture::algebra("so3_orbit");
  ASSERT_EQ(a->size(), 3);
  EXPECT_LT(a->closure_residual(), 1e-10);
  EXPECT_LT(a->jacobi_defect(), 1e-10);
  // [L1, L2] = -L3 in the vector-field convention
  const Vector& c12 = a->structure(0, 1);
  EXPECT_NEAR(c12[2], -1.0, 1e-10);
  EXPECT_NEAR(c12[0], 0.0, 1e-10);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(a->structure(i, j)[k], -a->structure(j, i)[k], 1e-12);
}

TEST(Algebra, NotClosed) {
  const SpacePtr e = euclidean_space(1);
  const VectorField d = make_field(e, constant_map(1, {1}), "d");
  const VectorField q = make_field(e, ambient_expressions({"x1^2"}, 1), "x^2 d");
  EXPECT_DIFFEO_ERROR(FieldAlgebra::declare(e, {d, q}), ErrorCode::kAlgebraNotClosed);
}

TEST(Algebra, ResolveOutsideTheAlgebra) {
  const AlgebraPtr a = fixture::algebra("euclidean2");
  const VectorField stray = make_field(a->space(), ambient_expressions({"0", "x1^2"}, 2), "x^2 dy");
  EXPECT_DIFFEO_ERROR(resolve_bracket(*a, a->fields()[0], stray), ErrorCode::kAlgebraNotClosed);
}

TEST(Flow, ZeroAndTranslation) {
  const SpacePtr e = euclidean_space(2);
  EXPECT_EQ(integrate(zero_field(e), Vector{0.4, 0.2}, 3.0), (Vector{0.4, 0.2}));
  const Plaque p(affine_map(1, 2, {1, 1}, {0, 0}), 1.0);
  const Plaque moved = translation_flow({1.0, -2.0})->apply(p);
  const Vector y = moved(Vector{0.5, 2.0});
  EXPECT_NEAR(y[0], 2.5, 1e-15);
  EXPECT_NEAR(y[1], -3.5, 1e-15);
  EXPECT_EQ(identity_flow()->apply(p)(Vector{0.3, 4.0}), p(Vector{0.3}));
}

TEST(Flow, BlowUpIsStepOutOfDomain) {
  const SpacePtr e = euclidean_space(1);
  const VectorField sq = make_field(e, ambient_expressions({"x1^2"}, 1), "x^2");
  EXPECT_DIFFEO_ERROR(integrate(sq, Vector{1.0}, 2.0), ErrorCode::kStepOutOfDomain);
  EXPECT_DIFFEO_ERROR(integrate(sq, Vector{0.1}, 20.0), ErrorCode::kStepOutOfDomain);  // beyond the horizon
  EXPECT_NEAR(integrate(sq, Vector{1.0}, 0.5)[0], 2.0, 1e-9);
}

TEST(Flow, TimeClassIsTheVelocity) {
  const auto& spec = fixture::spec("rotation");
  const LocalFlowPtr phi = flow_from_field(spec.fields[0]);
  const Plaque p(affine_map(1, 2, {0, 1}, {1, 0}), 1.0);
  const Jet j = time_class(*phi, p, Vector{0.0}, 2);
  // t |-> (cos t, sin t): velocity (0, 1), acceleration (-1, 0)
  EXPECT_NEAR(j.at(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(j.at(2, 0), -1.0, 1e-9);
}

TEST(Flow, RotationQuarterTurn) {
  const auto& spec = fixture::spec("rotation");
  const Vector y = integrate(spec.fields[0], Vector{1.0, 0.0}, std::numbers::pi / 2);
  EXPECT_NEAR(y[0], 0.0, 1e-10);
  EXPECT_NEAR(y[1], 1.0, 1e-10);
}
