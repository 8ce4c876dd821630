#include <cmath>

#include "common.hpp"

using namespace diffeo;

namespace {
Plaque line(Vector base, Vector dir) {
  const int d = static_cast<int>(base.size());
  return Plaque(affine_map(1, d, std::move(dir), std::move(base)), 1.0);
}
}  // namespace

TEST(Tangent, EuclideanVectorSpace) {
  const SpacePtr e = euclidean_space(2);
  const TangentVector u = tangent_of(e, line({1, 1}, {1, 0}), 1);
  const TangentVector v = tangent_of(e, line({1, 1}, {0, 2}), 1);
  const TangentVector w = add(u, v, 0.5);
  EXPECT_TRUE(same_class(w, tangent_of(e, line({1, 1}, {1, 1}), 1)));
  EXPECT_TRUE(same_class(scale(u, 3.0), tangent_of(e, line({1, 1}, {3, 0}), 1)));
  EXPECT_EQ(project(w), (Vector{1, 1}));
  EXPECT_TRUE(same_class(add(u, scale(u, -1.0)), zero_vector(e, Vector{1, 1}, 1)));
}

TEST(Tangent, MismatchedBasesRefused) {
  const SpacePtr e = euclidean_space(2);
  const TangentVector u = tangent_of(e, line({1, 1}, {1, 0}), 1);
  const TangentVector v = tangent_of(e, line({0, 1}, {1, 0}), 1);
  EXPECT_DIFFEO_ERROR(add(u, v), ErrorCode::kBaseMismatch);
  EXPECT_DIFFEO_ERROR(add(u, tangent_of(e, line({1, 1}, {1, 0}), 2)), ErrorCode::kBaseMismatch);
}

TEST(Tangent, CircleAdditionStaysOnTheCircle) {
  const SpacePtr s = circle();
  const Plaque arc = s->generators[0].make(Vector{0.9});
  const TangentVector u = tangent_of(s, arc, 1);
  const TangentVector w = add(u, u, 2.0);
  for (double r : {-0.3, 0.2}) {
    const Vector p = w.representative(Vector{r});
    EXPECT_NEAR(p[0] * p[0] + p[1] * p[1], 1.0, 1e-12);
  }
  EXPECT_NEAR(w.class_jet.at(1, 0), -3.0 * std::sin(0.9), 1e-9);
}

TEST(Tangent, PushforwardOfLinearMap) {
  const SpacePtr e = euclidean_space(2);
  const SpaceMap f{e, e, linear_map(2, 2, {0, -1, 1, 0}), "rot"};
  const TangentVector u = tangent_of(e, line({1, 0}, {1, 0}), 1);
  const TangentVector v = pushforward(f, u);
  EXPECT_EQ(v.base, (Vector{0, 1}));
  EXPECT_NEAR(v.class_jet.at(1, 1), 1.0, 1e-15);
}

TEST(Bundle, FiberAndProjection) {
  const SpacePtr e = euclidean_space(2);
  // (r, s) |-> (r + s, r s): base curve r |-> (r, 0)
  const expr::VariableTable v{{"r", 0}, {"s", 1}};
  const Plaque p(expression_map({expr::parse("r + s", v), expr::parse("r*s", v)}, 2), 1.0);
  const BundlePlaque b(e, p, 1);
  EXPECT_EQ(b.fiber_vars(), 1);
  EXPECT_FALSE(b.in_fiber());
  const TangentVector at = b(Vector{0.5});
  EXPECT_EQ(at.base, (Vector{0.5, 0.0}));
  EXPECT_NEAR(at.class_jet.at(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(b.project()(Vector{0.25})[0], 0.25, 1e-15);
  EXPECT_TRUE(bundle_equivalent(b, b, 1));
}

TEST(Bundle, ContinuousSumAddsPointwise) {
  const SpacePtr e = euclidean_space(2);
  const expr::VariableTable v{{"r", 0}, {"s", 1}};
  const Plaque p1(expression_map({expr::parse("r + s", v), expr::parse("0", v)}, 2), 1.0);
  const Plaque p2(expression_map({expr::parse("r", v), expr::parse("s*(1 + r)", v)}, 2), 1.0);
  const BundlePlaque sum = continuous_sum(BundlePlaque(e, p1, 1), BundlePlaque(e, p2, 1), 2.0);
  const TangentVector at = sum(Vector{0.5});
  EXPECT_NEAR(at.class_jet.at(1, 0), 1.0, 1e-14);
  EXPECT_NEAR(at.class_jet.at(1, 1), 3.0, 1e-14);
}
