#include <cmath>

#include "common.hpp"

using namespace diffeo;

TEST(MultiIndex, FactorialAndDegree) {
  const MultiIndex a({2, 0, 3});
  EXPECT_EQ(a.degree(), 5);
  EXPECT_DOUBLE_EQ(a.factorial(), 12.0);
  EXPECT_EQ(a + MultiIndex::unit(3, 1), MultiIndex({2, 1, 3}));
}

TEST(JetLayout, SizeAndPositions) {
  const auto layout = JetLayout::get(3, 4);
  EXPECT_EQ(layout->size(), 35u);  // C(7, 3)
  for (std::size_t i = 0; i < layout->size(); ++i) EXPECT_EQ(layout->position(layout->index(i)), i);
  EXPECT_EQ(layout->degree_begin(5), layout->size());
  EXPECT_DIFFEO_ERROR(layout->position(MultiIndex({5, 0, 0})), ErrorCode::kOrderExceeded);
}

TEST(Jet, ProductOfCoordinates) {
  const Jet id = Jet::identity(Vector{2.0, -1.0}, 3);
  const Jet x = id.component(0), y = id.component(1);
  const Jet p = x * x * y;  // x^2 y at (2, -1)
  EXPECT_DOUBLE_EQ(p.scalar(), -4.0);
  EXPECT_DOUBLE_EQ(extract_derivative(p, MultiIndex({1, 0}))[0], -4.0);
  EXPECT_DOUBLE_EQ(extract_derivative(p, MultiIndex({2, 1}))[0], 2.0);
  EXPECT_DOUBLE_EQ(extract_derivative(p, MultiIndex({0, 2}))[0], 0.0);
}

TEST(Jet, ComposeExpSin) {
  // exp(sin t) at t = 0: derivatives 1, 1, 1, 0
  const Jet t = Jet::identity(Vector{0.0}, 3);
  const Jet s = lift(ElementaryFunction::sin(), t);
  const Jet outer = jet_at(*expression_map({expr::call(ElementaryFunction::exp(), expr::variable(0))}, 1), s.value(), 3);
  const Jet e = jet_compose(outer, s);
  const double want[4] = {1.0, 1.0, 1.0, 0.0};
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(e.at(static_cast<std::size_t>(k), 0), want[k], 1e-14);
  EXPECT_NEAR(lift(ElementaryFunction::exp(), s).max_abs_difference(e), 0.0, 1e-14);
}

TEST(Jet, ComposeChecksExpansionPoint) {
  const Jet inner = Jet::identity(Vector{0.5}, 2);
  const Jet outer(1, 2, 1, Vector{0.0});
  EXPECT_DIFFEO_ERROR(jet_compose(outer, inner), ErrorCode::kExpansionPointMismatch);
}

TEST(Jet, RecenterIsExactOnPolynomials) {
  // p(x) = 1 + 2x + 3x^2 about 0, re-expanded about 1: p(1) = 6, p' = 8, p'' = 6
  Jet j(1, 2, 1);
  j.at(0, 0) = 1.0;
  j.at(1, 0) = 2.0;
  j.at(2, 0) = 6.0;
  const Jet r = recenter(j, Vector{1.0});
  EXPECT_NEAR(r.at(0, 0), 6.0, 1e-14);
  EXPECT_NEAR(r.at(1, 0), 8.0, 1e-14);
  EXPECT_NEAR(r.at(2, 0), 6.0, 1e-14);
}

TEST(Jet, PartialUndoesAntiderivative) {
  Jet j(2, 2, 1);
  for (std::size_t i = 0; i < j.size(); ++i) j.at(i, 0) = 0.5 + static_cast<double>(i);
  const Jet back = partial_derivative(antiderivative(j, 1), 1);
  EXPECT_NEAR(back.max_abs_difference(j), 0.0, 1e-14);
}

TEST(Jet, ExtendThenSlice) {
  const Jet j = lift(ElementaryFunction::cos(), Jet::identity(Vector{0.3}, 2));
  const Jet e = extend(j, 2, 3);
  EXPECT_EQ(e.num_vars(), 3);
  EXPECT_EQ(e.order(), 3);
  EXPECT_NEAR(slice(e, 1).truncate(2).max_abs_difference(j), 0.0, 0.0);
}

TEST(Jet, TruncateRefusesHigherOrder) {
  const Jet j = Jet::identity(Vector{0.0}, 2);
  EXPECT_DIFFEO_ERROR(j.truncate(3), ErrorCode::kOrderExceeded);
}

TEST(Elementary, DomainErrors) {
  EXPECT_DIFFEO_ERROR(ElementaryFunction::log().derivatives(-1.0, 2), ErrorCode::kDomainError);
  EXPECT_DIFFEO_ERROR(lift(ElementaryFunction::sqrt(), Jet::identity(Vector{0.0}, 1)), ErrorCode::kDomainError);
  EXPECT_FALSE(ElementaryFunction::reciprocal().defined_at(0.0));
}

TEST(Elementary, PowDerivatives) {
  const Vector d = ElementaryFunction::pow(2.5).derivatives(4.0, 3);
  EXPECT_NEAR(d[0], 32.0, 1e-12);
  EXPECT_NEAR(d[1], 2.5 * 8.0, 1e-12);
  EXPECT_NEAR(d[2], 2.5 * 1.5 * 2.0, 1e-12);
  EXPECT_NEAR(d[3], 2.5 * 1.5 * 0.5 * 0.5, 1e-12);
}
