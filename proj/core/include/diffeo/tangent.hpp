#pragma once

// Tangent vectors as classes of plaques, the bundle diffeology built from
// split (n+m)-plaques, pushforwards and the projection to the base.

#include <string>

#include "diffeo/space.hpp"

namespace diffeo {

struct TangentVector {
  SpacePtr space;
  Vector base;
  int order = 1;
  // Canonical probe jet of the representative; its constant term is probe(base).
  Jet class_jet;
  Plaque representative;
};

TangentVector tangent_of(SpacePtr space, const Plaque& p, int order);
// Class of the constant m-plaque at F.
TangentVector zero_vector(SpacePtr space, std::span<const double> point, int order, int domain_dim = 1);

bool same_class(const TangentVector& a, const TangentVector& b, double tol = kDefaultTolerance);

// v1 + c v2 through the space's linear structure. BaseMismatch for different
// base points or orders; NonLinearTangent when no linear structure carries both.
TangentVector add(const TangentVector& v1, const TangentVector& v2, double c = 1.0);
TangentVector scale(const TangentVector& v, double c);

Vector project(const TangentVector& v);

// A map between the ambients of two spaces.
struct SpaceMap {
  SpacePtr source;
  SpacePtr target;
  SmoothMapPtr map;
  std::string name;
};

SpaceMap compose_maps(const SpaceMap& g, const SpaceMap& f);
// [p] |-> [f o p].
TangentVector pushforward(const SpaceMap& f, const TangentVector& v);

// r |-> [p(r, s)]_s for an (n + m)-plaque p whose first n variables are r.
class BundlePlaque {
 public:
  // The class order defaults to the number of fiber variables.
  BundlePlaque(SpacePtr space, Plaque p, int base_vars, int class_order = -1);

  const SpacePtr& space() const { return space_; }
  const Plaque& plaque() const { return p_; }
  int base_vars() const { return base_vars_; }
  int fiber_vars() const { return p_.domain_dim() - base_vars_; }
  int class_order() const { return class_order_; }

  TangentVector operator()(std::span<const double> r) const;
  // p o (psi (x) 1_m), an n'-plaque of the bundle; `radius` bounds the new ball.
  BundlePlaque precompose(SmoothMapPtr psi, double radius) const;
  // r |-> p(r, 0).
  Plaque project() const;
  // True when p(r, 0) stays at p(0, 0) on sampled r, i.e. the plaque lies in one fiber.
  bool in_fiber(double tol = kDefaultTolerance) const;

 private:
  SpacePtr space_;
  Plaque p_;
  int base_vars_;
  int class_order_;
};

// p1~ and p2~ are equivalent at order n iff p1 ~^{n+m} p2.
bool bundle_equivalent(const BundlePlaque& a, const BundlePlaque& b, int order, double tol = kDefaultTolerance);

BundlePlaque pushforward(const SpaceMap& f, const BundlePlaque& b);

// Linear structure of T^m X at (F, [alpha]) with alpha(s) = p1(0, s): a plaque
// in [p1] + c[p2] - c[alpha-bar], alpha-bar(r, s) = alpha(s), combined at
// order `order` + m.
BundlePlaque bundle_add(const BundlePlaque& a, const BundlePlaque& b, double c, int order);

// For p1(r, 0) == p2(r, 0): (r, s) |-> p1(r, s) + c (p2(r, s) - p2(r, 0)), whose
// s-classes add pointwise in r. Needs a space open in its ambient.
BundlePlaque continuous_sum(const BundlePlaque& a, const BundlePlaque& b, double c);

}  // namespace diffeo
