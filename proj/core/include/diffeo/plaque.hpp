#pragma once

// Plaques: smooth maps from a certified ball about 0 in R^n into the ambient
// R^d of a space, together with the closure operations of a diffeology and
// the order-n equivalence test.

#include <string>

#include "diffeo/smooth_map.hpp"

namespace diffeo {

inline constexpr double kDefaultTolerance = 1e-9;

class Plaque {
 public:
  Plaque(SmoothMapPtr map, double radius, std::string space_tag = {});

  int domain_dim() const { return map_->in_dim(); }
  int ambient_dim() const { return map_->out_dim(); }
  double radius() const { return radius_; }
  const std::string& space_tag() const { return space_tag_; }
  const SmoothMapPtr& map() const { return map_; }

  Vector operator()(std::span<const double> r) const { return map_->evaluate(r); }
  // p(0).
  Vector base() const;
  // Jet of p at 0.
  Jet jet(int order) const;

 private:
  SmoothMapPtr map_;
  double radius_;
  std::string space_tag_;
};

Plaque constant_plaque(Vector point, int domain_dim, std::string space_tag = {});
// r |-> p(r0 + r), with the largest ball that stays inside p's ball.
Plaque shift_plaque(const Plaque& p, std::span<const double> r0);

// p o psi. `radius` is the certified ball of the new plaque; psi must fix 0
// (BasepointMismatch) and map that ball into p's ball, checked on a sample
// (RadiusExceeded).
Plaque precompose(const Plaque& p, SmoothMapPtr psi, double radius, double tol = kDefaultTolerance);
Plaque restrict(const Plaque& p, double radius);

// Order-n jet of probe o p at 0. `max_order` is the space's order bound
// (negative = unbounded). Domain failures of the probe become ProbeDomainError.
Jet probe_jet(const Plaque& p, int order, const SmoothMap& probe, int max_order = -1);

bool jets_agree(const Jet& a, const Jet& b, double tol);

// p1 ~^n p2 through the probe: equal base point and equal probe jets.
bool equivalent_at(const Plaque& p1, const Plaque& p2, int order, const SmoothMap& probe,
                   double tol = kDefaultTolerance, int max_order = -1);

}  // namespace diffeo
