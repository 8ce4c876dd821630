#include "diffeo/tangent.hpp"

#include <cmath>
#include <random>

namespace diffeo {

namespace {

void require_close(std::span<const double> a, std::span<const double> b, ErrorCode code, const std::string& what,
                   double tol = kDefaultTolerance) {
  require(a.size() == b.size(), ErrorCode::kShapeMismatch, what);
  for (std::size_t i = 0; i < a.size(); ++i) require(std::abs(a[i] - b[i]) <= tol, code, what);
}

// s |-> (r, s)
SmoothMapPtr fix_leading(std::span<const double> r, int fiber_vars) {
  const int n = static_cast<int>(r.size());
  const int out = n + fiber_vars;
  Vector m(static_cast<std::size_t>(out * fiber_vars), 0.0);
  for (int i = 0; i < fiber_vars; ++i) m[static_cast<std::size_t>((n + i) * fiber_vars + i)] = 1.0;
  Vector offset(r.begin(), r.end());
  offset.resize(static_cast<std::size_t>(out), 0.0);
  return affine_map(fiber_vars, out, std::move(m), std::move(offset));
}

// r |-> (r, 0)
SmoothMapPtr zero_trailing(int base_vars, int fiber_vars) {
  const int out = base_vars + fiber_vars;
  Vector m(static_cast<std::size_t>(out * base_vars), 0.0);
  for (int i = 0; i < base_vars; ++i) m[static_cast<std::size_t>(i * base_vars + i)] = 1.0;
  return linear_map(base_vars, out, std::move(m));
}

// (r, s) |-> s
SmoothMapPtr drop_leading(int base_vars, int fiber_vars) {
  std::vector<int> keep;
  for (int i = 0; i < fiber_vars; ++i) keep.push_back(base_vars + i);
  return coordinate_projection(base_vars + fiber_vars, keep);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TangentVector tangent_of(SpacePtr space, const Plaque& p, int order) {
  space->check_order(order);
  require(p.ambient_dim() == space->ambient_dim, ErrorCode::kShapeMismatch, "plaque outside the space's ambient");
  TangentVector v{space, p.base(), order, probe_jet(p, order, *space->probe, space->order_k), p};
  return v;
}

TangentVector zero_vector(SpacePtr space, std::span<const double> point, int order, int domain_dim) {
  Plaque p = constant_plaque(Vector(point.begin(), point.end()), domain_dim, space->name);
  return tangent_of(std::move(space), p, order);
}

bool same_class(const TangentVector& a, const TangentVector& b, double tol) {
  if (a.base.size() != b.base.size() || a.order != b.order) return false;
  for (std::size_t i = 0; i < a.base.size(); ++i) {
    if (std::abs(a.base[i] - b.base[i]) > tol) return false;
  }
  if (a.class_jet.num_vars() != b.class_jet.num_vars() || a.class_jet.target_dim() != b.class_jet.target_dim()) {
    return false;
  }
  return a.class_jet.max_abs_difference(b.class_jet) <= tol;
}

TangentVector add(const TangentVector& v1, const TangentVector& v2, double c) {
  require(v1.space == v2.space, ErrorCode::kBaseMismatch, "vectors on different spaces");
  require(v1.order == v2.order, ErrorCode::kBaseMismatch, "vectors of different orders");
  require_close(v1.base, v2.base, ErrorCode::kBaseMismatch, "vectors at different base points");
  const Space& space = *v1.space;
  require(space.linear != nullptr, ErrorCode::kNonLinearTangent, space.name + " has no linear structure");
  const std::vector<Plaque> plaques{v1.representative, v2.representative};
  const Vector weights{1.0, c};
  return tangent_of(v1.space, space.linear->combine(space, plaques, weights, v1.order), v1.order);
}

TangentVector scale(const TangentVector& v, double c) {
  const Space& space = *v.space;
  require(space.linear != nullptr, ErrorCode::kNonLinearTangent, space.name + " has no linear structure");
  const std::vector<Plaque> plaques{v.representative};
  const Vector weights{c};
  return tangent_of(v.space, space.linear->combine(space, plaques, weights, v.order), v.order);
}

Vector project(const TangentVector& v) { return v.base; }

SpaceMap compose_maps(const SpaceMap& g, const SpaceMap& f) {
  require(f.target == g.source || f.map->out_dim() == g.map->in_dim(), ErrorCode::kShapeMismatch,
          "maps do not compose");
  return SpaceMap{f.source, g.target, compose(g.map, f.map), g.name + "o" + f.name};
}

TangentVector pushforward(const SpaceMap& f, const TangentVector& v) {
  require(f.map->in_dim() == v.space->ambient_dim, ErrorCode::kShapeMismatch, "map source does not match");
  require(f.map->out_dim() == f.target->ambient_dim, ErrorCode::kShapeMismatch, "map target does not match");
  v.space->check_order(v.order);
  f.target->check_order(v.order);
  const Plaque& p = v.representative;
  Plaque image(compose(f.map, p.map()), p.radius(), f.target->name);
  return tangent_of(f.target, image, v.order);
}

BundlePlaque::BundlePlaque(SpacePtr space, Plaque p, int base_vars, int class_order)
    : space_(std::move(space)), p_(std::move(p)), base_vars_(base_vars), class_order_(class_order) {
  require(base_vars_ >= 0 && base_vars_ < p_.domain_dim(), ErrorCode::kShapeMismatch,
          "split must leave at least one fiber variable");
  require(p_.ambient_dim() == space_->ambient_dim, ErrorCode::kShapeMismatch, "plaque outside the space's ambient");
  if (class_order_ < 0) class_order_ = fiber_vars();
  space_->check_order(class_order_);
}

TangentVector BundlePlaque::operator()(std::span<const double> r) const {
  require(static_cast<int>(r.size()) == base_vars_, ErrorCode::kShapeMismatch, "bundle plaque argument");
  const double rn = norm2(r);
  require(rn < p_.radius(), ErrorCode::kRadiusExceeded, "bundle plaque argument outside the ball");
  const double fiber_radius = std::sqrt(p_.radius() * p_.radius() - rn * rn);
  Plaque slice(compose(p_.map(), fix_leading(r, fiber_vars())), fiber_radius, p_.space_tag());
  return tangent_of(space_, slice, class_order_);
}

BundlePlaque BundlePlaque::precompose(SmoothMapPtr psi, double radius) const {
  require(psi->out_dim() == base_vars_, ErrorCode::kShapeMismatch, "reparametrization must land in the base variables");
  auto lifted = block_diagonal({std::move(psi), identity_map(fiber_vars())});
  const int k = lifted->in_dim() - fiber_vars();
  return BundlePlaque(space_, diffeo::precompose(p_, std::move(lifted), radius), k, class_order_);
}

Plaque BundlePlaque::project() const {
  require(base_vars_ > 0, ErrorCode::kShapeMismatch, "a 0-plaque of the bundle projects to a point");
  return Plaque(compose(p_.map(), zero_trailing(base_vars_, fiber_vars())), p_.radius(), p_.space_tag());
}

bool BundlePlaque::in_fiber(double tol) const {
  if (base_vars_ == 0) return true;
  const Plaque base = project();
  const Vector f = base.base();
  std::mt19937_64 rng(0xf1be);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 16; ++k) {
    Vector r(static_cast<std::size_t>(base_vars_));
    for (double& x : r) x = unit(rng);
    const double scale = 0.9 * base.radius() / std::max(norm2(r), 1e-300) * std::abs(unit(rng));
    for (double& x : r) x *= scale;
    const Vector y = base(r);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (std::abs(y[i] - f[i]) > tol) return false;
    }
  }
  return true;
}

bool bundle_equivalent(const BundlePlaque& a, const BundlePlaque& b, int order, double tol) {
  require(a.space() == b.space(), ErrorCode::kShapeMismatch, "bundle plaques on different spaces");
  require(a.base_vars() == b.base_vars() && a.fiber_vars() == b.fiber_vars(), ErrorCode::kShapeMismatch,
          "bundle plaques with different splits");
  const Vector zero(static_cast<std::size_t>(a.base_vars()), 0.0);
  require(same_class(a(zero), b(zero), tol), ErrorCode::kBasepointMismatch,
          "bundle plaques through different bundle points");
  const Space& s = *a.space();
  return equivalent_at(a.plaque(), b.plaque(), order + a.fiber_vars(), *s.probe, tol);
}

BundlePlaque pushforward(const SpaceMap& f, const BundlePlaque& b) {
  require(f.map->in_dim() == b.space()->ambient_dim, ErrorCode::kShapeMismatch, "map source does not match");
  Plaque image(compose(f.map, b.plaque().map()), b.plaque().radius(), f.target->name);
  return BundlePlaque(f.target, std::move(image), b.base_vars(), b.class_order());
}

BundlePlaque bundle_add(const BundlePlaque& a, const BundlePlaque& b, double c, int order) {
  require(a.space() == b.space(), ErrorCode::kBaseMismatch, "bundle vectors on different spaces");
  require(a.base_vars() == b.base_vars() && a.fiber_vars() == b.fiber_vars(), ErrorCode::kShapeMismatch,
          "bundle vectors with different splits");
  const Vector zero(static_cast<std::size_t>(a.base_vars()), 0.0);
  require(same_class(a(zero), b(zero)), ErrorCode::kBaseMismatch, "bundle vectors at different bundle points");
  const Space& space = *a.space();
  require(space.linear != nullptr, ErrorCode::kNonLinearTangent, space.name + " has no linear structure");
  // alpha-bar(r, s) = p1(0, s)
  const Plaque& p1 = a.plaque();
  Plaque alpha_bar(compose(p1.map(), compose(fix_leading(zero, a.fiber_vars()),
                                             drop_leading(a.base_vars(), a.fiber_vars()))),
                   p1.radius(), p1.space_tag());
  const std::vector<Plaque> plaques{p1, b.plaque(), alpha_bar};
  const Vector weights{1.0, c, -c};
  Plaque sum = space.linear->combine(space, plaques, weights, order + a.fiber_vars());
  return BundlePlaque(a.space(), std::move(sum), a.base_vars(), a.class_order());
}

BundlePlaque continuous_sum(const BundlePlaque& a, const BundlePlaque& b, double c) {
  require(a.space() == b.space(), ErrorCode::kBaseMismatch, "bundle plaques on different spaces");
  require(a.base_vars() == b.base_vars() && a.fiber_vars() == b.fiber_vars(), ErrorCode::kShapeMismatch,
          "bundle plaques with different splits");
  require(a.space()->ambient_open, ErrorCode::kNonLinearTangent,
          "ambient sums need a space open in its ambient, not " + a.space()->name);
  const int n = a.base_vars();
  const int m = a.fiber_vars();
  auto base_b = compose(b.plaque().map(), compose(zero_trailing(n, m), coordinate_projection(n + m, [&] {
                                                    std::vector<int> idx;
                                                    for (int i = 0; i < n; ++i) idx.push_back(i);
                                                    return idx;
                                                  }())));
  auto sum = linear_combination({a.plaque().map(), b.plaque().map(), base_b}, {1.0, c, -c});
  Plaque p(std::move(sum), std::min(a.plaque().radius(), b.plaque().radius()), a.plaque().space_tag());
  return BundlePlaque(a.space(), std::move(p), n, a.class_order());
}

}  // namespace diffeo
