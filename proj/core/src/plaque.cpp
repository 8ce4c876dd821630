#include "diffeo/plaque.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace diffeo {

Plaque::Plaque(SmoothMapPtr map, double radius, std::string space_tag)
    : map_(std::move(map)), radius_(radius), space_tag_(std::move(space_tag)) {
  require(map_ != nullptr, ErrorCode::kShapeMismatch, "plaque needs a map");
  require(radius_ > 0.0 && std::isfinite(radius_), ErrorCode::kRadiusExceeded, "plaque radius must be positive");
}

Vector Plaque::base() const {
  const Vector zero(static_cast<std::size_t>(domain_dim()), 0.0);
  return map_->evaluate(zero);
}

Jet Plaque::jet(int order) const {
  const Vector zero(static_cast<std::size_t>(domain_dim()), 0.0);
  return jet_at(*map_, zero, order);
}

Plaque constant_plaque(Vector point, int domain_dim, std::string space_tag) {
  return Plaque(constant_map(domain_dim, std::move(point)), 1.0, std::move(space_tag));
}

Plaque shift_plaque(const Plaque& p, std::span<const double> r0) {
  require(static_cast<int>(r0.size()) == p.domain_dim(), ErrorCode::kShapeMismatch, "shift length");
  double norm = 0.0;
  for (double x : r0) norm += x * x;
  norm = std::sqrt(norm);
  require(norm < p.radius(), ErrorCode::kRadiusExceeded, "shift leaves the plaque's ball");
  const int n = p.domain_dim();
  Vector eye(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) eye[static_cast<std::size_t>(i * n + i)] = 1.0;
  auto shift = affine_map(n, n, std::move(eye), Vector(r0.begin(), r0.end()));
  return Plaque(compose(p.map(), shift), p.radius() - norm, p.space_tag());
}

Plaque precompose(const Plaque& p, SmoothMapPtr psi, double radius, double tol) {
  require(psi->out_dim() == p.domain_dim(), ErrorCode::kShapeMismatch,
          "reparametrization output must match the plaque domain");
  const int m = psi->in_dim();
  const Vector zero(static_cast<std::size_t>(m), 0.0);
  const Vector at_zero = psi->evaluate(zero);
  for (double x : at_zero) {
    require(std::abs(x) <= tol, ErrorCode::kBasepointMismatch, "reparametrization must fix the origin");
  }
  // Sample the ball: axis points on the sphere plus pseudo-random interior points.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto check = [&](const Vector& r) {
    const Vector y = psi->evaluate(r);
    double norm = 0.0;
    for (double v : y) norm += v * v;
    require(std::sqrt(norm) < p.radius(), ErrorCode::kRadiusExceeded,
            "reparametrization leaves the plaque's ball");
  };
  for (int i = 0; i < m; ++i) {
    for (double s : {-1.0, 1.0}) {
      Vector r(static_cast<std::size_t>(m), 0.0);
      r[static_cast<std::size_t>(i)] = s * radius * (1.0 - 1e-12);
      check(r);
    }
  }
  for (int k = 0; k < 32; ++k) {
    Vector r(static_cast<std::size_t>(m));
    double norm = 0.0;
    for (double& x : r) {
      x = gauss(rng);
      norm += x * x;
    }
    const double scale = radius * std::pow(uniform(rng), 1.0 / m) / std::max(std::sqrt(norm), 1e-300);
    for (double& x : r) x *= scale;
    check(r);
  }
  return Plaque(compose(p.map(), std::move(psi)), radius, p.space_tag());
}

Plaque restrict(const Plaque& p, double radius) {
  require(radius > 0.0 && radius <= p.radius(), ErrorCode::kRadiusExceeded,
          "restriction radius must lie in (0, radius]");
  return Plaque(p.map(), radius, p.space_tag());
}

Jet probe_jet(const Plaque& p, int order, const SmoothMap& probe, int max_order) {
  require(order >= 0, ErrorCode::kOrderExceeded, "negative order");
  require(max_order < 0 || order <= max_order, ErrorCode::kOrderExceeded,
          "order " + std::to_string(order) + " exceeds the space order " + std::to_string(max_order));
  require(probe.in_dim() == p.ambient_dim(), ErrorCode::kShapeMismatch, "probe input must match the ambient");
  const Jet j = p.jet(order);
  try {
    return probe.evaluate(j);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDomainError) fail(ErrorCode::kProbeDomainError, e.what());
    throw;
  }
}

bool jets_agree(const Jet& a, const Jet& b, double tol) {
  require_same_shape(a, b);
  return a.max_abs_difference(b) <= tol;
}

bool equivalent_at(const Plaque& p1, const Plaque& p2, int order, const SmoothMap& probe, double tol,
                   int max_order) {
  require(p1.domain_dim() == p2.domain_dim(), ErrorCode::kShapeMismatch, "plaques of different domain dimension");
  const Vector b1 = p1.base();
  const Vector b2 = p2.base();
  require(b1.size() == b2.size(), ErrorCode::kShapeMismatch, "plaques in different ambients");
  for (std::size_t i = 0; i < b1.size(); ++i) {
    require(std::abs(b1[i] - b2[i]) <= tol, ErrorCode::kBasepointMismatch, "plaques have different base points");
  }
  return jets_agree(probe_jet(p1, order, probe, max_order), probe_jet(p2, order, probe, max_order), tol);
}

}  // namespace diffeo
