#pragma once

// Concretely realized diffeological spaces. Points live in an ambient R^d,
// plaques are produced by finitely many parametrized generator families, and
// order-n tangency is decided through a probe map (charts, or the pairing with
// a Lie algebra basis for coadjoint orbits).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diffeo/lie_group.hpp"
#include "diffeo/linalg.hpp"
#include "diffeo/plaque.hpp"

namespace diffeo {

// Marker for a smooth (C^infinity) space: any requested order is accepted.
inline constexpr int kSmoothOrder = -1;

struct Location {
  Vector params;
  Vector r;
};

struct PlaqueFamily {
  std::string name;
  int domain_dim = 1;
  int param_dim = 0;
  // (r, a) |-> point, with in_dim = domain_dim + param_dim.
  SmoothMapPtr joint;
  double radius = 1.0;
  std::vector<std::pair<double, double>> param_box;
  // Exact locator; when empty a numeric search over (r, a) is used.
  std::function<std::optional<Location>(std::span<const double>)> locate;

  Plaque make(std::span<const double> params, const std::string& tag = {}) const;
};

PlaqueFamily make_family(std::string name, int domain_dim, int param_dim, SmoothMapPtr joint, double radius,
                         std::vector<std::pair<double, double>> param_box);

class LinearRealizer;

struct Space {
  std::string name;
  int ambient_dim = 0;
  int order_k = kSmoothOrder;
  std::vector<PlaqueFamily> generators;
  SmoothMapPtr probe;
  std::shared_ptr<const LinearRealizer> linear;
  std::optional<int> manifold_dim;
  std::function<bool(std::span<const double>)> membership;
  // Open in its ambient (R^d and products of such): ambient sums of plaques stay plaques.
  bool ambient_open = false;

  bool smooth() const { return order_k == kSmoothOrder; }
  void check_order(int order) const;
};

using SpacePtr = std::shared_ptr<const Space>;

// A generator plaque based at F: plaque(0) == F.
struct Chart {
  int family = 0;
  Location location;
  Plaque plaque;
};

std::optional<Location> locate_in_family(const PlaqueFamily& family, std::span<const double> point,
                                         double tol = kDefaultTolerance);
// All generator families through F, in declaration order.
std::vector<Chart> charts_through(const Space& space, std::span<const double> point,
                                  double tol = kDefaultTolerance);
// The first chart through F; UnreachablePoint when there is none.
Chart chart_at(const Space& space, std::span<const double> point);

// Points produced by generator plaques at pseudo-random parameters.
std::vector<Vector> sample_points(const Space& space, int count, std::uint64_t seed = 7);

Matrix jacobian(const SmoothMap& f, std::span<const double> point);
RankInfo probe_rank(const Space& space, std::span<const double> point);

// ---- linear structure -------------------------------------------------------

// Coordinates of a class in one chart (or one chart per factor for products).
struct ChartCoordinates {
  std::vector<int> charts;
  std::vector<Vector> blocks;

  Vector flat() const;
};

class LinearRealizer {
 public:
  virtual ~LinearRealizer() = default;

  // Coordinates of [p] at order n, p based at some F. NonLinearTangent when the
  // class is not carried by any linear chart at F.
  virtual ChartCoordinates read(const Space& space, const Plaque& p, int order) const = 0;
  virtual Plaque rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords,
                         int domain_dim, int order) const = 0;
  // A plaque in the class sum_i w_i [p_i].
  virtual Plaque combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                         int order) const;
  // Number of coordinate blocks produced by read().
  virtual int block_count() const { return 1; }
};

// Chart coordinates: [p] is read as the jet of psi with probe(g(psi)) ~ probe(p),
// g a generator chart through F.
class GeneratorRealizer final : public LinearRealizer {
 public:
  ChartCoordinates read(const Space& space, const Plaque& p, int order) const override;
  Plaque rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords, int domain_dim,
                 int order) const override;
  Plaque combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                 int order) const override;

  // psi for p in the given chart, or nothing when p is not carried by it.
  static std::optional<Jet> solve_in_chart(const Space& space, const Plaque& chart, const Plaque& p, int order,
                                           double tol = kDefaultTolerance);
  static Plaque rebuild_in_chart(const Plaque& chart, const Jet& psi);
};

class ProductRealizer final : public LinearRealizer {
 public:
  ProductRealizer(SpacePtr x, SpacePtr y) : x_(std::move(x)), y_(std::move(y)) {}

  ChartCoordinates read(const Space& space, const Plaque& p, int order) const override;
  Plaque rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords, int domain_dim,
                 int order) const override;
  Plaque combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                 int order) const override;

  int block_count() const override;
  std::pair<Plaque, Plaque> split(const Plaque& p) const;

 private:
  SpacePtr x_;
  SpacePtr y_;
};

// Order-1 structure transported from g / g(F): [b] |-> dK(xi)F.
class CoadjointRealizer final : public LinearRealizer {
 public:
  explicit CoadjointRealizer(MatrixGroup group) : group_(std::move(group)) {}

  ChartCoordinates read(const Space& space, const Plaque& p, int order) const override;
  Plaque rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords, int domain_dim,
                 int order) const override;

  // xi (dim x m, row-major) with dK(xi_col)F equal to the first derivatives of p.
  Matrix algebra_preimage(const Plaque& p) const;
  const MatrixGroup& group() const { return group_; }

 private:
  MatrixGroup group_;
};

// ---- constructors -------------------------------------------------------------

SpacePtr euclidean_space(int dim, int order = kSmoothOrder);
SpacePtr point_space();
SpacePtr product(SpacePtr x, SpacePtr y);
// Same ambient and probe as x, generators replaced. The membership predicate is
// sampled on every family (MembershipViolation).
SpacePtr subspace(SpacePtr x, std::vector<PlaqueFamily> families, std::string name,
                  std::function<bool(std::span<const double>)> membership, std::optional<int> manifold_dim = {});
// Generated by t |-> (a + t, 0) and t |-> (0, a + t).
SpacePtr crossing_curves();
// Unit circle in R^2, generated by t |-> (cos(a + t), sin(a + t)).
SpacePtr circle();
SpacePtr coadjoint_orbit(const MatrixGroup& group, Vector f0);

// ---- tangent-set summary ------------------------------------------------------

struct TangentComponent {
  std::string generator;
  int dimension = 0;
};

struct TangentReport {
  Vector base;
  int order = 1;
  std::vector<TangentComponent> components;
  // Rank of the order-n probe jets of all sampled curves.
  int span_dimension = 0;
  double span_gap = 0.0;
  bool linear = false;
};

TangentReport tangent_set_dimension(const Space& space, std::span<const double> point, int order,
                                    std::uint64_t seed = 11);

}  // namespace diffeo
