#pragma once

// Vector fields as sections of the first tangent bundle, their action on
// functions as derivations, brackets, declared closed field algebras, and
// the correspondence between fields and local flows.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diffeo/tangent.hpp"

namespace diffeo {

// The section F |-> xi(F) is stored through its ambient velocity V(F); the
// class at F is the order-1 class of any curve through F with velocity V(F).
struct VectorField {
  SpacePtr space;
  SmoothMapPtr velocity;
  std::string name;
};

VectorField make_field(SpacePtr space, SmoothMapPtr velocity, std::string name);
VectorField zero_field(SpacePtr space);
// f . xi
VectorField scale_field(const VectorField& xi, SmoothFunction f);
VectorField combine_fields(const std::vector<VectorField>& fields, std::span<const double> weights,
                           std::string name = {});

// xi(F) as a tangent vector: the straight line F + tV(F) read through the
// space's linear structure and rebuilt as a plaque of the space.
TangentVector field_vector(const VectorField& xi, std::span<const double> point);

// F |-> d/dt f(curve_F(t)) at t = 0, jet-evaluable along plaques.
SmoothFunction apply_derivation(const VectorField& xi, SmoothFunction f);

class Derivation {
 public:
  Derivation(std::function<SmoothFunction(const SmoothFunction&)> action, std::string name)
      : action_(std::move(action)), name_(std::move(name)) {}

  SmoothFunction operator()(const SmoothFunction& f) const { return action_(f); }
  const std::string& name() const { return name_; }

 private:
  std::function<SmoothFunction(const SmoothFunction&)> action_;
  std::string name_;
};

Derivation as_derivation(const VectorField& xi);
// B(xi1, xi2) f = xi1 xi2 f - xi2 xi1 f.
Derivation bracket(const VectorField& xi1, const VectorField& xi2);
// Ambient velocity of a derivation at F, read off the coordinate functions.
Vector derivation_velocity(const Derivation& d, int ambient_dim, std::span<const double> point);

struct AlgebraOptions {
  int samples = 24;
  std::uint64_t seed = 5;
  double closure_tol = 1e-6;
};

// A declared bracket-closed family with constant structure coefficients:
// B(xi_i, xi_j) = sum_k c_ij^k xi_k.
class FieldAlgebra {
 public:
  static FieldAlgebra declare(SpacePtr space, std::vector<VectorField> fields, const AlgebraOptions& options = {});

  const SpacePtr& space() const { return space_; }
  const std::vector<VectorField>& fields() const { return fields_; }
  int size() const { return static_cast<int>(fields_.size()); }
  int index_of(const std::string& name) const;

  const Vector& structure(int i, int j) const;
  VectorField resolve(int i, int j) const;
  // Largest least-squares residual met while building the closure table.
  double closure_residual() const { return closure_residual_; }
  const std::vector<Vector>& samples() const { return samples_; }

  // Coefficients of an arbitrary derivation in the algebra's constant span;
  // AlgebraNotClosed when the residual exceeds the tolerance.
  Vector express(const Derivation& d, double* residual = nullptr) const;

  // max |B(B(x,y),z) + B(B(y,z),x) + B(B(z,x),y)| over the structure table;
  // informational only.
  double jacobi_defect() const;

 private:
  SpacePtr space_;
  std::vector<VectorField> fields_;
  std::vector<Vector> samples_;
  std::vector<std::vector<Vector>> table_;
  double closure_residual_ = 0.0;
  double tol_ = 1e-6;
};

VectorField resolve_bracket(const FieldAlgebra& algebra, const VectorField& xi1, const VectorField& xi2,
                            double* residual = nullptr);

// ---- local flows -------------------------------------------------------------

class LocalFlow {
 public:
  virtual ~LocalFlow() = default;
  // An n-plaque p goes to the (n+1)-plaque (r, t) |-> phi(p)(r, t).
  virtual Plaque apply(const Plaque& p) const = 0;
  virtual double time_radius() const = 0;
};

using LocalFlowPtr = std::shared_ptr<const LocalFlow>;

struct FlowOptions {
  double dt = 1e-3;
  double horizon = 10.0;
};

// Classical fourth-order Runge-Kutta on the ambient velocity, fixed step.
LocalFlowPtr flow_from_field(const VectorField& xi, const FlowOptions& options = {});
LocalFlowPtr translation_flow(Vector v, double horizon = 10.0);
LocalFlowPtr identity_flow(double horizon = 10.0);

// Pointwise trajectory endpoint of the field from x over time t.
Vector integrate(const VectorField& xi, std::span<const double> x, double t, const FlowOptions& options = {});

// xi_phi(F) = [phi(p)(r0, t)]_t, read with the identity plaque of the ambient.
VectorField field_from_flow(SpacePtr space, LocalFlowPtr flow, std::string name);

// Jet in t of t |-> phi(p)(r, t) at t = 0.
Jet time_class(const LocalFlow& flow, const Plaque& p, std::span<const double> r, int order);

}  // namespace diffeo
