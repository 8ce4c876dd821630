#include "diffeo/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace diffeo {

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Velocity evaluation with domain failures reported as leaving the domain.
template <typename Arg>
auto velocity_at(const SmoothMap& v, const Arg& x) {
  try {
    return v.evaluate(x);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDomainError || e.code() == ErrorCode::kProbeDomainError)
      fail(ErrorCode::kStepOutOfDomain, std::string("trajectory left the field's domain: ") + e.what());
    throw;
  }
}

int step_count(double t, double dt, double horizon) {
  require(std::isfinite(t) && std::abs(t) <= horizon, ErrorCode::kStepOutOfDomain,
          "time " + std::to_string(t) + " outside the flow horizon " + std::to_string(horizon));
  require(dt > 0.0, ErrorCode::kStepOutOfDomain, "step size must be positive");
  return static_cast<int>(std::ceil(std::abs(t) / dt - 1e-12));
}

Vector rk4(const SmoothMap& v, Vector y, double t, double dt, double horizon) {
  const int n = step_count(t, dt, horizon);
  if (n == 0) return y;
  const double h = t / n;
  const std::size_t d = y.size();
  Vector tmp(d);
  for (int s = 0; s < n; ++s) {
    const Vector k1 = velocity_at(v, std::span<const double>(y));
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const Vector k2 = velocity_at(v, std::span<const double>(tmp));
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const Vector k3 = velocity_at(v, std::span<const double>(tmp));
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
    const Vector k4 = velocity_at(v, std::span<const double>(tmp));
    for (std::size_t i = 0; i < d; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    require(finite(y), ErrorCode::kStepOutOfDomain, "trajectory is no longer finite");
  }
  return y;
}

Jet rk4(const SmoothMap& v, Jet y, double t, double dt, double horizon) {
  const int n = step_count(t, dt, horizon);
  if (n == 0) return y;
  const double h = t / n;
  for (int s = 0; s < n; ++s) {
    const Jet k1 = velocity_at(v, y);
    const Jet k2 = velocity_at(v, jet_axpy(y, 0.5 * h, k1));
    const Jet k3 = velocity_at(v, jet_axpy(y, 0.5 * h, k2));
    const Jet k4 = velocity_at(v, jet_axpy(y, h, k3));
    Jet incr = jet_axpy(jet_axpy(k1, 2.0, k2), 2.0, k3) + k4;
    y = jet_axpy(y, h / 6.0, incr);
    require(y.is_finite(), ErrorCode::kStepOutOfDomain, "trajectory is no longer finite");
  }
  return y;
}

// (r, t) |-> Phi_t(p(r)) for the field's ambient velocity.
class FlowPlaqueMap final : public SmoothMap {
 public:
  FlowPlaqueMap(SmoothMapPtr p, SmoothMapPtr velocity, FlowOptions options)
      : p_(std::move(p)), v_(std::move(velocity)), options_(options) {}

  int in_dim() const override { return p_->in_dim() + 1; }
  int out_dim() const override { return p_->out_dim(); }

  Vector evaluate(std::span<const double> x) const override {
    const int n = p_->in_dim();
    Vector y = p_->evaluate(x.first(static_cast<std::size_t>(n)));
    return rk4(*v_, std::move(y), x[static_cast<std::size_t>(n)], options_.dt, options_.horizon);
  }

  Jet evaluate(const Jet& x) const override {
    const int n = p_->in_dim();
    const int k = x.order();
    const Vector at = x.value();
    const Jet c = Jet::identity(at, k);
    std::vector<Jet> r;
    for (int i = 0; i < n; ++i) r.push_back(c.component(i));
    const Jet y0 = p_->evaluate(n == 0 ? Jet(n + 1, k, 0, at) : Jet::stack(r));
    // Jets in r travel with the discrete map up to t0, the t-dependence about t0
    // comes from Picard iteration of the exact equation.
    const Jet y = rk4(*v_, y0, at[static_cast<std::size_t>(n)], options_.dt, options_.horizon);
    Jet z = y;
    for (int it = 0; it <= k; ++it) z = y + antiderivative(velocity_at(*v_, z), n).truncate(k);
    require(z.is_finite(), ErrorCode::kStepOutOfDomain, "trajectory is no longer finite");
    return jet_compose(z, x);
  }

 private:
  SmoothMapPtr p_;
  SmoothMapPtr v_;
  FlowOptions options_;
};

class FieldFlow final : public LocalFlow {
 public:
  FieldFlow(SmoothMapPtr velocity, FlowOptions options) : v_(std::move(velocity)), options_(options) {}

  Plaque apply(const Plaque& p) const override {
    require(p.ambient_dim() == v_->in_dim(), ErrorCode::kShapeMismatch, "plaque and field ambients differ");
    return Plaque(std::make_shared<FlowPlaqueMap>(p.map(), v_, options_), std::min(p.radius(), options_.horizon),
                  p.space_tag());
  }
  double time_radius() const override { return options_.horizon; }

 private:
  SmoothMapPtr v_;
  FlowOptions options_;
};

// (r, t) |-> r
SmoothMapPtr leading(int n) {
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) keep.push_back(i);
  return coordinate_projection(n + 1, keep);
}

class TranslationFlow final : public LocalFlow {
 public:
  TranslationFlow(Vector v, double horizon) : v_(std::move(v)), horizon_(horizon) {}

  Plaque apply(const Plaque& p) const override {
    require(p.ambient_dim() == static_cast<int>(v_.size()), ErrorCode::kShapeMismatch, "translation dimension");
    const int n = p.domain_dim();
    auto moved = product(coordinate_projection(n + 1, {n}), constant_map(n + 1, v_));
    auto map = linear_combination({compose(p.map(), leading(n)), moved}, {1.0, 1.0});
    return Plaque(map, std::min(p.radius(), horizon_), p.space_tag());
  }
  double time_radius() const override { return horizon_; }

 private:
  Vector v_;
  double horizon_;
};

class IdentityFlow final : public LocalFlow {
 public:
  explicit IdentityFlow(double horizon) : horizon_(horizon) {}

  Plaque apply(const Plaque& p) const override {
    return Plaque(compose(p.map(), leading(p.domain_dim())), std::min(p.radius(), horizon_), p.space_tag());
  }
  double time_radius() const override { return horizon_; }

 private:
  double horizon_;
};

// x |-> d/dt phi(id)(x, t) at t = 0.
class FlowVelocityMap final : public SmoothMap {
 public:
  FlowVelocityMap(SmoothMapPtr flowed, int dim) : flowed_(std::move(flowed)), dim_(dim) {}

  int in_dim() const override { return dim_; }
  int out_dim() const override { return dim_; }

  Jet evaluate(const Jet& x) const override {
    const int k = x.num_vars();
    const int order = x.order();
    Jet wide = extend(x, 1, order + 1);
    Jet in(k + 1, order + 1, dim_ + 1, Vector(wide.origin().begin(), wide.origin().end()));
    for (std::size_t i = 0; i < wide.size(); ++i)
      for (int c = 0; c < dim_; ++c) in.at(i, c) = wide.at(i, c);
    in.at(in.layout().position(MultiIndex::unit(k + 1, k)), dim_) = 1.0;
    const Jet along = flowed_->evaluate(in);
    return slice(partial_derivative(along, k), k);
  }

 private:
  SmoothMapPtr flowed_;
  int dim_;
};

SmoothMapPtr coordinate(int dim, int l) { return coordinate_projection(dim, {l}); }

Vector stacked_velocities(const std::vector<Vector>& samples, const std::function<Vector(const Vector&)>& at) {
  Vector out;
  for (const Vector& s : samples) {
    Vector v = at(s);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace

VectorField make_field(SpacePtr space, SmoothMapPtr velocity, std::string name) {
  require(velocity->in_dim() == space->ambient_dim && velocity->out_dim() == space->ambient_dim,
          ErrorCode::kShapeMismatch, "field velocity must map the ambient to itself");
  return VectorField{std::move(space), std::move(velocity), std::move(name)};
}

VectorField zero_field(SpacePtr space) {
  const int d = space->ambient_dim;
  return make_field(std::move(space), constant_map(d, Vector(static_cast<std::size_t>(d), 0.0)), "0");
}

VectorField scale_field(const VectorField& xi, SmoothFunction f) {
  require(f->out_dim() == 1, ErrorCode::kNonScalarTarget, "field coefficients are functions");
  return make_field(xi.space, product(std::move(f), xi.velocity), "f*" + xi.name);
}

VectorField combine_fields(const std::vector<VectorField>& fields, std::span<const double> weights, std::string name) {
  require(!fields.empty() && fields.size() == weights.size(), ErrorCode::kShapeMismatch, "one weight per field");
  std::vector<SmoothMapPtr> maps;
  for (const auto& f : fields) maps.push_back(f.velocity);
  return make_field(fields[0].space, linear_combination(std::move(maps), Vector(weights.begin(), weights.end())),
                    std::move(name));
}

TangentVector field_vector(const VectorField& xi, std::span<const double> point) {
  const Space& space = *xi.space;
  const int d = space.ambient_dim;
  const Vector v = xi.velocity->evaluate(point);
  Vector m(v);
  auto line = affine_map(1, d, std::move(m), Vector(point.begin(), point.end()));
  Plaque straight(line, 1.0, space.name);
  if (!space.linear || space.ambient_open) return tangent_of(xi.space, straight, 1);
  const ChartCoordinates coords = space.linear->read(space, straight, 1);
  return tangent_of(xi.space, space.linear->rebuild(space, point, coords, 1, 1), 1);
}

SmoothFunction apply_derivation(const VectorField& xi, SmoothFunction f) {
  require(f->out_dim() == 1, ErrorCode::kNonScalarTarget, "derivations act on functions");
  require(f->in_dim() == xi.space->ambient_dim, ErrorCode::kShapeMismatch, "function outside the field's ambient");
  return directional_derivative(std::move(f), xi.velocity);
}

Derivation as_derivation(const VectorField& xi) {
  return Derivation([xi](const SmoothFunction& f) { return apply_derivation(xi, f); }, xi.name);
}

Derivation bracket(const VectorField& xi1, const VectorField& xi2) {
  require(xi1.space->ambient_dim == xi2.space->ambient_dim, ErrorCode::kShapeMismatch, "fields on different spaces");
  return Derivation(
      [xi1, xi2](const SmoothFunction& f) {
        auto a = apply_derivation(xi1, apply_derivation(xi2, f));
        auto b = apply_derivation(xi2, apply_derivation(xi1, f));
        return linear_combination({a, b}, {1.0, -1.0});
      },
      "[" + xi1.name + "," + xi2.name + "]");
}

Vector derivation_velocity(const Derivation& d, int ambient_dim, std::span<const double> point) {
  Vector out;
  for (int l = 0; l < ambient_dim; ++l) out.push_back(evaluate_scalar(*d(coordinate(ambient_dim, l)), point));
  return out;
}

FieldAlgebra FieldAlgebra::declare(SpacePtr space, std::vector<VectorField> fields, const AlgebraOptions& options) {
  require(!fields.empty(), ErrorCode::kShapeMismatch, "an algebra needs at least one field");
  FieldAlgebra a;
  a.space_ = space;
  a.fields_ = std::move(fields);
  a.tol_ = options.closure_tol;
  a.samples_ = sample_points(*space, options.samples, options.seed);
  const int m = a.size();
  a.table_.assign(static_cast<std::size_t>(m), std::vector<Vector>(static_cast<std::size_t>(m),
                                                                     Vector(static_cast<std::size_t>(m), 0.0)));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double residual = 0.0;
      Vector c = a.express(bracket(a.fields_[i], a.fields_[j]), &residual);
      a.closure_residual_ = std::max(a.closure_residual_, residual);
      a.table_[i][j] = c;
      for (double& x : c) x = -x;
      a.table_[j][i] = c;
    }
  }
  return a;
}

int FieldAlgebra::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (fields_[static_cast<std::size_t>(i)].name == name) return i;
  fail(ErrorCode::kAlgebraNotClosed, "field '" + name + "' is not in the algebra");
}

const Vector& FieldAlgebra::structure(int i, int j) const {
  require(i >= 0 && j >= 0 && i < size() && j < size(), ErrorCode::kShapeMismatch, "field index out of range");
  return table_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

VectorField FieldAlgebra::resolve(int i, int j) const {
  return combine_fields(fields_, structure(i, j), "[" + fields_[i].name + "," + fields_[j].name + "]");
}

Vector FieldAlgebra::express(const Derivation& d, double* residual) const {
  const int dim = space_->ambient_dim;
  const int m = size();
  const Vector rhs =
      stacked_velocities(samples_, [&](const Vector& s) { return derivation_velocity(d, dim, s); });
  std::vector<Vector> columns;
  for (const auto& f : fields_)
    columns.push_back(stacked_velocities(samples_, [&](const Vector& s) { return f.velocity->evaluate(s); }));
  const Matrix a = Matrix::from_columns(columns, static_cast<int>(rhs.size()));
  LeastSquares ls = solve_least_squares(a, rhs);
  if (residual) *residual = ls.residual;
  require(ls.residual <= tol_, ErrorCode::kAlgebraNotClosed,
          d.name() + " is outside the declared span (residual " + std::to_string(ls.residual) + ")");
  ls.solution.resize(static_cast<std::size_t>(m), 0.0);
  return ls.solution;
}

double FieldAlgebra::jacobi_defect() const {
  const int m = size();
  // B(B(a,b),c) has coefficients sum_k c_ab^k c_kc.
  auto nested = [&](int a, int b, int c) {
    Vector out(static_cast<std::size_t>(m), 0.0);
    const Vector& ab = structure(a, b);
    for (int k = 0; k < m; ++k) {
      const Vector& kc = structure(k, c);
      for (int l = 0; l < m; ++l) out[l] += ab[k] * kc[l];
    }
    return out;
  };
  double worst = 0.0;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z) {
        const Vector u = nested(x, y, z), v = nested(y, z, x), w = nested(z, x, y);
        for (int l = 0; l < m; ++l) worst = std::max(worst, std::abs(u[l] + v[l] + w[l]));
      }
  return worst;
}

VectorField resolve_bracket(const FieldAlgebra& algebra, const VectorField& xi1, const VectorField& xi2,
                            double* residual) {
  const Vector c = algebra.express(bracket(xi1, xi2), residual);
  return combine_fields(algebra.fields(), c, "[" + xi1.name + "," + xi2.name + "]");
}

LocalFlowPtr flow_from_field(const VectorField& xi, const FlowOptions& options) {
  return std::make_shared<FieldFlow>(xi.velocity, options);
}

LocalFlowPtr translation_flow(Vector v, double horizon) {
  return std::make_shared<TranslationFlow>(std::move(v), horizon);
}

LocalFlowPtr identity_flow(double horizon) { return std::make_shared<IdentityFlow>(horizon); }

Vector integrate(const VectorField& xi, std::span<const double> x, double t, const FlowOptions& options) {
  return rk4(*xi.velocity, Vector(x.begin(), x.end()), t, options.dt, options.horizon);
}

VectorField field_from_flow(SpacePtr space, LocalFlowPtr flow, std::string name) {
  const int d = space->ambient_dim;
  Plaque id(identity_map(d), flow->time_radius(), space->name);
  const Plaque flowed = flow->apply(id);
  require(flowed.domain_dim() == d + 1, ErrorCode::kShapeMismatch, "a flow adds exactly one time variable");
  return make_field(std::move(space), std::make_shared<FlowVelocityMap>(flowed.map(), d), std::move(name));
}

Jet time_class(const LocalFlow& flow, const Plaque& p, std::span<const double> r, int order) {
  const int n = p.domain_dim();
  require(static_cast<int>(r.size()) == n, ErrorCode::kShapeMismatch, "r must lie in the plaque's domain");
  const Plaque flowed = flow.apply(p);
  require(flowed.domain_dim() == n + 1, ErrorCode::kShapeMismatch, "a flow adds exactly one time variable");
  Vector m(static_cast<std::size_t>(n + 1), 0.0);
  m[static_cast<std::size_t>(n)] = 1.0;
  Vector offset(r.begin(), r.end());
  offset.push_back(0.0);
  auto curve = compose(flowed.map(), affine_map(1, n + 1, std::move(m), std::move(offset)));
  return jet_at(*curve, Vector{0.0}, order);
}

}  // namespace diffeo
