#include "diffeo/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace diffeo::cli {

namespace {

using nlohmann::json;

json num(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

json nums(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string point_text(std::span<const double> p) {
  std::ostringstream s;
  s << "(";
  for (std::size_t i = 0; i < p.size(); ++i) s << (i ? ", " : "") << p[i];
  s << ")";
  return s.str();
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : std::numeric_limits<double>::infinity();
}

class Checks {
 public:
  void add(const std::string& name, double residual, double threshold, const std::string& detail = {}) {
    const bool ok = residual <= threshold;
    json c{{"name", name}, {"passed", ok}, {"residual", num(residual)}, {"threshold", num(threshold)}};
    if (!detail.empty()) c["detail"] = detail;
    passed_ = passed_ && ok;
    list_.push_back(std::move(c));
  }
  void info(const std::string& name, double value, const std::string& detail) {
    list_.push_back({{"name", name}, {"passed", true}, {"informational", true}, {"value", num(value)}, {"detail", detail}});
  }
  void failure(const std::string& name, const Error& e) {
    passed_ = false;
    list_.push_back({{"name", name}, {"passed", false}, {"error", std::string(to_string(e.code()))}, {"detail", e.what()}});
  }
  bool passed() const { return passed_; }
  json list() const { return list_; }

 private:
  json list_ = json::array();
  bool passed_ = true;
};

// Runs `body`, recording a library failure as a failed check.
template <typename F>
void guarded(Checks& checks, const std::string& name, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    checks.failure(name, e);
  }
}

SmoothMapPtr polynomial_reparam(int n, std::mt19937_64& rng, double linear_scale = 1.0) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Jet j(n, 2, n);
  for (int i = 0; i < n; ++i) j.at(j.layout().position(MultiIndex::unit(n, i)), i) = linear_scale;
  for (std::size_t k = j.layout().degree_begin(2); k < j.size(); ++k)
    for (int c = 0; c < n; ++c) j.at(k, c) = unit(rng);
  return taylor_polynomial(j);
}

Vector random_params(const PlaqueFamily& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector a;
  for (const auto& [lo, hi] : f.param_box) a.push_back(lo + (hi - lo) * uniform(rng));
  return a;
}

// ---- suites ----------------------------------------------------------------------------

void plaque_suite(const SpecFile& spec, const RunOptions& o, Checks& checks) {
  const Space& space = *spec.space;
  const int order = space.smooth() ? 2 : std::min(2, space.order_k);
  std::mt19937_64 rng(23);
  int violations = 0, reparam = 0, outside = 0, comparisons = 0;
  for (const auto& family : space.generators) {
    for (int base = 0; base < 4; ++base) {
      const Plaque p = family.make(random_params(family, rng), space.name);
      if (space.membership && !space.membership(p.base())) ++outside;
      const int n = p.domain_dim();
      const double rho = 0.1 * std::min(1.0, p.radius());
      std::vector<Plaque> group{p};
      for (int v = 0; v < 3; ++v) group.push_back(precompose(p, polynomial_reparam(n, rng), rho));
      group.push_back(precompose(p, polynomial_reparam(n, rng, 2.0), rho * 0.5));
      const auto eq = [&](const Plaque& a, const Plaque& b) {
        ++comparisons;
        return equivalent_at(a, b, order, *space.probe, o.tol, space.order_k);
      };
      const std::size_t g = group.size();
      std::vector<std::vector<char>> rel(g, std::vector<char>(g));
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) rel[i][j] = eq(group[i], group[j]);
      for (std::size_t i = 0; i < g; ++i) {
        if (!rel[i][i]) ++violations;
        for (std::size_t j = 0; j < g; ++j) {
          if (rel[i][j] != rel[j][i]) ++violations;
          for (std::size_t k = 0; k < g; ++k)
            if (rel[i][j] && rel[j][k] && !rel[i][k]) ++violations;
        }
      }
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j) {
          if (!rel[i][j]) continue;
          const auto phi = polynomial_reparam(n, rng);
          const double r = 0.1 * std::min(group[i].radius(), group[j].radius());
          if (!eq(precompose(group[i], phi, r), precompose(group[j], phi, r))) ++reparam;
        }
    }
  }
  if (space.membership) checks.add("plaque.bases_in_space", outside, 0.0);
  checks.add("plaque.equivalence_laws", violations, 0.0,
             std::to_string(comparisons) + " comparisons at order " + std::to_string(order));
  checks.add("plaque.reparametrization", reparam, 0.0, "p1 ~ p2 implies p1 o phi ~ p2 o phi");
}

void tangent_suite(const SpecFile& spec, const RunOptions& o, Checks& checks) {
  const SpacePtr& space = spec.space;
  std::vector<TangentExpectation> targets = spec.expectations;
  if (targets.empty()) {
    TangentExpectation t;
    t.point = o.point ? *o.point : spec.tangent ? spec.tangent->point : sample_points(*space, 1, 3).front();
    targets.push_back(t);
  }
  for (const auto& t : targets) {
    const std::string at = point_text(t.point);
    guarded(checks, "tangent.report " + at, [&] {
      const TangentReport rep = tangent_set_dimension(*space, t.point, 1);
      if (t.linear) {
        const bool match = rep.linear == *t.linear;
        checks.add("tangent.linear " + at, match ? 0.0 : 1.0, 0.0,
                   std::string(rep.linear ? "linear" : "non-linear") + " at " + at +
                       (match ? ": expected" : ": unexpected"));
      }
      if (t.span_dimension)
        checks.add("tangent.span_dimension " + at, std::abs(rep.span_dimension - *t.span_dimension), 0.0,
                   "span " + std::to_string(rep.span_dimension));
      if (!t.components.empty()) {
        std::vector<int> got;
        for (const auto& c : rep.components) got.push_back(c.dimension);
        std::vector<int> want = t.components;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        checks.add("tangent.components " + at, got == want ? 0.0 : 1.0, 0.0,
                   std::to_string(got.size()) + " component(s)");
      }
      const auto charts = charts_through(*space, t.point);
      const TangentVector v = tangent_of(space, charts.front().plaque, 1);
      checks.add("tangent.projection " + at, max_abs_diff(project(v), t.point), o.tol);
      if (!rep.linear && charts.size() >= 2 &&
          charts[0].plaque.domain_dim() == charts[1].plaque.domain_dim()) {
        const TangentVector w = tangent_of(space, charts[1].plaque, 1);
        double refused = 1.0;
        try {
          add(v, w);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kNonLinearTangent) refused = 0.0;
        }
        checks.add("tangent.add_refused " + at, refused, 0.0, "sum across components raises NonLinearTangent");
      }
      if (rep.linear) {
        const TangentVector twice = add(v, v);
        checks.add("tangent.add_scale " + at, twice.class_jet.max_abs_difference(scale(v, 2.0).class_jet), 1e-8,
                   "v + v against 2v");
      }
    });
  }
}

struct TestFunctions {
  SmoothFunction f, g;
};

TestFunctions test_functions(const SpecFile& spec) {
  const int d = spec.space->ambient_dim;
  std::vector<std::string> quad;
  std::string sum;
  for (int i = 1; i <= d; ++i) sum += (i > 1 ? "+" : "") + ("x" + std::to_string(i) + "^2");
  return {ambient_expressions({"x1 + 0.5"}, d), ambient_expressions({sum + " + x" + std::to_string(d)}, d)};
}

void dynamics_suite(const SpecFile& spec, const RunOptions& o, Checks& checks) {
  if (spec.fields.empty()) {
    checks.info("dynamics.skipped", 0.0, "spec declares no field algebra");
    return;
  }
  const SpacePtr& space = spec.space;
  const int d = space->ambient_dim;
  std::optional<FieldAlgebra> algebra;
  guarded(checks, "dynamics.closure", [&] {
    algebra = FieldAlgebra::declare(space, spec.fields);
    checks.add("dynamics.closure_residual", algebra->closure_residual(), 1e-8,
               "brackets against the declared span, constant coefficients");
    checks.info("dynamics.jacobi_defect", algebra->jacobi_defect(), "measured, not asserted");
  });
  const auto samples = sample_points(*space, 12, 29);
  const auto [f, g] = test_functions(spec);
  const auto fg = product(f, g);
  const auto lin = linear_combination({f, g}, {1.0, 2.0});
  double leibniz = 0.0, linearity = 0.0, antisym = 0.0;
  for (std::size_t i = 0; i < spec.fields.size(); ++i) {
    const auto& xi = spec.fields[i];
    const auto xf = apply_derivation(xi, f), xg = apply_derivation(xi, g);
    const auto xfg = apply_derivation(xi, fg), xl = apply_derivation(xi, lin);
    for (const auto& s : samples) {
      const double a = evaluate_scalar(*xfg, s);
      const double b = evaluate_scalar(*xf, s) * evaluate_scalar(*g, s) + evaluate_scalar(*f, s) * evaluate_scalar(*xg, s);
      leibniz = std::max(leibniz, std::abs(a - b) / std::max(1.0, std::abs(a)));
      const double l = evaluate_scalar(*xl, s) - evaluate_scalar(*xf, s) - 2.0 * evaluate_scalar(*xg, s);
      linearity = std::max(linearity, std::abs(l));
    }
    for (std::size_t j = 0; j < spec.fields.size(); ++j) {
      const auto b1 = bracket(xi, spec.fields[j])(g), b2 = bracket(spec.fields[j], xi)(g);
      for (const auto& s : samples) antisym = std::max(antisym, std::abs(evaluate_scalar(*b1, s) + evaluate_scalar(*b2, s)));
    }
  }
  checks.add("dynamics.leibniz", leibniz, 1e-12, "xi(fg) = xi(f) g + f xi(g)");
  checks.add("dynamics.linearity", linearity, 1e-12);
  checks.add("dynamics.bracket_antisymmetry", antisym, 1e-12);

  guarded(checks, "dynamics.section", [&] {
    double proj = 0.0, vel = 0.0;
    for (const auto& xi : spec.fields)
      for (std::size_t k = 0; k < 4; ++k) {
        const Vector& s = samples[k];
        const TangentVector v = field_vector(xi, s);
        proj = std::max(proj, max_abs_diff(project(v), s));
        Vector m = xi.velocity->evaluate(s);
        Plaque line(affine_map(1, d, m, s), 1.0);
        vel = std::max(vel, v.class_jet.max_abs_difference(probe_jet(line, 1, *space->probe, space->order_k)));
      }
    checks.add("dynamics.section_projection", proj, o.tol, "project(xi(F)) = F");
    checks.add("dynamics.section_velocity", vel, 1e-8, "class of xi(F) against its velocity");
  });

  guarded(checks, "dynamics.flow", [&] {
    FlowOptions fo;
    if (o.dt) fo.dt = *o.dt;
    double initial = 0.0, round = 0.0;
    for (const auto& xi : spec.fields) {
      const auto flow = flow_from_field(xi, fo);
      const Plaque p = chart_at(*space, samples[0]).plaque;
      const Plaque moved = flow->apply(p);
      if (moved.domain_dim() != p.domain_dim() + 1) initial = std::numeric_limits<double>::infinity();
      Vector r(static_cast<std::size_t>(p.domain_dim()), 0.05);
      Vector rt = r;
      rt.push_back(0.0);
      initial = std::max(initial, max_abs_diff(moved(rt), p(r)));
      const auto back = field_from_flow(space, flow, xi.name);
      for (std::size_t k = 0; k < 6; ++k)
        round = std::max(round, max_abs_diff(back.velocity->evaluate(samples[k]), xi.velocity->evaluate(samples[k])));
    }
    checks.add("dynamics.flow_initial_condition", initial, 0.0, "phi(p)(r, 0) = p(r)");
    checks.add("dynamics.flow_round_trip", round, 1e-8, "field_from_flow(flow_from_field(xi)) = xi");
  });
}

void exterior_suite(const SpecFile& spec, const RunOptions& o, Checks& checks) {
  if (spec.fields.empty() || !spec.basis) {
    checks.info("exterior.skipped", 0.0, "spec declares no algebra and basis");
    return;
  }
  guarded(checks, "exterior", [&] {
    auto algebra = std::make_shared<FieldAlgebra>(FieldAlgebra::declare(spec.space, spec.fields));
    const int m = algebra->size();
    CohomologyOptions co;
    co.svd.relative = o.svd_tol;
    co.jobs = o.jobs;
    co.samples = spec.samples;
    CochainComplex complex(algebra, *spec.basis, std::max(0, m - 1), co);
    double dd = 0.0;
    for (int n = 0; n + 1 <= std::max(0, m - 1); ++n)
      dd = std::max(dd, multiply(complex.d_matrix(n + 1), complex.d_matrix(n)).max_abs());
    checks.add("exterior.d_squared", dd, 1e-10, "max |d_{n+1} d_n| on the represented complex");

    const auto& ring = spec.basis->ring(0);
    const auto samples = sample_points(*spec.space, 8, 31);
    const auto h1 = ring.size() > 1 ? ring[1] : ring[0];
    const auto h2 = ring.size() > 2 ? ring[2] : h1;
    const auto zero = exterior_derivative(DifferentialForm::function(algebra, h1, "h"));
    double consistency = 0.0;
    for (const auto& xi : algebra->fields()) {
      const auto a = zero({xi});
      const auto b = apply_derivation(xi, h1);
      for (const auto& s : samples) consistency = std::max(consistency, std::abs(evaluate_scalar(*a, s) - evaluate_scalar(*b, s)));
    }
    checks.add("exterior.degree_zero", consistency, 1e-12, "d h (xi) = xi(h)");
    if (m >= 2) {
      const auto alpha = DifferentialForm::exact(algebra, h1, "dh1");
      const auto beta = DifferentialForm::exact(algebra, h2, "dh2");
      const auto ab = wedge(alpha, beta), aa = wedge(alpha, alpha);
      const auto ddh = exterior_derivative(alpha);
      const auto& xs = algebra->fields();
      double anti = 0.0, self = 0.0, exact = 0.0;
      const auto f01 = ab({xs[0], xs[1]}), f10 = ab({xs[1], xs[0]}), s01 = aa({xs[0], xs[1]}), e01 = ddh({xs[0], xs[1]});
      for (const auto& s : samples) {
        anti = std::max(anti, std::abs(evaluate_scalar(*f01, s) + evaluate_scalar(*f10, s)));
        self = std::max(self, std::abs(evaluate_scalar(*s01, s)));
        exact = std::max(exact, std::abs(evaluate_scalar(*e01, s)));
      }
      checks.add("exterior.wedge_antisymmetry", anti, 1e-12);
      checks.add("exterior.wedge_self", self, 1e-12, "a ^ a = 0");
      checks.add("exterior.d_of_exact", exact, 1e-10, "d(dh) = 0 through the Koszul formula");
    }
  });
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSpecParseError: return kExitSpecParse;
    case ErrorCode::kBasisDegenerate: return kExitBasisDegenerate;
    case ErrorCode::kToleranceAmbiguous: return kExitToleranceAmbiguous;
    case ErrorCode::kStepOutOfDomain: return kExitStepOutOfDomain;
    case ErrorCode::kUnreachablePoint: return kExitUnreachablePoint;
    default: return kExitCheckFailure;
  }
}

json to_json(const CohomologyReport& r) {
  json sv = json::array();
  for (const auto& v : r.d_singular_values) sv.push_back(nums(v));
  return json{
      {"algebra", r.algebra},
      {"degrees", r.degrees},
      {"cochain_dim", r.cochain_dim},
      {"tensorial_dim", r.tensorial_dim},
      {"rank_d", r.rank_d},
      {"dim_Z", r.dim_z},
      {"dim_B", r.dim_b},
      {"betti", r.betti},
      {"d_gap", nums(r.d_gap)},
      {"tensorial_gap", nums(r.tensorial_gap)},
      {"ring_gap", nums(r.ring_gap)},
      {"d_singular_values", sv},
      {"d_squared", num(r.d_squared)},
      {"closure_residual", num(r.closure_residual)},
      {"jacobi_defect", num(r.jacobi_defect)},
      {"samples", r.samples},
      {"tolerances", {{"svd_relative", r.svd_relative}, {"min_gap", r.min_gap}}},
  };
}

json to_json(const TangentReport& r) {
  json comps = json::array();
  for (const auto& c : r.components) comps.push_back({{"generator", c.generator}, {"dimension", c.dimension}});
  std::string desc = std::to_string(r.components.size()) + " component(s), " + (r.linear ? "linear" : "non-linear");
  return json{{"base", r.base},
              {"order", r.order},
              {"components", comps},
              {"span_dimension", r.span_dimension},
              {"span_gap", num(r.span_gap)},
              {"linear", r.linear},
              {"description", desc}};
}

json run_verify(const SpecFile& spec, const RunOptions& o) {
  static const std::vector<std::string> known{"plaque", "tangent", "dynamics", "exterior", "all"};
  if (std::find(known.begin(), known.end(), o.suite) == known.end())
    fail(ErrorCode::kSpecParseError, "unknown suite '" + o.suite + "'");
  Checks checks;
  const bool all = o.suite == "all";
  if (all || o.suite == "plaque") guarded(checks, "plaque", [&] { plaque_suite(spec, o, checks); });
  if (all || o.suite == "tangent") guarded(checks, "tangent", [&] { tangent_suite(spec, o, checks); });
  if (all || o.suite == "dynamics") guarded(checks, "dynamics", [&] { dynamics_suite(spec, o, checks); });
  if (all || o.suite == "exterior") guarded(checks, "exterior", [&] { exterior_suite(spec, o, checks); });
  return json{{"suite", o.suite}, {"checks", checks.list()}, {"passed", checks.passed()},
              {"tolerances", {{"tol", o.tol}, {"svd_tol", o.svd_tol}}}};
}

json run_cohomology(const SpecFile& spec, const RunOptions& o) {
  if (spec.fields.empty() || !spec.basis)
    fail(ErrorCode::kSpecParseError, "cohomology needs 'algebra' and 'basis' blocks");
  auto algebra = std::make_shared<FieldAlgebra>(FieldAlgebra::declare(spec.space, spec.fields));
  CohomologyOptions co;
  co.svd.relative = o.svd_tol;
  co.jobs = o.jobs;
  co.samples = spec.samples;
  const int top = o.max_degree ? *o.max_degree : spec.max_degree;
  return json{{"cohomology", to_json(de_rham_cohomology(algebra, *spec.basis, top, co))}, {"max_degree", top}};
}

json run_flow(const SpecFile& spec, const RunOptions& o) {
  if (!spec.flow && !(o.field && o.point)) fail(ErrorCode::kSpecParseError, "flow needs a 'flow' block or flags");
  FlowSettings s = spec.flow.value_or(FlowSettings{});
  if (o.field) s.field = *o.field;
  if (o.point) s.point = *o.point;
  if (o.t_end) s.t_end = *o.t_end;
  if (o.dt) s.dt = *o.dt;
  const SpacePtr& space = spec.space;
  const auto it = std::find_if(spec.fields.begin(), spec.fields.end(), [&](const VectorField& f) { return f.name == s.field; });
  if (it == spec.fields.end()) fail(ErrorCode::kSpecParseError, "no field named '" + s.field + "'");
  if (static_cast<int>(s.point.size()) != space->ambient_dim)
    fail(ErrorCode::kSpecParseError, "flow point has the wrong number of coordinates");
  if (space->membership && !space->membership(s.point))
    fail(ErrorCode::kUnreachablePoint, point_text(s.point) + " is not on " + space->name);

  FlowOptions fo;
  fo.dt = s.dt;
  fo.horizon = std::max(10.0, std::abs(s.t_end));
  const VectorField& xi = *it;
  json traj = json::array();
  for (int k = 0; k <= s.samples; ++k) {
    const double t = s.t_end * k / s.samples;
    traj.push_back({{"t", t}, {"point", integrate(xi, s.point, t, fo)}});
  }
  const Vector endpoint = integrate(xi, s.point, s.t_end, fo);

  // Axioms on the ambient line through the point; the shifted copy meets it at r0.
  const auto flow = flow_from_field(xi, fo);
  const int d = space->ambient_dim;
  Vector dir(static_cast<std::size_t>(d), 0.0);
  dir[0] = 1.0;
  const Plaque p1(affine_map(1, d, dir, s.point), 1.0);
  const Vector r0{0.25};
  const Plaque p2 = shift_plaque(p1, r0);
  const Plaque moved = flow->apply(p1);
  const double initial = max_abs_diff(moved(Vector{r0[0], 0.0}), p1(r0));
  const double coherence =
      time_class(*flow, p1, r0, 2).max_abs_difference(time_class(*flow, p2, Vector{0.0}, 2));
  const auto back = field_from_flow(space, flow, xi.name);
  double round = 0.0;
  for (const auto& step : traj) {
    const Vector at = step["point"].get<Vector>();
    round = std::max(round, max_abs_diff(back.velocity->evaluate(at), xi.velocity->evaluate(at)));
  }
  return json{{"field", s.field},
              {"start", s.point},
              {"t_end", s.t_end},
              {"dt", s.dt},
              {"steps", static_cast<long>(std::ceil(std::abs(s.t_end) / s.dt - 1e-12))},
              {"endpoint", endpoint},
              {"trajectory", traj},
              {"axioms",
               {{"arity", moved.domain_dim() == p1.domain_dim() + 1},
                {"initial_condition_residual", num(initial)},
                {"coherence_residual", num(coherence)}}},
              {"round_trip_residual", num(round)}};
}

json run_tangent(const SpecFile& spec, const RunOptions& o) {
  TangentSettings s = spec.tangent.value_or(TangentSettings{});
  if (o.point) s.point = *o.point;
  if (o.order) s.order = *o.order;
  if (s.point.empty()) fail(ErrorCode::kSpecParseError, "tangent needs a point (spec 'tangent' block or --point)");
  if (static_cast<int>(s.point.size()) != spec.space->ambient_dim)
    fail(ErrorCode::kSpecParseError, "tangent point has the wrong number of coordinates");
  return json{{"tangent", to_json(tangent_set_dimension(*spec.space, s.point, s.order))}};
}

int run_command(const std::string& command, const std::filesystem::path& spec_path, const RunOptions& options,
                json& report, std::string& diagnostics) {
  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  report = json{{"command", command}, {"spec", spec_path.filename().string()}};
  try {
    const SpecFile spec = load_spec(spec_path);
    report["space"] = spec.name;
    json body;
    if (command == "verify") {
      body = run_verify(spec, options);
      if (!body["passed"].get<bool>()) {
        code = kExitCheckFailure;
        diagnostics += "verification failed\n";
      }
    } else if (command == "cohomology") {
      body = run_cohomology(spec, options);
    } else if (command == "flow") {
      body = run_flow(spec, options);
    } else if (command == "tangent") {
      body = run_tangent(spec, options);
    } else {
      fail(ErrorCode::kSpecParseError, "unknown command '" + command + "'");
    }
    report["results"] = std::move(body);
  } catch (const Error& e) {
    code = exit_code(e.code());
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    diagnostics += std::string(e.what()) + "\n";
  }
  report["exit_code"] = code;
  report["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return code;
}

}  // namespace diffeo::cli
