#include "diffeo/cli/spec_file.hpp"

#include <cmath>
#include <fstream>

namespace diffeo::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::kSpecParseError, msg); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing '" + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    bad(where + ": " + e.what());
  }
}

template <typename T>
T value_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j.at(key), where + "." + key);
}

expr::VariableTable ambient_table(int dim) {
  expr::VariableTable t;
  for (int i = 0; i < dim; ++i) t["x" + std::to_string(i + 1)] = i;
  return t;
}

std::vector<ExprPtr> parse_all(const std::vector<std::string>& texts, const expr::VariableTable& vars) {
  std::vector<ExprPtr> out;
  for (const auto& s : texts) out.push_back(expr::parse(s, vars));
  return out;
}

int parse_order(const json& doc) {
  if (!doc.contains("order_k")) return kSmoothOrder;
  const json& o = doc.at("order_k");
  if (o.is_string()) {
    if (o.get<std::string>() == "smooth") return kSmoothOrder;
    bad("order_k must be an integer or \"smooth\"");
  }
  const int k = get<int>(o, "order_k");
  if (k < 1) bad("order_k must be at least 1");
  return k;
}

PlaqueFamily parse_family(const json& g, int ambient, const std::string& where) {
  const auto name = value_or<std::string>(g, "name", "generator", where);
  const int n = value_or<int>(g, "domain_dim", 1, where);
  const int params = value_or<int>(g, "param_dim", 0, where);
  if (n < 1 || n > 4 || params < 0 || params > 4) bad(where + ": domain_dim in 1..4, param_dim in 0..4");
  expr::VariableTable vars;
  for (int i = 0; i < n; ++i) vars["r" + std::to_string(i + 1)] = i;
  vars["t"] = 0;
  for (int i = 0; i < params; ++i) vars["a" + std::to_string(i + 1)] = n + i;
  const auto texts = get<std::vector<std::string>>(need(g, "expressions", where), where + ".expressions");
  if (static_cast<int>(texts.size()) != ambient)
    bad(where + ": " + std::to_string(texts.size()) + " expressions for an ambient of dimension " +
        std::to_string(ambient));
  std::vector<std::pair<double, double>> box;
  if (g.contains("param_box")) {
    for (const auto& b : g.at("param_box")) {
      const auto lohi = get<std::vector<double>>(b, where + ".param_box");
      if (lohi.size() != 2) bad(where + ": param_box entries are [lo, hi]");
      box.emplace_back(lohi[0], lohi[1]);
    }
  } else {
    box.assign(static_cast<std::size_t>(params), {-1.0, 1.0});
  }
  if (static_cast<int>(box.size()) != params) bad(where + ": one param_box entry per parameter");
  const double radius = value_or<double>(g, "radius", 1.0, where);
  return make_family(name, n, params, expression_map(parse_all(texts, vars), n + params), radius, std::move(box));
}

std::function<bool(std::span<const double>)> parse_constraints(const json& doc, int dim, const std::string& where) {
  if (!doc.contains("constraints")) return {};
  const auto texts = get<std::vector<std::string>>(doc.at("constraints"), where + ".constraints");
  auto map = ambient_expressions(texts, dim);
  const double tol = value_or<double>(doc, "constraint_tol", 1e-9, where);
  return [map, tol](std::span<const double> p) {
    const Vector v = map->evaluate(p);
    for (double x : v)
      if (!(std::abs(x) <= tol)) return false;
    return true;
  };
}

SpacePtr parse_space(const json& doc, SpecFile* top, const std::string& where) {
  const auto kind = get<std::string>(need(doc, "kind", where), where + ".kind");
  const int order = parse_order(doc);
  SpacePtr space;
  if (kind == "euclidean") {
    const int d = get<int>(need(doc, "dimension", where), where + ".dimension");
    if (d < 1 || d > 8) bad(where + ": dimension must be in 1..8");
    space = euclidean_space(d, order);
  } else if (kind == "crossing_curves") {
    space = crossing_curves();
  } else if (kind == "coadjoint_orbit") {
    const auto id = get<std::string>(need(doc, "group", where), where + ".group");
    const auto base = get<Vector>(need(doc, "base", where), where + ".base");
    MatrixGroup group = MatrixGroup::builtin(id);
    space = coadjoint_orbit(group, base);
    if (top) top->group = group;
  } else if (kind == "product") {
    const json& factors = need(doc, "factors", where);
    if (!factors.is_array() || factors.size() < 2) bad(where + ": a product needs at least two factors");
    space = parse_space(factors[0], nullptr, where + ".factors[0]");
    for (std::size_t i = 1; i < factors.size(); ++i)
      space = product(space, parse_space(factors[i], nullptr, where + ".factors[" + std::to_string(i) + "]"));
  } else if (kind == "subspace") {
    SpacePtr ambient = parse_space(need(doc, "ambient", where), nullptr, where + ".ambient");
    std::vector<PlaqueFamily> families;
    const json& gens = need(doc, "generators", where);
    if (!gens.is_array() || gens.empty()) bad(where + ": generators must be a non-empty list");
    for (std::size_t i = 0; i < gens.size(); ++i)
      families.push_back(parse_family(gens[i], ambient->ambient_dim, where + ".generators[" + std::to_string(i) + "]"));
    std::optional<int> mdim;
    if (doc.contains("manifold_dim")) mdim = get<int>(doc.at("manifold_dim"), where + ".manifold_dim");
    space = subspace(ambient, std::move(families), value_or<std::string>(doc, "name", "subspace", where),
                     parse_constraints(doc, ambient->ambient_dim, where), mdim);
  } else {
    bad(where + ": unknown kind '" + kind + "'");
  }
  if (doc.contains("probe")) {
    const auto texts = get<std::vector<std::string>>(doc.at("probe"), where + ".probe");
    auto s = std::make_shared<Space>(*space);
    s->probe = ambient_expressions(texts, space->ambient_dim);
    space = s;
  }
  if (doc.contains("name") || (order != kSmoothOrder && kind != "euclidean")) {
    auto s = std::make_shared<Space>(*space);
    s->name = value_or<std::string>(doc, "name", space->name, where);
    if (order != kSmoothOrder) s->order_k = order;
    space = s;
  }
  return space;
}

std::vector<SmoothFunction> parse_ring(const json& r, int dim, std::vector<std::string>& names,
                                       const std::string& where) {
  const auto kind = get<std::string>(need(r, "kind", where), where + ".kind");
  if (kind == "harmonic") {
    const auto plane = value_or<std::vector<int>>(r, "plane", {1, 2}, where);
    if (plane.size() != 2 || plane[1] != plane[0] + 1 || plane[0] < 1 || plane[1] > dim)
      bad(where + ": plane must be two consecutive coordinates [i, i+1]");
    const int degree = get<int>(need(r, "degree", where), where + ".degree");
    if (degree < 0) bad(where + ": negative degree");
    return harmonic_ring(dim, plane[0] - 1, degree, &names);
  }
  if (kind == "monomial") {
    const int degree = get<int>(need(r, "degree", where), where + ".degree");
    if (degree < 0) bad(where + ": negative degree");
    auto caps = value_or<std::vector<int>>(r, "max_exponents", {}, where);
    if (!caps.empty() && static_cast<int>(caps.size()) != dim) bad(where + ": one max exponent per coordinate");
    return monomial_ring(dim, degree, &names, [caps](std::span<const int> e) {
      for (std::size_t i = 0; i < caps.size(); ++i)
        if (caps[i] >= 0 && e[i] > caps[i]) return false;
      return true;
    });
  }
  if (kind == "product") {
    const json& f = need(r, "factors", where);
    if (!f.is_array() || f.size() < 2) bad(where + ": product rings need at least two factors");
    std::vector<std::string> acc_names;
    auto acc = parse_ring(f[0], dim, acc_names, where + ".factors[0]");
    for (std::size_t i = 1; i < f.size(); ++i) {
      std::vector<std::string> nb, joined;
      auto b = parse_ring(f[i], dim, nb, where + ".factors[" + std::to_string(i) + "]");
      acc = product_ring(acc, b, &joined, acc_names, nb);
      acc_names = std::move(joined);
    }
    names = std::move(acc_names);
    return acc;
  }
  if (kind == "expressions") {
    const auto texts = get<std::vector<std::string>>(need(r, "functions", where), where + ".functions");
    std::vector<SmoothFunction> out;
    const auto vars = ambient_table(dim);
    for (const auto& t : texts) {
      out.push_back(expression_map({expr::parse(t, vars)}, dim));
      names.push_back(t);
    }
    return out;
  }
  bad(where + ": unknown ring kind '" + kind + "'");
}

Vector parse_point(const json& j, int dim, const std::string& where) {
  const auto p = get<Vector>(j, where);
  if (static_cast<int>(p.size()) != dim)
    bad(where + ": point has " + std::to_string(p.size()) + " coordinates, ambient has " + std::to_string(dim));
  return p;
}

}  // namespace

SmoothMapPtr ambient_expressions(const std::vector<std::string>& components, int dim) {
  if (components.empty()) bad("empty expression list");
  return expression_map(parse_all(components, ambient_table(dim)), dim);
}

SpecFile parse_spec(const json& doc) {
  if (!doc.is_object()) bad("spec must be a JSON object");
  SpecFile spec;
  spec.source = doc;
  spec.kind = get<std::string>(need(doc, "kind", "spec"), "spec.kind");
  spec.space = parse_space(doc, &spec, "spec");
  spec.name = value_or<std::string>(doc, "name", spec.space->name, "spec");
  const int dim = spec.space->ambient_dim;

  if (doc.contains("algebra")) {
    const json& a = doc.at("algebra");
    if (value_or<bool>(a, "coadjoint", false, "algebra")) {
      if (!spec.group) bad("algebra.coadjoint needs a coadjoint_orbit space");
      for (int i = 0; i < spec.group->dim(); ++i)
        spec.fields.push_back(make_field(spec.space, linear_map(dim, dim, spec.group->coadjoint_generator(i).data),
                                         "L" + std::to_string(i + 1)));
    }
    if (a.contains("fields")) {
      for (const auto& f : a.at("fields")) {
        const auto name = get<std::string>(need(f, "name", "algebra.fields"), "algebra.fields.name");
        const auto vel = get<std::vector<std::string>>(need(f, "velocity", "algebra.fields"), "algebra.fields.velocity");
        if (static_cast<int>(vel.size()) != dim) bad("field " + name + ": one velocity component per coordinate");
        spec.fields.push_back(make_field(spec.space, ambient_expressions(vel, dim), name));
      }
    }
    if (spec.fields.empty()) bad("algebra declares no fields");
  }

  if (doc.contains("basis")) {
    const json& b = doc.at("basis");
    FunctionBasis basis;
    if (b.contains("generators")) {
      const auto vars = ambient_table(dim);
      for (const auto& t : get<std::vector<std::string>>(b.at("generators"), "basis.generators"))
        basis.generators.push_back(expression_map({expr::parse(t, vars)}, dim));
    }
    const json& rings = need(b, "rings", "basis");
    if (!rings.is_array() || rings.empty()) bad("basis.rings must be a non-empty list (one ring per degree)");
    for (std::size_t i = 0; i < rings.size(); ++i) {
      std::vector<std::string> names;
      basis.rings.push_back(parse_ring(rings[i], dim, names, "basis.rings[" + std::to_string(i) + "]"));
      basis.names.push_back(std::move(names));
    }
    spec.basis = std::move(basis);
  }

  if (doc.contains("cohomology")) {
    spec.max_degree = value_or<int>(doc.at("cohomology"), "max_degree", 1, "cohomology");
    spec.samples = value_or<int>(doc.at("cohomology"), "samples", 0, "cohomology");
    if (spec.max_degree < 0) bad("cohomology.max_degree must be non-negative");
  }

  if (doc.contains("flow")) {
    const json& f = doc.at("flow");
    FlowSettings s;
    s.field = get<std::string>(need(f, "field", "flow"), "flow.field");
    s.point = parse_point(need(f, "point", "flow"), dim, "flow.point");
    s.t_end = value_or<double>(f, "t_end", 1.0, "flow");
    s.dt = value_or<double>(f, "dt", 1e-3, "flow");
    s.samples = value_or<int>(f, "samples", 4, "flow");
    if (!(s.dt > 0.0)) bad("flow.dt must be positive");
    if (s.samples < 1) bad("flow.samples must be positive");
    spec.flow = s;
  }

  if (doc.contains("tangent")) {
    const json& t = doc.at("tangent");
    TangentSettings s;
    s.point = parse_point(need(t, "point", "tangent"), dim, "tangent.point");
    s.order = value_or<int>(t, "order", 1, "tangent");
    spec.tangent = s;
  }

  if (doc.contains("verify") && doc.at("verify").contains("tangent")) {
    for (const auto& e : doc.at("verify").at("tangent")) {
      TangentExpectation x;
      x.point = parse_point(need(e, "point", "verify.tangent"), dim, "verify.tangent.point");
      if (e.contains("linear")) x.linear = get<bool>(e.at("linear"), "verify.tangent.linear");
      if (e.contains("span_dimension")) x.span_dimension = get<int>(e.at("span_dimension"), "verify.tangent");
      x.components = value_or<std::vector<int>>(e, "components", {}, "verify.tangent");
      spec.expectations.push_back(std::move(x));
    }
  }
  return spec;
}

SpecFile load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return parse_spec(doc);
}

}  // namespace diffeo::cli
