#include "diffeo/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "diffeo/expression.hpp"

namespace diffeo {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Non-constant coefficients of a jet, flattened.
Vector jet_tail(const Jet& j) {
  Vector out;
  for (std::size_t i = 1; i < j.size(); ++i) {
    const auto e = j.entry(i);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

Jet jet_from_tail(std::span<const double> tail, int num_vars, int order, int target_dim) {
  Jet j(num_vars, order, target_dim);
  require(tail.size() == (j.size() - 1) * static_cast<std::size_t>(target_dim), ErrorCode::kShapeMismatch,
          "coordinate vector does not match the jet shape");
  std::copy(tail.begin(), tail.end(), j.raw().begin() + target_dim);
  return j;
}

// Row-major first-derivative table of a jet: out(i, k) = d_k component_i.
Matrix first_derivatives(const Jet& j) {
  Matrix d(j.target_dim(), j.num_vars());
  for (int k = 0; k < j.num_vars(); ++k) {
    const std::size_t pos = j.layout().position(MultiIndex::unit(j.num_vars(), k));
    for (int i = 0; i < j.target_dim(); ++i) d(i, k) = j.at(pos, i);
  }
  return d;
}

void require_same_base(std::span<const Plaque> plaques, double tol = kDefaultTolerance) {
  require(!plaques.empty(), ErrorCode::kShapeMismatch, "combination of no classes");
  const Vector b0 = plaques[0].base();
  for (const auto& p : plaques) {
    require(p.domain_dim() == plaques[0].domain_dim(), ErrorCode::kShapeMismatch,
            "classes of different domain dimension");
    const Vector b = p.base();
    require(b.size() == b0.size(), ErrorCode::kShapeMismatch, "classes in different ambients");
    for (std::size_t i = 0; i < b.size(); ++i) {
      require(std::abs(b[i] - b0[i]) <= tol, ErrorCode::kBaseMismatch, "classes at different base points");
    }
  }
}

// Largest radius (<= 1) on which the Taylor polynomial of psi stays within `bound`.
double polynomial_radius(const Jet& psi, double bound) {
  Vector by_degree(static_cast<std::size_t>(psi.order() + 1), 0.0);
  for (std::size_t i = 1; i < psi.size(); ++i) {
    const auto& alpha = psi.layout().index(i);
    by_degree[static_cast<std::size_t>(alpha.degree())] += norm2(psi.entry(i)) / alpha.factorial();
  }
  double rho = 1.0;
  for (int tries = 0; tries < 60; ++tries) {
    double total = 0.0;
    for (std::size_t d = 1; d < by_degree.size(); ++d) total += by_degree[d] * std::pow(rho, static_cast<double>(d));
    if (total < bound) return rho;
    rho *= 0.5;
  }
  return rho;
}

std::optional<Location> numeric_locate(const PlaqueFamily& family, std::span<const double> point, double tol) {
  const int n = family.domain_dim;
  const int p = family.param_dim;
  const int total = n + p;
  std::mt19937_64 rng(0x10ca7e);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  auto clamp = [&](Vector& z) {
    const double rmax = 0.95 * family.radius;
    const double rn = norm2(std::span<const double>(z).first(static_cast<std::size_t>(n)));
    if (rn > rmax) {
      for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] *= rmax / rn;
    }
    for (int i = 0; i < p; ++i) {
      const auto [lo, hi] = family.param_box[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(n + i)] = std::clamp(z[static_cast<std::size_t>(n + i)], lo, hi);
    }
  };
  auto residual = [&](const Vector& z) {
    Vector f = family.joint->evaluate(z);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] -= point[i];
    return f;
  };

  std::vector<Vector> param_starts;
  {
    Vector center(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      const auto [lo, hi] = family.param_box[static_cast<std::size_t>(i)];
      center[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
    }
    param_starts.push_back(center);
    for (int k = 0; k < (p > 0 ? 6 : 0); ++k) {
      Vector a(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) {
        const auto [lo, hi] = family.param_box[static_cast<std::size_t>(i)];
        a[static_cast<std::size_t>(i)] = lo + (hi - lo) * 0.5 * (unit(rng) + 1.0);
      }
      param_starts.push_back(a);
    }
  }
  std::vector<Vector> r_starts{Vector(static_cast<std::size_t>(n), 0.0)};
  for (int k = 0; k < 4; ++k) {
    Vector r(static_cast<std::size_t>(n));
    for (double& x : r) x = 0.5 * family.radius * unit(rng) / std::sqrt(static_cast<double>(n));
    r_starts.push_back(r);
  }

  // Parameters alone first (a chart centred at the point), then everything.
  for (int stage = p > 0 ? 0 : 1; stage < 2; ++stage)
  for (const auto& a0 : param_starts) {
    for (const auto& r0 : r_starts) {
      if (stage == 0 && &r0 != &r_starts.front()) break;
      const int first = stage == 0 ? n : 0;
      Vector z = r0;
      z.insert(z.end(), a0.begin(), a0.end());
      Vector f = residual(z);
      double err = norm2(f);
      double lambda = 1e-3;
      for (int iter = 0; iter < 80 && std::isfinite(err); ++iter) {
        if (max_abs(f) <= 0.1 * tol) break;
        const Matrix j = jacobian(*family.joint, z);
        const int free = total - first;
        Matrix aug(j.rows + free, free);
        Vector rhs(static_cast<std::size_t>(j.rows + free), 0.0);
        for (int r = 0; r < j.rows; ++r) {
          for (int c = 0; c < free; ++c) aug(r, c) = j(r, first + c);
          rhs[static_cast<std::size_t>(r)] = -f[static_cast<std::size_t>(r)];
        }
        for (int c = 0; c < free; ++c) aug(j.rows + c, c) = std::sqrt(lambda);
        const Vector step = solve_least_squares(aug, rhs).solution;
        Vector trial = z;
        for (int c = 0; c < free; ++c) trial[static_cast<std::size_t>(first + c)] += step[static_cast<std::size_t>(c)];
        clamp(trial);
        Vector ft = residual(trial);
        const double et = norm2(ft);
        if (std::isfinite(et) && et < err) {
          z = std::move(trial);
          f = std::move(ft);
          err = et;
          lambda = std::max(lambda / 3.0, 1e-12);
        } else {
          lambda *= 4.0;
          if (lambda > 1e8) break;
        }
      }
      if (std::isfinite(err) && max_abs(f) <= tol) {
        Location loc;
        loc.r.assign(z.begin(), z.begin() + n);
        loc.params.assign(z.begin() + n, z.end());
        return loc;
      }
    }
  }
  return std::nullopt;
}

SmoothMapPtr parameter_slot(int domain_dim, std::span<const double> params) {
  const int p = static_cast<int>(params.size());
  const int out = domain_dim + p;
  Vector m(static_cast<std::size_t>(out * domain_dim), 0.0);
  for (int i = 0; i < domain_dim; ++i) m[static_cast<std::size_t>(i * domain_dim + i)] = 1.0;
  Vector offset(static_cast<std::size_t>(domain_dim), 0.0);
  offset.insert(offset.end(), params.begin(), params.end());
  return affine_map(domain_dim, out, std::move(m), std::move(offset));
}

std::vector<Vector> sample_ball(int dim, double radius, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector r(static_cast<std::size_t>(dim));
    for (double& x : r) x = gauss(rng);
    const double scale = radius * std::pow(uniform(rng), 1.0 / dim) / std::max(norm2(r), 1e-300);
    for (double& x : r) x *= scale;
    out.push_back(std::move(r));
  }
  return out;
}

Vector sample_params(const PlaqueFamily& family, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector a(static_cast<std::size_t>(family.param_dim));
  for (int i = 0; i < family.param_dim; ++i) {
    const auto [lo, hi] = family.param_box[static_cast<std::size_t>(i)];
    a[static_cast<std::size_t>(i)] = lo + (hi - lo) * uniform(rng);
  }
  return a;
}

}  // namespace

// ---- families and spaces --------------------------------------------------------

Plaque PlaqueFamily::make(std::span<const double> params, const std::string& tag) const {
  require(static_cast<int>(params.size()) == param_dim, ErrorCode::kShapeMismatch, "family parameter count");
  return Plaque(compose(joint, parameter_slot(domain_dim, params)), radius, tag);
}

PlaqueFamily make_family(std::string name, int domain_dim, int param_dim, SmoothMapPtr joint, double radius,
                         std::vector<std::pair<double, double>> param_box) {
  require(joint->in_dim() == domain_dim + param_dim, ErrorCode::kShapeMismatch,
          "family map must take plaque and parameter variables");
  require(static_cast<int>(param_box.size()) == param_dim, ErrorCode::kShapeMismatch, "parameter box size");
  PlaqueFamily f;
  f.name = std::move(name);
  f.domain_dim = domain_dim;
  f.param_dim = param_dim;
  f.joint = std::move(joint);
  f.radius = radius;
  f.param_box = std::move(param_box);
  return f;
}

void Space::check_order(int order) const {
  require(order >= 0, ErrorCode::kOrderExceeded, "negative order");
  require(smooth() || order <= order_k, ErrorCode::kOrderExceeded,
          "order " + std::to_string(order) + " exceeds the order " + std::to_string(order_k) + " of " + name);
}

std::optional<Location> locate_in_family(const PlaqueFamily& family, std::span<const double> point, double tol) {
  require(static_cast<int>(point.size()) == family.joint->out_dim(), ErrorCode::kShapeMismatch,
          "point outside the family's ambient");
  if (family.locate) return family.locate(point);
  return numeric_locate(family, point, tol);
}

std::vector<Chart> charts_through(const Space& space, std::span<const double> point, double tol) {
  require(static_cast<int>(point.size()) == space.ambient_dim, ErrorCode::kShapeMismatch,
          "point of the wrong dimension for " + space.name);
  std::vector<Chart> out;
  for (std::size_t i = 0; i < space.generators.size(); ++i) {
    const auto& family = space.generators[i];
    auto loc = locate_in_family(family, point, tol);
    if (!loc || norm2(loc->r) >= family.radius) continue;
    Plaque based = shift_plaque(family.make(loc->params, space.name), loc->r);
    out.push_back(Chart{static_cast<int>(i), std::move(*loc), std::move(based)});
  }
  return out;
}

Chart chart_at(const Space& space, std::span<const double> point) {
  auto charts = charts_through(space, point);
  if (charts.empty()) {
    std::string p;
    for (double x : point) p += (p.empty() ? "" : ", ") + std::to_string(x);
    fail(ErrorCode::kUnreachablePoint, "no generator of " + space.name + " passes through (" + p + ")");
  }
  return std::move(charts.front());
}

std::vector<Vector> sample_points(const Space& space, int count, std::uint64_t seed) {
  require(!space.generators.empty(), ErrorCode::kShapeMismatch, "space without generators");
  std::mt19937_64 rng(seed);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const auto& family = space.generators[static_cast<std::size_t>(k) % space.generators.size()];
    Vector z = sample_ball(family.domain_dim, 0.9 * family.radius, 1, rng).front();
    const Vector a = sample_params(family, rng);
    z.insert(z.end(), a.begin(), a.end());
    out.push_back(family.joint->evaluate(z));
  }
  return out;
}

Matrix jacobian(const SmoothMap& f, std::span<const double> point) {
  return first_derivatives(jet_at(f, point, 1));
}

RankInfo probe_rank(const Space& space, std::span<const double> point) {
  return numeric_rank(jacobian(*space.probe, point));
}

// ---- realizers --------------------------------------------------------------------

Vector ChartCoordinates::flat() const {
  Vector out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

Plaque LinearRealizer::combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                               int order) const {
  require(plaques.size() == weights.size(), ErrorCode::kShapeMismatch, "one weight per class");
  require_same_base(plaques);
  ChartCoordinates sum;
  for (std::size_t i = 0; i < plaques.size(); ++i) {
    ChartCoordinates c = read(space, plaques[i], order);
    if (i == 0) {
      sum = c;
      for (auto& b : sum.blocks)
        for (double& x : b) x *= weights[0];
      continue;
    }
    require(c.charts == sum.charts, ErrorCode::kNonLinearTangent, "classes are carried by different charts");
    for (std::size_t b = 0; b < c.blocks.size(); ++b)
      for (std::size_t k = 0; k < c.blocks[b].size(); ++k) sum.blocks[b][k] += weights[i] * c.blocks[b][k];
  }
  return rebuild(space, plaques[0].base(), sum, plaques[0].domain_dim(), order);
}

std::optional<Jet> GeneratorRealizer::solve_in_chart(const Space& space, const Plaque& chart, const Plaque& p,
                                                     int order, double tol) {
  const Jet target = probe_jet(p, order, *space.probe, space.order_k);
  const auto g = compose(space.probe, chart.map());
  const int k = chart.domain_dim();
  const Matrix j = jacobian(*g, Vector(static_cast<std::size_t>(k), 0.0));
  const Matrix jp = pseudo_inverse(j);
  Jet psi(p.domain_dim(), order, k);
  const double scale = 1.0 + max_abs(target.raw());
  for (int iter = 0; iter <= order; ++iter) {
    const Jet residual = jet_sub(target, g->evaluate(psi));
    if (max_abs(residual.raw()) <= 1e-3 * tol * scale) break;
    for (std::size_t i = 1; i < psi.size(); ++i) {
      const Vector step = multiply(jp, residual.entry(i));
      auto e = psi.entry(i);
      for (int c = 0; c < k; ++c) e[static_cast<std::size_t>(c)] += step[static_cast<std::size_t>(c)];
    }
  }
  const Jet residual = jet_sub(target, g->evaluate(psi));
  if (max_abs(residual.raw()) > tol * scale) return std::nullopt;
  return psi;
}

Plaque GeneratorRealizer::rebuild_in_chart(const Plaque& chart, const Jet& psi) {
  const double rho = polynomial_radius(psi, 0.5 * chart.radius());
  return Plaque(compose(chart.map(), taylor_polynomial(psi)), rho, chart.space_tag());
}

ChartCoordinates GeneratorRealizer::read(const Space& space, const Plaque& p, int order) const {
  space.check_order(order);
  const Vector base = p.base();
  const auto charts = charts_through(space, base);
  require(!charts.empty(), ErrorCode::kUnreachablePoint, "no generator of " + space.name + " passes through the base");
  for (std::size_t c = 0; c < charts.size(); ++c) {
    if (auto psi = solve_in_chart(space, charts[c].plaque, p, order)) {
      return ChartCoordinates{{static_cast<int>(c)}, {jet_tail(*psi)}};
    }
  }
  fail(ErrorCode::kNonLinearTangent, "class is not carried by any generator chart of " + space.name);
}

Plaque GeneratorRealizer::rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords,
                                  int domain_dim, int order) const {
  require(coords.charts.size() == 1 && coords.blocks.size() == 1, ErrorCode::kShapeMismatch,
          "chart coordinates expect one block");
  const auto charts = charts_through(space, base);
  const int c = coords.charts[0];
  require(c >= 0 && c < static_cast<int>(charts.size()), ErrorCode::kUnreachablePoint, "chart not available at base");
  const Plaque& chart = charts[static_cast<std::size_t>(c)].plaque;
  return rebuild_in_chart(chart, jet_from_tail(coords.blocks[0], domain_dim, order, chart.domain_dim()));
}

Plaque GeneratorRealizer::combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                                  int order) const {
  require(plaques.size() == weights.size(), ErrorCode::kShapeMismatch, "one weight per class");
  require_same_base(plaques);
  space.check_order(order);
  const auto charts = charts_through(space, plaques[0].base());
  require(!charts.empty(), ErrorCode::kUnreachablePoint, "no generator of " + space.name + " passes through the base");
  for (const auto& chart : charts) {
    std::optional<Jet> sum;
    bool carried = true;
    for (std::size_t i = 0; i < plaques.size() && carried; ++i) {
      auto psi = solve_in_chart(space, chart.plaque, plaques[i], order);
      if (!psi) {
        carried = false;
        break;
      }
      sum = sum ? jet_axpy(*sum, weights[i], *psi) : jet_scale(*psi, weights[i]);
    }
    if (carried) return rebuild_in_chart(chart.plaque, *sum);
  }
  fail(ErrorCode::kNonLinearTangent,
       "no generator chart of " + space.name + " carries all classes; the tangent set is not linear here");
}

int ProductRealizer::block_count() const { return x_->linear->block_count() + y_->linear->block_count(); }

std::pair<Plaque, Plaque> ProductRealizer::split(const Plaque& p) const {
  const int dx = x_->ambient_dim;
  const int dy = y_->ambient_dim;
  std::vector<int> ix(static_cast<std::size_t>(dx));
  std::vector<int> iy(static_cast<std::size_t>(dy));
  for (int i = 0; i < dx; ++i) ix[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < dy; ++i) iy[static_cast<std::size_t>(i)] = dx + i;
  return {Plaque(compose(coordinate_projection(dx + dy, ix), p.map()), p.radius(), x_->name),
          Plaque(compose(coordinate_projection(dx + dy, iy), p.map()), p.radius(), y_->name)};
}

ChartCoordinates ProductRealizer::read(const Space& space, const Plaque& p, int order) const {
  space.check_order(order);
  const auto [px, py] = split(p);
  ChartCoordinates cx = x_->linear->read(*x_, px, order);
  ChartCoordinates cy = y_->linear->read(*y_, py, order);
  cx.charts.insert(cx.charts.end(), cy.charts.begin(), cy.charts.end());
  cx.blocks.insert(cx.blocks.end(), cy.blocks.begin(), cy.blocks.end());
  return cx;
}

Plaque ProductRealizer::rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords,
                                int domain_dim, int order) const {
  (void)space;
  const auto nx = static_cast<std::size_t>(x_->linear->block_count());
  require(coords.blocks.size() == static_cast<std::size_t>(block_count()), ErrorCode::kShapeMismatch,
          "product coordinates block count");
  ChartCoordinates cx{{coords.charts.begin(), coords.charts.begin() + static_cast<std::ptrdiff_t>(nx)},
                      {coords.blocks.begin(), coords.blocks.begin() + static_cast<std::ptrdiff_t>(nx)}};
  ChartCoordinates cy{{coords.charts.begin() + static_cast<std::ptrdiff_t>(nx), coords.charts.end()},
                      {coords.blocks.begin() + static_cast<std::ptrdiff_t>(nx), coords.blocks.end()}};
  const auto dx = static_cast<std::size_t>(x_->ambient_dim);
  const Plaque px = x_->linear->rebuild(*x_, base.first(dx), cx, domain_dim, order);
  const Plaque py = y_->linear->rebuild(*y_, base.subspan(dx), cy, domain_dim, order);
  return Plaque(stack({px.map(), py.map()}), std::min(px.radius(), py.radius()), space.name);
}

Plaque ProductRealizer::combine(const Space& space, std::span<const Plaque> plaques, std::span<const double> weights,
                                int order) const {
  require(plaques.size() == weights.size(), ErrorCode::kShapeMismatch, "one weight per class");
  require_same_base(plaques);
  space.check_order(order);
  std::vector<Plaque> xs;
  std::vector<Plaque> ys;
  for (const auto& p : plaques) {
    auto [px, py] = split(p);
    xs.push_back(std::move(px));
    ys.push_back(std::move(py));
  }
  const Plaque px = x_->linear->combine(*x_, xs, weights, order);
  const Plaque py = y_->linear->combine(*y_, ys, weights, order);
  return Plaque(stack({px.map(), py.map()}), std::min(px.radius(), py.radius()), space.name);
}

Matrix CoadjointRealizer::algebra_preimage(const Plaque& p) const {
  const Matrix d = first_derivatives(p.jet(1));
  const Matrix m = group_.coadjoint_differential(p.base());
  return multiply(pseudo_inverse(m), d);
}

ChartCoordinates CoadjointRealizer::read(const Space& space, const Plaque& p, int order) const {
  space.check_order(order);
  require(order == 1, ErrorCode::kOrderExceeded, "coadjoint linear structure is first order");
  const Vector base = p.base();
  const Matrix d = first_derivatives(probe_jet(p, 1, *space.probe, space.order_k));
  const Matrix m = group_.coadjoint_differential(base);
  const Matrix xi = multiply(pseudo_inverse(m), d);
  const Matrix fit = multiply(m, xi);
  double err = 0.0;
  for (std::size_t i = 0; i < fit.data.size(); ++i) err = std::max(err, std::abs(fit.data[i] - d.data[i]));
  require(err <= kDefaultTolerance * (1.0 + d.max_abs()), ErrorCode::kNonLinearTangent,
          "first derivatives are not tangent to the orbit");
  const Matrix u = column_space(m.transpose());
  return ChartCoordinates{{0}, {multiply(u.transpose(), xi).data}};
}

Plaque CoadjointRealizer::rebuild(const Space& space, std::span<const double> base, const ChartCoordinates& coords,
                                  int domain_dim, int order) const {
  space.check_order(order);
  require(coords.blocks.size() == 1, ErrorCode::kShapeMismatch, "coadjoint coordinates expect one block");
  const Matrix m = group_.coadjoint_differential(base);
  const Matrix u = column_space(m.transpose());
  Matrix c(u.cols, domain_dim);
  require(c.data.size() == coords.blocks[0].size(), ErrorCode::kShapeMismatch, "coadjoint coordinate count");
  c.data = coords.blocks[0];
  const Matrix xi = multiply(u, c);
  return Plaque(compose(coadjoint_plaque_map(group_, Vector(base.begin(), base.end())),
                        linear_map(domain_dim, group_.dim(), xi.data)),
                1.0, space.name);
}

// ---- constructors -----------------------------------------------------------------

SpacePtr euclidean_space(int dim, int order) {
  require(dim >= 1, ErrorCode::kShapeMismatch, "euclidean dimension must be positive");
  Vector m(static_cast<std::size_t>(dim * 2 * dim), 0.0);
  for (int i = 0; i < dim; ++i) {
    m[static_cast<std::size_t>(i * 2 * dim + i)] = 1.0;
    m[static_cast<std::size_t>(i * 2 * dim + dim + i)] = 1.0;
  }
  PlaqueFamily chart = make_family("chart", dim, dim, linear_map(2 * dim, dim, std::move(m)), 1.0,
                                   std::vector<std::pair<double, double>>(static_cast<std::size_t>(dim), {-1.0, 1.0}));
  chart.locate = [dim](std::span<const double> f) -> std::optional<Location> {
    return Location{Vector(f.begin(), f.end()), Vector(static_cast<std::size_t>(dim), 0.0)};
  };
  auto s = std::make_shared<Space>();
  s->name = "R" + std::to_string(dim);
  s->ambient_dim = dim;
  s->order_k = order;
  s->generators = {std::move(chart)};
  s->probe = identity_map(dim);
  s->linear = std::make_shared<GeneratorRealizer>();
  s->manifold_dim = dim;
  s->ambient_open = true;
  return s;
}

SpacePtr point_space() {
  PlaqueFamily point = make_family("point", 1, 0, constant_map(1, {0.0}), 1.0, {});
  point.locate = [](std::span<const double> f) -> std::optional<Location> {
    if (std::abs(f[0]) > kDefaultTolerance) return std::nullopt;
    return Location{{}, {0.0}};
  };
  auto s = std::make_shared<Space>();
  s->name = "point";
  s->ambient_dim = 1;
  s->generators = {std::move(point)};
  s->probe = identity_map(1);
  s->linear = std::make_shared<GeneratorRealizer>();
  s->manifold_dim = 0;
  s->membership = [](std::span<const double> f) { return std::abs(f[0]) <= kDefaultTolerance; };
  return s;
}

namespace {

PlaqueFamily product_family(const PlaqueFamily& fx, const PlaqueFamily& fy) {
  const int n1 = fx.domain_dim;
  const int n2 = fy.domain_dim;
  const int p1 = fx.param_dim;
  const int p2 = fy.param_dim;
  const int total = n1 + n2 + p1 + p2;
  // (r1, r2, a1, a2) -> (r1, a1, r2, a2)
  std::vector<int> order;
  for (int i = 0; i < n1; ++i) order.push_back(i);
  for (int i = 0; i < p1; ++i) order.push_back(n1 + n2 + i);
  for (int i = 0; i < n2; ++i) order.push_back(n1 + i);
  for (int i = 0; i < p2; ++i) order.push_back(n1 + n2 + p1 + i);
  auto joint = compose(block_diagonal({fx.joint, fy.joint}), coordinate_projection(total, order));
  auto box = fx.param_box;
  box.insert(box.end(), fy.param_box.begin(), fy.param_box.end());
  PlaqueFamily f = make_family(fx.name + "*" + fy.name, n1 + n2, p1 + p2, std::move(joint),
                               std::min(fx.radius, fy.radius), std::move(box));
  const auto dx = static_cast<std::size_t>(fx.joint->out_dim());
  f.locate = [fx, fy, dx](std::span<const double> point) -> std::optional<Location> {
    auto lx = locate_in_family(fx, point.first(dx));
    if (!lx) return std::nullopt;
    auto ly = locate_in_family(fy, point.subspan(dx));
    if (!ly) return std::nullopt;
    Location loc{lx->params, lx->r};
    loc.params.insert(loc.params.end(), ly->params.begin(), ly->params.end());
    loc.r.insert(loc.r.end(), ly->r.begin(), ly->r.end());
    return loc;
  };
  return f;
}

void check_membership(const PlaqueFamily& family, const std::function<bool(std::span<const double>)>& member,
                      const std::string& name) {
  std::mt19937_64 rng(0x3e3b);
  for (int k = 0; k < 12; ++k) {
    const Vector a = sample_params(family, rng);
    for (auto r : sample_ball(family.domain_dim, 0.95 * family.radius, 8, rng)) {
      r.insert(r.end(), a.begin(), a.end());
      const Vector point = family.joint->evaluate(r);
      if (!member(point)) {
        std::string p;
        for (double x : point) p += (p.empty() ? "" : ", ") + std::to_string(x);
        fail(ErrorCode::kMembershipViolation, "generator " + family.name + " of " + name + " leaves the subset at (" +
                                                  p + ")");
      }
    }
  }
}

}  // namespace

SpacePtr product(SpacePtr x, SpacePtr y) {
  auto s = std::make_shared<Space>();
  s->name = x->name + "x" + y->name;
  s->ambient_dim = x->ambient_dim + y->ambient_dim;
  if (x->smooth()) {
    s->order_k = y->order_k;
  } else if (y->smooth()) {
    s->order_k = x->order_k;
  } else {
    s->order_k = std::min(x->order_k, y->order_k);
  }
  for (const auto& fx : x->generators)
    for (const auto& fy : y->generators) s->generators.push_back(product_family(fx, fy));
  s->probe = block_diagonal({x->probe, y->probe});
  if (x->linear && y->linear) s->linear = std::make_shared<ProductRealizer>(x, y);
  s->ambient_open = x->ambient_open && y->ambient_open;
  if (x->manifold_dim && y->manifold_dim) s->manifold_dim = *x->manifold_dim + *y->manifold_dim;
  const auto dx = static_cast<std::size_t>(x->ambient_dim);
  s->membership = [x, y, dx](std::span<const double> p) {
    return (!x->membership || x->membership(p.first(dx))) && (!y->membership || y->membership(p.subspan(dx)));
  };
  return s;
}

SpacePtr subspace(SpacePtr x, std::vector<PlaqueFamily> families, std::string name,
                  std::function<bool(std::span<const double>)> membership, std::optional<int> manifold_dim) {
  require(!families.empty(), ErrorCode::kShapeMismatch, "subspace needs generators");
  for (const auto& f : families) {
    require(f.joint->out_dim() == x->ambient_dim, ErrorCode::kShapeMismatch,
            "generator " + f.name + " does not land in the ambient of " + x->name);
    if (membership) check_membership(f, membership, name);
  }
  auto s = std::make_shared<Space>(*x);
  s->name = std::move(name);
  s->generators = std::move(families);
  s->linear = std::make_shared<GeneratorRealizer>();
  s->manifold_dim = manifold_dim;
  s->ambient_open = false;
  s->membership = std::move(membership);
  return s;
}

SpacePtr crossing_curves() {
  const std::vector<std::pair<double, double>> box{{-1.0, 1.0}};
  PlaqueFamily horizontal = make_family("horizontal", 1, 1, linear_map(2, 2, {1.0, 1.0, 0.0, 0.0}), 1.0, box);
  horizontal.locate = [](std::span<const double> f) -> std::optional<Location> {
    if (std::abs(f[1]) > kDefaultTolerance) return std::nullopt;
    return Location{{f[0]}, {0.0}};
  };
  PlaqueFamily vertical = make_family("vertical", 1, 1, linear_map(2, 2, {0.0, 0.0, 1.0, 1.0}), 1.0, box);
  vertical.locate = [](std::span<const double> f) -> std::optional<Location> {
    if (std::abs(f[0]) > kDefaultTolerance) return std::nullopt;
    return Location{{f[1]}, {0.0}};
  };
  return subspace(euclidean_space(2), {std::move(horizontal), std::move(vertical)}, "crossing_curves",
                  [](std::span<const double> p) { return std::abs(p[0] * p[1]) <= 1e-12; });
}

SpacePtr circle() {
  using namespace expr;
  const auto angle = add(variable(0), variable(1));
  auto joint = expression_map({call(ElementaryFunction::cos(), angle), call(ElementaryFunction::sin(), angle)}, 2);
  PlaqueFamily arc = make_family("arc", 1, 1, std::move(joint), 1.0, {{0.0, 2.0 * std::numbers::pi}});
  arc.locate = [](std::span<const double> f) -> std::optional<Location> {
    if (std::abs(f[0] * f[0] + f[1] * f[1] - 1.0) > kDefaultTolerance) return std::nullopt;
    return Location{{std::atan2(f[1], f[0])}, {0.0}};
  };
  return subspace(euclidean_space(2), {std::move(arc)}, "circle",
                  [](std::span<const double> p) { return std::abs(p[0] * p[0] + p[1] * p[1] - 1.0) <= 1e-9; }, 1);
}

SpacePtr coadjoint_orbit(const MatrixGroup& group, Vector f0) {
  require(static_cast<int>(f0.size()) == group.dim(), ErrorCode::kShapeMismatch,
          "base dual vector must have one entry per algebra basis element");
  auto s = std::make_shared<Space>();
  s->name = "orbit_" + group.id();
  s->ambient_dim = group.dim();
  s->order_k = 1;
  s->generators = {make_family("orbit", group.dim(), 0, coadjoint_plaque_map(group, f0), std::numbers::pi, {})};
  s->probe = identity_map(group.dim());
  s->linear = std::make_shared<CoadjointRealizer>(group);
  s->manifold_dim = numeric_rank(group.coadjoint_differential(f0)).rank;
  return s;
}

// ---- tangent-set summary -------------------------------------------------------------

TangentReport tangent_set_dimension(const Space& space, std::span<const double> point, int order,
                                    std::uint64_t seed) {
  space.check_order(order);
  require(order >= 1, ErrorCode::kOrderExceeded, "tangent sets need order >= 1");
  const auto charts = charts_through(space, point);
  if (charts.empty()) {
    std::string p;
    for (double x : point) p += (p.empty() ? "" : ", ") + std::to_string(x);
    fail(ErrorCode::kUnreachablePoint, "no generator of " + space.name + " passes through (" + p + ")");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<Plaque>> curves(charts.size());
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const Plaque& chart = charts[c].plaque;
    const int k = chart.domain_dim();
    const int count = k * order + 2;
    for (int i = 0; i < count; ++i) {
      Jet poly(1, order, k);
      double fact = 1.0;
      for (int d = 1; d <= order; ++d) {
        fact *= d;
        for (int j = 0; j < k; ++j) poly.at(static_cast<std::size_t>(d), j) = fact * unit(rng);
      }
      const double rho = polynomial_radius(poly, 0.5 * chart.radius());
      curves[c].push_back(precompose(chart, taylor_polynomial(poly), rho));
    }
  }

  TangentReport report;
  report.base.assign(point.begin(), point.end());
  report.order = order;

  // Chart c covers chart e when every sampled curve of e is carried by c.
  auto covers = [&](std::size_t c, std::size_t e) {
    for (const auto& curve : curves[e]) {
      if (!GeneratorRealizer::solve_in_chart(space, charts[c].plaque, curve, order)) return false;
    }
    return true;
  };
  std::vector<std::size_t> kept;
  for (std::size_t e = 0; e < charts.size(); ++e) {
    bool dominated = false;
    for (std::size_t c = 0; c < charts.size() && !dominated; ++c) {
      if (c == e || !covers(c, e)) continue;
      dominated = !covers(e, c) || c < e;
    }
    if (!dominated) kept.push_back(e);
  }
  for (std::size_t e : kept) {
    std::vector<Vector> rows;
    for (const auto& curve : curves[e]) {
      rows.push_back(jet_tail(*GeneratorRealizer::solve_in_chart(space, charts[e].plaque, curve, order)));
    }
    const int width = static_cast<int>(rows.front().size());
    report.components.push_back(
        {space.generators[static_cast<std::size_t>(charts[e].family)].name,
         numeric_rank(Matrix::from_rows(rows, width)).rank});
  }

  std::vector<Vector> jets;
  std::vector<Plaque> all;
  for (const auto& group : curves) {
    for (const auto& curve : group) {
      jets.push_back(jet_tail(probe_jet(curve, order, *space.probe, space.order_k)));
      all.push_back(curve);
    }
  }
  const RankInfo span = numeric_rank(Matrix::from_rows(jets, static_cast<int>(jets.front().size())));
  report.span_dimension = span.rank;
  report.span_gap = span.gap;

  report.linear = report.components.size() == 1;
  if (report.linear && space.linear && all.size() > 1) {
    Vector weights;
    for (std::size_t i = 0; i < all.size(); ++i) weights.push_back(unit(rng));
    try {
      (void)space.linear->combine(space, all, weights, order);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonLinearTangent) throw;
      report.linear = false;
    }
  }
  return report;
}

}  // namespace diffeo
