// Vector fields as derivations, local flows.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>
#include <sstream>

#include "criteria.hpp"
#include "diffeo/cli/spec_file.hpp"
#include "diffeo/diffeo.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace criteria {

using namespace diffeo;
using cli::ambient_expressions;

namespace {

SmoothMapPtr curve(const Vector& base, const std::vector<Vector>& coefficients) {
  std::vector<SmoothMapPtr> comps;
  for (std::size_t c = 0; c < base.size(); ++c) {
    std::vector<Monomial> terms{{{0}, base[c]}};
    for (std::size_t k = 0; k < coefficients.size(); ++k) terms.push_back({{static_cast<int>(k + 1)}, coefficients[k][c]});
    comps.push_back(polynomial_function(1, terms));
  }
  return stack(comps);
}

Vector random_vector(Rng& rng, int n, double lo, double hi) {
  Vector v(static_cast<std::size_t>(n));
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Case {
  std::string name;
  VectorField xi;
  std::vector<Vector> points;
  // pairs of plaques of the space agreeing to order 2
  std::vector<std::pair<Plaque, Plaque>> pairs;
};

std::vector<Case> derivation_cases(Rng& rng) {
  std::vector<Case> cases;
  {
    const SpacePtr plane = euclidean_space(2);
    Case c{"R2", make_field(plane, ambient_expressions({"x2 + 0.5", "1 - x1*x2"}, 2), "w"), {}, {}};
    for (int i = 0; i < 50; ++i) c.points.push_back(random_vector(rng, 2, -1.5, 1.5));
    for (int i = 0; i < 5; ++i) {
      const Vector base = random_vector(rng, 2, -1, 1), a = random_vector(rng, 2, -1, 1), b = random_vector(rng, 2, -1, 1);
      c.pairs.emplace_back(Plaque(curve(base, {a, b, random_vector(rng, 2, -1, 1)}), 1.0),
                           Plaque(curve(base, {a, b, random_vector(rng, 2, -1, 1)}), 1.0));
    }
    cases.push_back(std::move(c));
  }
  {
    const auto& spec = fixture::spec("circle");
    Case c{"circle", spec.fields.at(0), sample_points(*spec.space, 50, 61), {}};
    const SmoothMapPtr wrap = ambient_expressions({"cos(x1)", "sin(x1)"}, 1);
    for (int i = 0; i < 5; ++i) {
      const double a = uniform(rng, 0, 6), s1 = uniform(rng, -1, 1), s2 = uniform(rng, -1, 1);
      c.pairs.emplace_back(Plaque(compose(wrap, curve({a}, {{s1}, {s2}, {uniform(rng, -1, 1)}})), 1.0),
                           Plaque(compose(wrap, curve({a}, {{s1}, {s2}, {uniform(rng, -1, 1)}})), 1.0));
    }
    cases.push_back(std::move(c));
  }
  {
    const auto& spec = fixture::spec("so3_orbit");
    Case c{"so3", spec.fields.at(0), sample_points(*spec.space, 50, 67), {}};
    const SmoothMapPtr k = coadjoint_plaque_map(*spec.group, {0.0, 0.0, 1.0});
    for (int i = 0; i < 5; ++i) {
      const Vector a = random_vector(rng, 3, -1, 1), b = random_vector(rng, 3, -1, 1);
      c.pairs.emplace_back(Plaque(compose(k, curve({0, 0, 0}, {a, b, random_vector(rng, 3, -1, 1)})), 0.5),
                           Plaque(compose(k, curve({0, 0, 0}, {a, b, random_vector(rng, 3, -1, 1)})), 0.5));
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace

Result derivations() {
  Tally t(6, "fields act on functions as smooth derivations");
  try {
    Rng rng(606);
    double leibniz = 0.0, linear = 0.0, fd = 0.0, smooth = 0.0, smooth_fd = 0.0;
    int points = 0;
    for (const auto& c : derivation_cases(rng)) {
      const int d = c.xi.space->ambient_dim;
      const SmoothFunction f = ambient_expressions({d == 2 ? "sin(x1)*x2 + exp(0.3*x2)" : "sin(x1)*x2 + exp(0.3*x3)"}, d);
      const SmoothFunction g = ambient_expressions({d == 2 ? "x1^2 - cos(x2)" : "x1^2 - cos(x2) + x3*x1"}, d);
      const SmoothFunction xf = apply_derivation(c.xi, f), xg = apply_derivation(c.xi, g);
      const SmoothFunction xfg = apply_derivation(c.xi, product(f, g));
      const double a = 1.7, b = -0.4;
      const SmoothFunction xlin = apply_derivation(c.xi, linear_combination({f, g}, {a, b}));
      for (const auto& x : c.points) {
        ++points;
        const double fx = evaluate_scalar(*f, x), gx = evaluate_scalar(*g, x);
        const double dfx = evaluate_scalar(*xf, x), dgx = evaluate_scalar(*xg, x);
        const double expected = fx * dgx + gx * dfx;
        leibniz = std::max(leibniz, std::abs(evaluate_scalar(*xfg, x) - expected) /
                                        std::max({1.0, std::abs(fx * dgx), std::abs(gx * dfx)}));
        linear = std::max(linear, std::abs(evaluate_scalar(*xlin, x) - (a * dfx + b * dgx)) /
                                      std::max({1.0, std::abs(a * dfx), std::abs(b * dgx)}));
        // d/ds f(x + s V(x)) at 0
        const Vector v = c.xi.velocity->evaluate(x);
        const auto along = [&](const std::vector<double>& s) {
          Vector y = x;
          for (std::size_t i = 0; i < y.size(); ++i) y[i] += s[0] * v[i];
          return evaluate_scalar(*f, y);
        };
        fd = std::max(fd, rel(oracle::finite_difference(along, {0.0}, {1}, 0.05, 3), dfx));
      }
      for (const auto& [p1, p2] : c.pairs) {
        const Jet j1 = probe_jet(p1, 2, *xf), j2 = probe_jet(p2, 2, *xf);
        double scale = 1.0;
        for (double v : j1.raw()) scale = std::max(scale, std::abs(v));
        smooth = std::max(smooth, j1.max_abs_difference(j2) / scale);
        const auto on_plaque = [&](const std::vector<double>& r) { return evaluate_scalar(*xf, p1(r)); };
        for (int k = 0; k <= 2; ++k) {
          const double want = k == 0 ? on_plaque({0.0}) : oracle::finite_difference(on_plaque, {0.0}, {k}, 0.04, 3);
          smooth_fd = std::max(smooth_fd, rel(j1.at(static_cast<std::size_t>(k), 0), want));
        }
      }
    }
    t.within(leibniz, 1e-12, "Leibniz rule");
    t.within(linear, 1e-12, "linearity");
    t.within(fd, 1e-6, "xi(f) against a difference quotient along the velocity");
    t.within(smooth, 1e-10, "jets of xi(f) agree along order-2 equivalent plaques");
    t.within(smooth_fd, 1e-6, "jets of xi(f) along plaques against finite differences");
    std::ostringstream s;
    s << points << " points over R2, circle, SO(3) orbit: Leibniz " << leibniz << ", linearity " << linear << ", FD " << fd
      << ", jet agreement " << smooth << ", jet FD " << smooth_fd;
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

Result flows() {
  Tally t(7, "local flow axioms, rotation endpoint and field/flow round trip");
  try {
    Rng rng(707);
    const FlowOptions opts{1e-3, 10.0};
    const auto& circle_spec = fixture::spec("circle");
    const auto& plane_spec = fixture::spec("rotation");
    const VectorField rot_circle = circle_spec.fields.at(0);
    const VectorField rot_plane = plane_spec.fields.at(0);
    const VectorField linear = make_field(plane_spec.space, ambient_expressions({"0.3*x1 - x2", "0.5*x1 - 0.2*x2"}, 2), "A");
    const LocalFlowPtr phi_circle = flow_from_field(rot_circle, opts);
    const LocalFlowPtr phi_linear = flow_from_field(linear, opts);

    // (a) arity
    const Plaque arc = circle_spec.space->generators.at(0).make(Vector{0.0});
    const Plaque sheet(affine_map(2, 2, {1.0, 0.2, -0.3, 0.8}, {0.4, -0.7}), 1.0);
    const Plaque phi_arc = phi_circle->apply(arc), phi_sheet = phi_linear->apply(sheet);
    t.expect(phi_arc.domain_dim() == 2, "1-plaque goes to a 2-plaque");
    t.expect(phi_sheet.domain_dim() == 3, "2-plaque goes to a 3-plaque");

    // (b) phi(p)(r, 0) = p(r), bit for bit
    double initial = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double r = uniform(rng, -0.9, 0.9), s = uniform(rng, -0.9, 0.9);
      const Vector a = phi_arc(Vector{r, 0.0}), b = arc(Vector{r});
      const Vector c = phi_sheet(Vector{r, s, 0.0}), d = sheet(Vector{r, s});
      for (std::size_t k = 0; k < 2; ++k) initial = std::max({initial, std::abs(a[k] - b[k]), std::abs(c[k] - d[k])});
    }
    t.expect(initial == 0.0, "initial condition exact (" + std::to_string(initial) + ")");

    // (c) coherence where plaques meet: arc(0.5) = shifted(0), and p o psi against p at psi(s)
    double coherence = 0.0;
    const Plaque shifted = circle_spec.space->generators.at(0).make(Vector{0.5});
    const Plaque phi_shifted = phi_circle->apply(shifted);
    const SmoothMapPtr psi = ambient_expressions({"0.3*x1 + 0.2*x1^2", "-0.5*x1 + 0.1*x1^3"}, 1);
    const Plaque bent = precompose(sheet, psi, 0.5);
    const Plaque phi_bent = phi_linear->apply(bent);
    for (double time : {0.3, 1.0, -0.7, 2.5}) {
      const Vector a = phi_arc(Vector{0.5, time}), b = phi_shifted(Vector{0.0, time});
      for (std::size_t k = 0; k < 2; ++k) coherence = std::max(coherence, std::abs(a[k] - b[k]));
      for (double s : {-0.4, 0.1, 0.35}) {
        const Vector r = psi->evaluate(Vector{s});
        const Vector c = phi_bent(Vector{s, time}), d = phi_sheet(Vector{r[0], r[1], time});
        for (std::size_t k = 0; k < 2; ++k) coherence = std::max(coherence, std::abs(c[k] - d[k]));
      }
    }
    t.within(coherence, 1e-8, "coherence on coinciding plaques");

    // phi(p) is a plaque: its jet in (r, t) matches difference quotients
    double jet_fd = 0.0;
    {
      const Jet j = phi_sheet.jet(2);
      for (std::size_t i = 0; i < j.size(); ++i) {
        const MultiIndex& alpha = j.layout().index(i);
        const std::vector<int> e(alpha.entries().begin(), alpha.entries().end());
        for (int c = 0; c < 2; ++c) {
          const auto f = [&](const std::vector<double>& x) { return phi_sheet(x)[static_cast<std::size_t>(c)]; };
          const double want = alpha.degree() == 0 ? f({0, 0, 0}) : oracle::finite_difference(f, {0, 0, 0}, e, 0.04, 3);
          jet_fd = std::max(jet_fd, rel(j.at(i, c), want));
        }
      }
    }
    t.within(jet_fd, 1e-6, "flow plaque jet against finite differences");

    // Rotation endpoint and a general linear field against exp(tA).
    const Vector end = integrate(rot_plane, Vector{1.0, 0.0}, std::numbers::pi / 2, opts);
    Eigen::Matrix2d rot_a;
    rot_a << 0, -1, 1, 0;
    const Eigen::Vector2d rot_want = (rot_a * (std::numbers::pi / 2)).exp() * Eigen::Vector2d(1.0, 0.0);
    const double rot_err = std::max(std::abs(end[0] - rot_want(0)), std::abs(end[1] - rot_want(1)));
    t.within(rot_err, 1e-6, "rotation endpoint (1,0) -> (0,1)");
    t.within(std::max(std::abs(end[0]), std::abs(end[1] - 1.0)), 1e-6, "rotation endpoint is (0,1)");
    Eigen::Matrix2d lin_a;
    lin_a << 0.3, -1.0, 0.5, -0.2;
    const Vector lin_end = integrate(linear, Vector{0.4, -0.7}, 1.3, opts);
    const Eigen::Vector2d lin_want = (lin_a * 1.3).exp() * Eigen::Vector2d(0.4, -0.7);
    const double lin_err = std::max(std::abs(lin_end[0] - lin_want(0)), std::abs(lin_end[1] - lin_want(1)));
    t.within(lin_err, 1e-6, "linear field endpoint against exp(tA)");

    // field -> flow -> field
    double round = 0.0;
    for (const auto* xi : {&rot_circle, &linear, &fixture::spec("so3_orbit").fields.at(0)}) {
      const VectorField back = field_from_flow(xi->space, flow_from_field(*xi, opts), "back");
      for (const auto& x : sample_points(*xi->space, 20, 71)) {
        const Vector a = back.velocity->evaluate(x), b = xi->velocity->evaluate(x);
        for (std::size_t k = 0; k < a.size(); ++k) round = std::max(round, std::abs(a[k] - b[k]));
      }
    }
    // flow -> field -> flow
    const LocalFlowPtr translate = translation_flow({0.5, -1.2});
    const LocalFlowPtr again = flow_from_field(field_from_flow(plane_spec.space, translate, "v"), opts);
    const Plaque t1 = translate->apply(sheet), t2 = again->apply(sheet);
    for (int i = 0; i < 10; ++i) {
      const Vector r{uniform(rng, -0.9, 0.9), uniform(rng, -0.9, 0.9), uniform(rng, -3, 3)};
      const Vector a = t1(r), b = t2(r);
      for (std::size_t k = 0; k < 2; ++k) round = std::max(round, std::abs(a[k] - b[k]));
    }
    t.within(round, 1e-8, "field/flow round trip");

    std::ostringstream s;
    s << "arity ok, initial " << initial << ", coherence " << coherence << ", jet FD " << jet_fd << ", rotation endpoint error "
      << rot_err << ", exp(tA) error " << lin_err << ", round trip " << round;
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

}  // namespace criteria
