// Jet arithmetic, order-n equivalence, the chain rule.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "criteria.hpp"
#include "diffeo/diffeo.hpp"
#include "oracles.hpp"

namespace criteria {

using namespace diffeo;

namespace {

using PointFn = std::function<double(const std::vector<double>&)>;

// An expression for the library and an evaluator for the oracle, built side by side.
struct Pair {
  ExprPtr e;
  PointFn f;
};

Pair leaf(Rng& rng, int vars) {
  if (uniform(rng, 0, 1) < 0.7) {
    const int i = static_cast<int>(rng() % static_cast<unsigned>(vars));
    return {expr::variable(i), [i](const std::vector<double>& x) { return x[static_cast<std::size_t>(i)]; }};
  }
  const double c = uniform(rng, -1.5, 1.5);
  return {expr::constant(c), [c](const std::vector<double>&) { return c; }};
}

// c + u^2, positive everywhere
Pair lifted(const Pair& u, double c) {
  return {expr::add(expr::constant(c), expr::mul(u.e, u.e)), [f = u.f, c](const std::vector<double>& x) {
            const double v = f(x);
            return c + v * v;
          }};
}

Pair random_pair(Rng& rng, int vars, int depth) {
  if (depth == 0) return leaf(rng, vars);
  const Pair a = random_pair(rng, vars, depth - 1);
  switch (rng() % 12) {
    case 0: {
      const Pair b = random_pair(rng, vars, depth - 1);
      return {expr::add(a.e, b.e), [f = a.f, g = b.f](const std::vector<double>& x) { return f(x) + g(x); }};
    }
    case 1: {
      const Pair b = random_pair(rng, vars, depth - 1);
      return {expr::sub(a.e, b.e), [f = a.f, g = b.f](const std::vector<double>& x) { return f(x) - g(x); }};
    }
    case 2: {
      const Pair b = random_pair(rng, vars, depth - 1);
      return {expr::mul(a.e, b.e), [f = a.f, g = b.f](const std::vector<double>& x) { return f(x) * g(x); }};
    }
    case 3:
      return {expr::neg(a.e), [f = a.f](const std::vector<double>& x) { return -f(x); }};
    case 4:
      return {expr::call(ElementaryFunction::sin(), a.e), [f = a.f](const std::vector<double>& x) { return std::sin(f(x)); }};
    case 5:
      return {expr::call(ElementaryFunction::cos(), a.e), [f = a.f](const std::vector<double>& x) { return std::cos(f(x)); }};
    case 6: {
      // exp of a bounded argument keeps magnitudes moderate
      const Pair s{expr::call(ElementaryFunction::sin(), a.e), [f = a.f](const std::vector<double>& x) { return std::sin(f(x)); }};
      return {expr::call(ElementaryFunction::exp(), s.e), [f = s.f](const std::vector<double>& x) { return std::exp(f(x)); }};
    }
    case 7: {
      const Pair b = lifted(a, uniform(rng, 0.5, 1.5));
      return {expr::call(ElementaryFunction::log(), b.e), [f = b.f](const std::vector<double>& x) { return std::log(f(x)); }};
    }
    case 8: {
      const Pair b = lifted(a, uniform(rng, 0.5, 1.5));
      return {expr::call(ElementaryFunction::sqrt(), b.e), [f = b.f](const std::vector<double>& x) { return std::sqrt(f(x)); }};
    }
    case 9: {
      const Pair b = lifted(a, uniform(rng, 0.5, 1.5));
      return {expr::div(expr::constant(1.0), b.e), [f = b.f](const std::vector<double>& x) { return 1.0 / f(x); }};
    }
    case 10: {
      const Pair b = lifted(a, uniform(rng, 0.5, 1.5));
      const double p = std::array<double, 3>{-0.5, 1.5, 2.5}[rng() % 3];
      return {expr::pow(b.e, expr::constant(p)), [f = b.f, p](const std::vector<double>& x) { return std::pow(f(x), p); }};
    }
    default: {
      const int k = 2 + static_cast<int>(rng() % 2);
      return {expr::pow(a.e, expr::constant(k)), [f = a.f, k](const std::vector<double>& x) { return std::pow(f(x), k); }};
    }
  }
}

Jet evaluate_at(const ExprPtr& e, const std::vector<double>& point, int order) {
  const Jet id = Jet::identity(point, order);
  std::vector<Jet> vars;
  for (int i = 0; i < id.target_dim(); ++i) vars.push_back(id.component(i));
  return expr::evaluate(e, std::span<const Jet>(vars));
}

std::vector<int> entries(const MultiIndex& a) { return {a.entries().begin(), a.entries().end()}; }

// Worst relative error of every derivative in the jet against finite differences.
double fd_error(const Jet& jet, const PointFn& f, const std::vector<double>& point) {
  double worst = 0.0;
  for (std::size_t i = 0; i < jet.size(); ++i) {
    const MultiIndex& alpha = jet.layout().index(i);
    const double exact = jet.at(i, 0);
    const double fd = alpha.degree() == 0 ? f(point) : oracle::finite_difference(f, point, entries(alpha), 0.01, 4);
    worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
  }
  return worst;
}

Jet random_jet(Rng& rng, int vars, int order, int target, Vector origin = {}) {
  Jet j(vars, order, target, std::move(origin));
  for (auto& v : j.raw()) v = uniform(rng, -2.0, 2.0);
  return j;
}

double scaled_difference(const Jet& a, const Jet& b) {
  double scale = 1.0;
  for (double v : a.raw()) scale = std::max(scale, std::abs(v));
  return a.max_abs_difference(b) / scale;
}

std::string point_text(const std::vector<double>& x) {
  std::ostringstream s;
  s << "(";
  for (std::size_t i = 0; i < x.size(); ++i) s << (i ? ", " : "") << x[i];
  s << ")";
  return s.str();
}

// Polynomial map R^in -> R^out, degrees 0..degree, random coefficients.
SmoothMapPtr random_polynomial_map(Rng& rng, int in, int out, int degree, double scale, bool fix_origin = false,
                                   int min_degree = 0) {
  const auto layout = JetLayout::get(in, degree);
  std::vector<SmoothMapPtr> comps;
  for (int c = 0; c < out; ++c) {
    std::vector<Monomial> terms;
    for (const auto& alpha : layout->indices()) {
      if (alpha.degree() < min_degree || (fix_origin && alpha.degree() == 0)) continue;
      terms.push_back({entries(alpha), uniform(rng, -scale, scale)});
    }
    comps.push_back(polynomial_function(in, terms));
  }
  return stack(comps);
}

// base + sum_k coefficients[k-1] r^k, one variable.
SmoothMapPtr curve(const Vector& base, const std::vector<Vector>& coefficients) {
  std::vector<SmoothMapPtr> comps;
  for (std::size_t c = 0; c < base.size(); ++c) {
    std::vector<Monomial> terms{{{0}, base[c]}};
    for (std::size_t k = 0; k < coefficients.size(); ++k) terms.push_back({{static_cast<int>(k + 1)}, coefficients[k][c]});
    comps.push_back(polynomial_function(1, terms));
  }
  return stack(comps);
}

}  // namespace

Result jets() {
  Tally t(1, "jet derivatives against finite differences, Leibniz and truncation identities");
  try {
    Rng rng(101);
    // Catalog: each univariate function through an affine argument of three variables.
    struct Entry {
      ElementaryFunction fn;
      std::function<double(double)> oracle;
      double lo, hi;
    };
    const std::vector<Entry> catalog = {
        {ElementaryFunction::identity(), [](double x) { return x; }, -2, 2},
        {ElementaryFunction::exp(), [](double x) { return std::exp(x); }, -1, 1},
        {ElementaryFunction::sin(), [](double x) { return std::sin(x); }, -2, 2},
        {ElementaryFunction::cos(), [](double x) { return std::cos(x); }, -2, 2},
        {ElementaryFunction::log(), [](double x) { return std::log(x); }, 0.6, 2},
        {ElementaryFunction::reciprocal(), [](double x) { return 1.0 / x; }, 0.6, 2},
        {ElementaryFunction::sqrt(), [](double x) { return std::sqrt(x); }, 0.6, 2},
        {ElementaryFunction::pow(2.5), [](double x) { return std::pow(x, 2.5); }, 0.6, 2},
        {ElementaryFunction::pow(-1.5), [](double x) { return std::pow(x, -1.5); }, 0.6, 2},
        {ElementaryFunction::polynomial({1.0, -2.0, 0.5, 3.0}), [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x; }, -1, 1},
    };
    double catalog_worst = 0.0;
    for (const auto& entry : catalog) {
      for (int trial = 0; trial < 3; ++trial) {
        const double w[3] = {uniform(rng, 0.2, 0.8), uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8)};
        const std::vector<double> point{uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1)};
        const double c = 0.5 * (entry.lo + entry.hi);
        const ExprPtr arg = expr::add(
            expr::constant(c),
            expr::add(expr::mul(expr::constant(w[0]), expr::variable(0)),
                      expr::add(expr::mul(expr::constant(w[1]), expr::variable(1)), expr::mul(expr::constant(w[2]), expr::variable(2)))));
        const ExprPtr e = expr::call(entry.fn, arg);
        const PointFn f = [&, c, w](const std::vector<double>& x) { return entry.oracle(c + w[0] * x[0] + w[1] * x[1] + w[2] * x[2]); };
        const double err = fd_error(evaluate_at(e, point, 3), f, point);
        catalog_worst = std::max(catalog_worst, err);
        t.within(err, 1e-6, "catalog " + entry.fn.name() + " at " + point_text(point));
      }
    }

    // Random compositions.
    double random_worst = 0.0;
    int built = 0;
    while (built < 100) {
      const int vars = 1 + static_cast<int>(rng() % 3);
      const int order = 1 + static_cast<int>(rng() % 3);
      const Pair p = random_pair(rng, vars, 1 + static_cast<int>(rng() % 3));
      std::vector<double> point(static_cast<std::size_t>(vars));
      for (auto& x : point) x = uniform(rng, -0.8, 0.8);
      const Jet jet = evaluate_at(p.e, point, order);
      // Skip draws whose scale makes a difference quotient meaningless.
      if (!jet.is_finite() || std::abs(jet.scalar()) > 1e3) continue;
      ++built;
      const double err = fd_error(jet, p.f, point);
      random_worst = std::max(random_worst, err);
      t.within(err, 1e-6, "composition " + std::to_string(built) + " at " + point_text(point));
    }

    // Leibniz rule on derivative-style coefficients, checked entry by entry.
    double leibniz = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Jet a = random_jet(rng, 3, 3, 1), b = random_jet(rng, 3, 3, 1);
      const Jet c = a * b;
      const auto& layout = c.layout();
      for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto alpha = entries(layout.index(i));
        double expected = 0.0, scale = 1.0;
        for (int b0 = 0; b0 <= alpha[0]; ++b0)
          for (int b1 = 0; b1 <= alpha[1]; ++b1)
            for (int b2 = 0; b2 <= alpha[2]; ++b2) {
              auto binom = [](int n, int k) {
                double r = 1;
                for (int q = 1; q <= k; ++q) r = r * (n - k + q) / q;
                return r;
              };
              const std::vector<int> beta{b0, b1, b2}, rest{alpha[0] - b0, alpha[1] - b1, alpha[2] - b2};
              const double term = binom(alpha[0], b0) * binom(alpha[1], b1) * binom(alpha[2], b2) *
                                  a.at(layout.position(beta), 0) * b.at(layout.position(rest), 0);
              expected += term;
              scale = std::max(scale, std::abs(term));
            }
        leibniz = std::max(leibniz, std::abs(c.at(i, 0) - expected) / scale);
      }
    }
    t.within(leibniz, 1e-12, "Leibniz table");

    // Truncation coherence: truncating commutes with products, lifts, composition and expressions.
    double coherence = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Jet a = random_jet(rng, 3, 3, 1), b = random_jet(rng, 3, 3, 1);
      for (int k = 0; k <= 2; ++k) {
        coherence = std::max(coherence, scaled_difference((a * b).truncate(k), a.truncate(k) * b.truncate(k)));
        Jet shifted = a;
        shifted.at(0, 0) = 0.3;
        coherence = std::max(coherence, scaled_difference(lift(ElementaryFunction::sin(), shifted).truncate(k),
                                                          lift(ElementaryFunction::sin(), shifted.truncate(k))));
      }
      const Jet inner = random_jet(rng, 2, 3, 3);
      const Jet outer = random_jet(rng, 3, 3, 2, inner.value());
      for (int k = 0; k <= 2; ++k)
        coherence = std::max(coherence, scaled_difference(jet_compose(outer, inner).truncate(k),
                                                          jet_compose(outer.truncate(k), inner.truncate(k))));
      const Pair p = random_pair(rng, 3, 2);
      const std::vector<double> point{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
      const Jet full = evaluate_at(p.e, point, 3);
      if (full.is_finite())
        for (int k = 0; k <= 2; ++k)
          coherence = std::max(coherence, scaled_difference(full.truncate(k), evaluate_at(p.e, point, k)));
    }
    t.within(coherence, 1e-12, "truncation coherence");

    std::ostringstream s;
    s << "catalog worst rel err " << catalog_worst << ", 100 compositions worst " << random_worst << ", Leibniz "
      << leibniz << ", truncation " << coherence;
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

Result equivalence() {
  Tally t(2, "order-n equivalence laws and reparametrization consistency");
  try {
    Rng rng(202);
    struct Member {
      Plaque p;
      int group;  // plaques of different groups live on different spaces
      int cls;
      int idx;
    };
    std::vector<Member> set;
    const SpacePtr plane = euclidean_space(2);
    const SpacePtr circle_space = circle();
    // R^2: 8 classes of order-2 jets at one base, 5 members each differing from order 3 on.
    const Vector base{0.3, -0.2};
    for (int c = 0; c < 8; ++c) {
      const Vector a{uniform(rng, -1, 1), uniform(rng, -1, 1)}, b{uniform(rng, -1, 1), uniform(rng, -1, 1)};
      for (int m = 0; m < 5; ++m) {
        const Vector e{uniform(rng, -1, 1), uniform(rng, -1, 1)}, g{uniform(rng, -1, 1), uniform(rng, -1, 1)};
        set.push_back({Plaque(curve(base, {a, b, e, g}), 1.0), 0, c, m});
      }
    }
    // Circle: 2 classes through one point, angle polynomials agreeing to order 2.
    const SmoothMapPtr wrap = expression_map(
        {expr::call(ElementaryFunction::cos(), expr::variable(0)), expr::call(ElementaryFunction::sin(), expr::variable(0))}, 1);
    for (int c = 0; c < 2; ++c) {
      const double s1 = uniform(rng, -1, 1), s2 = uniform(rng, -1, 1);
      for (int m = 0; m < 5; ++m) {
        const SmoothMapPtr angle = curve({0.7}, {{s1}, {s2}, {uniform(rng, -1, 1)}});
        set.push_back({Plaque(compose(wrap, angle), 1.0), 1, 8 + c, m});
      }
    }
    const std::size_t n = set.size();
    auto probe_of = [&](const Member& m) -> const SmoothMap& { return m.group == 0 ? *plane->probe : *circle_space->probe; };

    // Relation matrix at order 2; different spaces never relate.
    std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
    int violations = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (set[i].group != set[j].group) continue;
        rel[i][j] = equivalent_at(set[i].p, set[j].p, 2, probe_of(set[i]));
        const bool truth = set[i].cls == set[j].cls;
        if (!t.expect(rel[i][j] == truth, "order-2 relation disagrees with construction for " + std::to_string(i) + "," + std::to_string(j)))
          ++violations;
        // At order 3 members of a class separate.
        const bool fine = equivalent_at(set[i].p, set[j].p, 3, probe_of(set[i]));
        if (!t.expect(fine == (i == j), "order-3 relation for " + std::to_string(i) + "," + std::to_string(j))) ++violations;
      }
    for (std::size_t i = 0; i < n; ++i)
      if (!t.expect(rel[i][i], "reflexivity at " + std::to_string(i))) ++violations;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!t.expect(rel[i][j] == rel[j][i], "symmetry " + std::to_string(i) + "," + std::to_string(j))) ++violations;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (rel[i][j] && rel[j][k] && !rel[i][k]) {
            t.expect(false, "transitivity " + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k));
            ++violations;
          }
    // Different base points are refused outright.
    {
      const Plaque other(curve({0.31, -0.2}, {{1, 0}}), 1.0);
      bool refused = false;
      try {
        equivalent_at(set[0].p, other, 1, *plane->probe);
      } catch (const Error& e) {
        refused = e.code() == ErrorCode::kBasepointMismatch;
      }
      t.expect(refused, "distinct base points raise BasepointMismatch");
    }

    // p1 ~ p2 implies p1 o psi ~ p2 o psi for polynomial psi fixing 0.
    int pairs_checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 1 + trial % 2;
      const SmoothMapPtr psi = random_polynomial_map(rng, dim, 1, 3, 0.6, true);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!rel[i][j]) continue;
          const Plaque a = precompose(set[i].p, psi, 0.25), b = precompose(set[j].p, psi, 0.25);
          ++pairs_checked;
          if (!t.expect(equivalent_at(a, b, 2, probe_of(set[i])),
                        "reparametrization " + std::to_string(trial) + " breaks " + std::to_string(i) + "~" + std::to_string(j)))
            ++violations;
        }
    }
    std::ostringstream s;
    s << n << " plaques, " << n * n << " ordered pairs, 20 reparametrizations over " << pairs_checked
      << " equivalent pairs, " << violations << " violations";
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

Result chain_rule() {
  Tally t(3, "pushforward of a composite equals the composite of pushforwards");
  try {
    Rng rng(303);
    const SpacePtr e2 = euclidean_space(2), e2b = euclidean_space(2), e3 = euclidean_space(3);
    double worst = 0.0, first_order = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
      const SpaceMap f{e2, e2b, random_polynomial_map(rng, 2, 2, 2, 1.0), "f"};
      const SpaceMap g{e2b, e3, random_polynomial_map(rng, 2, 3, 3, 1.0), "g"};
      const SpaceMap gf = compose_maps(g, f);
      for (int v = 0; v < 20; ++v) {
        const int order = 1 + v % 3;
        const Vector base{uniform(rng, -1, 1), uniform(rng, -1, 1)};
        const Plaque p(curve(base, {{uniform(rng, -1, 1), uniform(rng, -1, 1)},
                                    {uniform(rng, -1, 1), uniform(rng, -1, 1)},
                                    {uniform(rng, -1, 1), uniform(rng, -1, 1)}}),
                       1.0);
        const TangentVector tv = tangent_of(e2, p, order);
        const TangentVector lhs = pushforward(gf, tv);
        const TangentVector rhs = pushforward(g, pushforward(f, tv));
        const double d = scaled_difference(lhs.class_jet, rhs.class_jet);
        worst = std::max(worst, d);
        t.within(d, 1e-12, "pair " + std::to_string(pair) + " vector " + std::to_string(v));
        // First-order coefficient against a difference quotient of g(f(p(r))).
        for (int c = 0; c < 3; ++c) {
          const PointFn along = [&](const std::vector<double>& r) { return g.map->evaluate(f.map->evaluate(p(r)))[static_cast<std::size_t>(c)]; };
          const double fd = oracle::finite_difference(along, {0.0}, {1}, 0.05, 3);
          const double jet = lhs.class_jet.at(1, c);
          first_order = std::max(first_order, std::abs(fd - jet) / std::max(1.0, std::abs(jet)));
        }
      }
    }
    t.within(first_order, 1e-6, "first-order coefficients against finite differences");
    std::ostringstream s;
    s << "400 pushforwards, worst scaled jet difference " << worst << ", first-order FD error " << first_order;
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

}  // namespace criteria
