#include "diffeo/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

namespace diffeo {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate_degree(int num_vars, int degree, std::vector<int>& prefix,
                      std::vector<MultiIndex>& out) {
  const int var = static_cast<int>(prefix.size());
  if (var == num_vars - 1) {
    prefix.push_back(degree);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int d = degree; d >= 0; --d) {
    prefix.push_back(d);
    enumerate_degree(num_vars, degree - d, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    require(e >= 0, ErrorCode::kShapeMismatch, "multi-index entries must be non-negative");
    degree_ += e;
  }
}

MultiIndex MultiIndex::zero(int num_vars) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(num_vars), 0));
}

MultiIndex MultiIndex::unit(int num_vars, int var) {
  std::vector<int> e(static_cast<std::size_t>(num_vars), 0);
  e[static_cast<std::size_t>(var)] = 1;
  return MultiIndex(std::move(e));
}

double MultiIndex::factorial() const {
  double r = 1.0;
  for (int e : entries_) r *= diffeo::factorial(e);
  return r;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require(num_vars() == other.num_vars(), ErrorCode::kShapeMismatch, "multi-index length");
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
  return MultiIndex(std::move(e));
}

// ---------------------------------------------------------------------------
// JetLayout

std::shared_ptr<const JetLayout> JetLayout::get(int num_vars, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{num_vars, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(num_vars, order);
  return slot;
}

JetLayout::JetLayout(int num_vars, int order) : num_vars_(num_vars), order_(order) {
  require(num_vars >= 1, ErrorCode::kShapeMismatch, "jets need at least one variable");
  require(order >= 0, ErrorCode::kShapeMismatch, "jet order must be non-negative");
  std::vector<int> prefix;
  for (int d = 0; d <= order; ++d) {
    degree_begin_.push_back(indices_.size());
    enumerate_degree(num_vars, d, prefix, indices_);
  }
  degree_begin_.push_back(indices_.size());

  std::size_t table = 1;
  for (int i = 0; i < num_vars; ++i) table *= static_cast<std::size_t>(order + 1);
  lookup_.assign(table, -1);
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    lookup_[encode(indices_[i].entries())] = static_cast<std::int32_t>(i);
  }

  std::vector<int> sum(static_cast<std::size_t>(num_vars));
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    for (std::size_t j = 0; j < indices_.size(); ++j) {
      if (indices_[i].degree() + indices_[j].degree() > order) continue;
      double weight = 1.0;
      for (int k = 0; k < num_vars; ++k) {
        sum[static_cast<std::size_t>(k)] = indices_[i][k] + indices_[j][k];
        weight *= binomial(sum[static_cast<std::size_t>(k)], indices_[i][k]);
      }
      products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(lookup_[encode(sum)]), weight});
    }
  }
}

std::size_t JetLayout::encode(std::span<const int> alpha) const {
  std::size_t code = 0;
  for (int k = num_vars_ - 1; k >= 0; --k) {
    code = code * static_cast<std::size_t>(order_ + 1) + static_cast<std::size_t>(alpha[static_cast<std::size_t>(k)]);
  }
  return code;
}

std::size_t JetLayout::position(std::span<const int> alpha) const {
  require(static_cast<int>(alpha.size()) == num_vars_, ErrorCode::kShapeMismatch,
          "multi-index has " + std::to_string(alpha.size()) + " entries, jet has " +
              std::to_string(num_vars_) + " variables");
  int degree = 0;
  for (int a : alpha) degree += a;
  require(degree <= order_, ErrorCode::kOrderExceeded,
          "|alpha| = " + std::to_string(degree) + " exceeds jet order " + std::to_string(order_));
  return static_cast<std::size_t>(lookup_[encode(alpha)]);
}

std::size_t JetLayout::position(const MultiIndex& alpha) const {
  return position(alpha.entries());
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(int num_vars, int order, int target_dim, Vector origin)
    : layout_(JetLayout::get(num_vars, order)), target_dim_(target_dim), origin_(std::move(origin)) {
  require(target_dim >= 1, ErrorCode::kShapeMismatch, "jet target dimension must be positive");
  if (origin_.empty()) origin_.assign(static_cast<std::size_t>(num_vars), 0.0);
  require(static_cast<int>(origin_.size()) == num_vars, ErrorCode::kShapeMismatch,
          "jet origin has wrong dimension");
  coeffs_.assign(layout_->size() * static_cast<std::size_t>(target_dim), 0.0);
}

Jet Jet::constant(std::span<const double> value, int num_vars, int order, Vector origin) {
  Jet j(num_vars, order, static_cast<int>(value.size()), std::move(origin));
  std::copy(value.begin(), value.end(), j.coeffs_.begin());
  return j;
}

Jet Jet::constant(double value, int num_vars, int order, Vector origin) {
  const double v[1] = {value};
  return constant(v, num_vars, order, std::move(origin));
}

Jet Jet::identity(std::span<const double> point, int order) {
  const int n = static_cast<int>(point.size());
  Jet j(n, order, n, Vector(point.begin(), point.end()));
  for (int i = 0; i < n; ++i) {
    j.at(0, i) = point[static_cast<std::size_t>(i)];
    if (order >= 1) j.at(j.layout_->position(MultiIndex::unit(n, i)), i) = 1.0;
  }
  return j;
}

Jet Jet::coordinates(std::span<const double> base, int order) {
  Jet j = identity(base, order);
  j.origin_.assign(base.size(), 0.0);
  return j;
}

Vector Jet::value() const {
  return Vector(coeffs_.begin(), coeffs_.begin() + target_dim_);
}

double Jet::scalar() const {
  require(target_dim_ == 1, ErrorCode::kNonScalarTarget, "scalar() on a vector jet");
  return coeffs_[0];
}

Jet Jet::component(int c) const {
  require(c >= 0 && c < target_dim_, ErrorCode::kShapeMismatch, "jet component out of range");
  Jet out(num_vars(), order(), 1, origin_);
  for (std::size_t i = 0; i < size(); ++i) out.coeffs_[i] = at(i, c);
  return out;
}

Jet Jet::stack(std::span<const Jet> components) {
  require(!components.empty(), ErrorCode::kShapeMismatch, "cannot stack zero jets");
  int total = 0;
  for (const Jet& c : components) {
    require(c.num_vars() == components[0].num_vars() && c.order() == components[0].order(),
            ErrorCode::kShapeMismatch, "stacked jets disagree in shape");
    total += c.target_dim();
  }
  Jet out(components[0].num_vars(), components[0].order(), total, components[0].origin_);
  int offset = 0;
  for (const Jet& c : components) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (int k = 0; k < c.target_dim(); ++k) out.at(i, offset + k) = c.at(i, k);
    }
    offset += c.target_dim();
  }
  return out;
}

Jet Jet::truncate(int new_order) const {
  require(new_order <= order(), ErrorCode::kOrderExceeded, "truncate to a higher order");
  Jet out(num_vars(), new_order, target_dim_, origin_);
  std::copy(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(out.coeffs_.size()),
            out.coeffs_.begin());
  return out;
}

Jet Jet::with_origin(Vector origin) const {
  Jet out = *this;
  require(static_cast<int>(origin.size()) == num_vars(), ErrorCode::kShapeMismatch,
          "origin has wrong dimension");
  out.origin_ = std::move(origin);
  return out;
}

bool Jet::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

double Jet::max_abs_difference(const Jet& other) const {
  require_same_shape(*this, other);
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) m = std::max(m, std::abs(coeffs_[i] - other.coeffs_[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Arithmetic

void require_same_shape(const Jet& a, const Jet& b) {
  require(a.num_vars() == b.num_vars() && a.order() == b.order() && a.target_dim() == b.target_dim(),
          ErrorCode::kShapeMismatch,
          "jet shapes differ: (" + std::to_string(a.num_vars()) + "," + std::to_string(a.order()) + "," +
              std::to_string(a.target_dim()) + ") vs (" + std::to_string(b.num_vars()) + "," +
              std::to_string(b.order()) + "," + std::to_string(b.target_dim()) + ")");
}

Jet jet_axpy(const Jet& a, double c, const Jet& b) {
  require_same_shape(a, b);
  Jet out = a;
  auto dst = out.raw();
  auto src = b.raw();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  return out;
}

Jet jet_add(const Jet& a, const Jet& b) { return jet_axpy(a, 1.0, b); }
Jet jet_sub(const Jet& a, const Jet& b) { return jet_axpy(a, -1.0, b); }

Jet jet_scale(const Jet& a, double s) {
  Jet out = a;
  for (double& v : out.raw()) v *= s;
  return out;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  require(a.num_vars() == b.num_vars() && a.order() == b.order(), ErrorCode::kShapeMismatch,
          "jet_mul operands differ in variables or order");
  require(a.target_dim() == 1 && b.target_dim() == 1, ErrorCode::kNonScalarTarget,
          "jet_mul needs scalar jets");
  Jet out(a.num_vars(), a.order(), 1, Vector(a.origin().begin(), a.origin().end()));
  auto x = a.raw();
  auto y = b.raw();
  auto z = out.raw();
  for (const auto& p : a.layout().products()) z[p.out] += p.weight * x[p.lhs] * y[p.rhs];
  return out;
}

Jet jet_scale_by(const Jet& scalar, const Jet& v) {
  std::vector<Jet> parts;
  parts.reserve(static_cast<std::size_t>(v.target_dim()));
  for (int c = 0; c < v.target_dim(); ++c) parts.push_back(jet_mul(scalar, v.component(c)));
  return Jet::stack(parts);
}

Jet jet_compose(const Jet& outer, const Jet& inner, double tol) {
  require(inner.target_dim() == outer.num_vars(), ErrorCode::kShapeMismatch,
          "inner jet target dimension " + std::to_string(inner.target_dim()) +
              " != outer variable count " + std::to_string(outer.num_vars()));
  require(inner.order() == outer.order(), ErrorCode::kShapeMismatch, "jet_compose orders differ");
  const int m = outer.num_vars();
  const int order = outer.order();
  const Vector base = inner.value();
  for (int i = 0; i < m; ++i) {
    const double shift = base[static_cast<std::size_t>(i)] - outer.origin()[static_cast<std::size_t>(i)];
    require(std::abs(shift) <= tol * (1.0 + std::abs(outer.origin()[static_cast<std::size_t>(i)])),
            ErrorCode::kExpansionPointMismatch,
            "inner constant term differs from outer expansion point by " + std::to_string(shift));
  }

  // h_i = inner_i - c_i has zero constant term, so h^alpha vanishes below degree |alpha|.
  Vector origin(inner.origin().begin(), inner.origin().end());
  std::vector<Jet> h;
  h.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Jet hi = inner.component(i);
    hi.at(0, 0) = 0.0;
    h.push_back(std::move(hi));
  }

  const JetLayout& outer_layout = outer.layout();
  // Monomials h^alpha in the same enumeration as the outer layout; h^alpha is
  // built from h^(alpha - e_k) for the first non-zero k, which precedes alpha.
  std::vector<Jet> powers;
  powers.reserve(outer_layout.size());
  powers.push_back(Jet::constant(1.0, inner.num_vars(), order, origin));
  std::vector<int> tmp(static_cast<std::size_t>(m));
  for (std::size_t idx = 1; idx < outer_layout.size(); ++idx) {
    const MultiIndex& alpha = outer_layout.index(idx);
    int k = 0;
    while (alpha[k] == 0) ++k;
    std::copy(alpha.entries().begin(), alpha.entries().end(), tmp.begin());
    tmp[static_cast<std::size_t>(k)] -= 1;
    powers.push_back(jet_mul(powers[outer_layout.position(tmp)], h[static_cast<std::size_t>(k)]));
  }

  Jet out(inner.num_vars(), order, outer.target_dim(), origin);
  auto dst = out.raw();
  const auto width = static_cast<std::size_t>(outer.target_dim());
  for (std::size_t idx = 0; idx < outer_layout.size(); ++idx) {
    const double inv_fact = 1.0 / outer_layout.index(idx).factorial();
    auto p = powers[idx].raw();
    for (int c = 0; c < outer.target_dim(); ++c) {
      const double coef = outer.at(idx, c) * inv_fact;
      if (coef == 0.0) continue;
      for (std::size_t q = 0; q < p.size(); ++q) dst[q * width + static_cast<std::size_t>(c)] += coef * p[q];
    }
  }
  return out;
}

Jet recenter(const Jet& j, std::span<const double> new_origin) {
  require(static_cast<int>(new_origin.size()) == j.num_vars(), ErrorCode::kShapeMismatch,
          "recenter origin has wrong dimension");
  const JetLayout& layout = j.layout();
  const int n = j.num_vars();
  Vector delta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    delta[static_cast<std::size_t>(i)] = new_origin[static_cast<std::size_t>(i)] - j.origin()[static_cast<std::size_t>(i)];
  }
  Jet out(n, j.order(), j.target_dim(), Vector(new_origin.begin(), new_origin.end()));
  // D^beta P(o') = sum_{alpha >= beta} D^alpha P(o) (o' - o)^(alpha - beta) / (alpha - beta)!
  for (std::size_t b = 0; b < layout.size(); ++b) {
    const MultiIndex& beta = layout.index(b);
    for (std::size_t a = 0; a < layout.size(); ++a) {
      const MultiIndex& alpha = layout.index(a);
      double w = 1.0;
      bool dominates = true;
      for (int k = 0; k < n && dominates; ++k) {
        const int e = alpha[k] - beta[k];
        if (e < 0) {
          dominates = false;
          break;
        }
        w *= std::pow(delta[static_cast<std::size_t>(k)], e) / factorial(e);
      }
      if (!dominates || w == 0.0) continue;
      for (int c = 0; c < j.target_dim(); ++c) out.at(b, c) += w * j.at(a, c);
    }
  }
  return out;
}

Vector extract_derivative(const Jet& j, const MultiIndex& alpha) {
  require(alpha.degree() <= j.order(), ErrorCode::kOrderExceeded,
          "|alpha| = " + std::to_string(alpha.degree()) + " exceeds jet order " + std::to_string(j.order()));
  auto e = j.entry(j.layout().position(alpha));
  return Vector(e.begin(), e.end());
}

Jet partial_derivative(const Jet& j, int var) {
  require(var >= 0 && var < j.num_vars(), ErrorCode::kShapeMismatch, "partial_derivative variable");
  require(j.order() >= 1, ErrorCode::kOrderExceeded, "partial_derivative of an order-0 jet");
  Jet out(j.num_vars(), j.order() - 1, j.target_dim(), Vector(j.origin().begin(), j.origin().end()));
  std::vector<int> shifted(static_cast<std::size_t>(j.num_vars()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MultiIndex& alpha = out.layout().index(i);
    std::copy(alpha.entries().begin(), alpha.entries().end(), shifted.begin());
    shifted[static_cast<std::size_t>(var)] += 1;
    auto src = j.entry(j.layout().position(shifted));
    std::copy(src.begin(), src.end(), out.entry(i).begin());
  }
  return out;
}

Jet antiderivative(const Jet& j, int var) {
  require(var >= 0 && var < j.num_vars(), ErrorCode::kShapeMismatch, "antiderivative variable");
  Jet out(j.num_vars(), j.order() + 1, j.target_dim(), Vector(j.origin().begin(), j.origin().end()));
  std::vector<int> shifted(static_cast<std::size_t>(j.num_vars()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MultiIndex& alpha = out.layout().index(i);
    if (alpha[var] == 0) continue;
    std::copy(alpha.entries().begin(), alpha.entries().end(), shifted.begin());
    shifted[static_cast<std::size_t>(var)] -= 1;
    auto src = j.entry(j.layout().position(shifted));
    std::copy(src.begin(), src.end(), out.entry(i).begin());
  }
  return out;
}

Jet extend(const Jet& j, int extra_vars, int order) {
  require(extra_vars >= 0 && order >= j.order(), ErrorCode::kShapeMismatch, "extend can only grow a jet");
  const int n = j.num_vars() + extra_vars;
  Vector origin(j.origin().begin(), j.origin().end());
  origin.resize(static_cast<std::size_t>(n), 0.0);
  Jet out(n, order, j.target_dim(), std::move(origin));
  std::vector<int> wide(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const MultiIndex& alpha = j.layout().index(i);
    std::copy(alpha.entries().begin(), alpha.entries().end(), wide.begin());
    auto src = j.entry(i);
    std::copy(src.begin(), src.end(), out.entry(out.layout().position(wide)).begin());
  }
  return out;
}

Jet slice(const Jet& j, int keep_vars) {
  require(keep_vars >= 1 && keep_vars <= j.num_vars(), ErrorCode::kShapeMismatch, "slice variable count");
  Jet out(keep_vars, j.order(), j.target_dim(),
          Vector(j.origin().begin(), j.origin().begin() + keep_vars));
  std::vector<int> wide(static_cast<std::size_t>(j.num_vars()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const MultiIndex& alpha = out.layout().index(i);
    std::copy(alpha.entries().begin(), alpha.entries().end(), wide.begin());
    auto src = j.entry(j.layout().position(wide));
    std::copy(src.begin(), src.end(), out.entry(i).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elementary catalog

std::string ElementaryFunction::name() const {
  switch (kind) {
    case Elementary::kIdentity: return "id";
    case Elementary::kExp: return "exp";
    case Elementary::kSin: return "sin";
    case Elementary::kCos: return "cos";
    case Elementary::kLog: return "log";
    case Elementary::kReciprocal: return "recip";
    case Elementary::kPow: return "pow(" + std::to_string(exponent) + ")";
    case Elementary::kSqrt: return "sqrt";
    case Elementary::kPolynomial: return "poly";
  }
  return "?";
}

namespace {

bool is_integer(double p) { return std::floor(p) == p; }

bool pow_defined(double p, double x) {
  if (is_integer(p)) return p >= 0.0 || x != 0.0;
  return x > 0.0;
}

}  // namespace

bool ElementaryFunction::defined_at(double x) const {
  if (!std::isfinite(x)) return false;
  switch (kind) {
    case Elementary::kLog: return x > 0.0;
    case Elementary::kReciprocal: return x != 0.0;
    case Elementary::kSqrt: return x > 0.0;
    case Elementary::kPow: return pow_defined(exponent, x);
    default: return true;
  }
}

double ElementaryFunction::operator()(double x) const {
  return derivatives(x, 0)[0];
}

Vector ElementaryFunction::derivatives(double x, int count) const {
  require(defined_at(x), ErrorCode::kDomainError, name() + " is not smooth at " + std::to_string(x));
  Vector d(static_cast<std::size_t>(count + 1), 0.0);
  switch (kind) {
    case Elementary::kIdentity:
      d[0] = x;
      if (count >= 1) d[1] = 1.0;
      break;
    case Elementary::kExp:
      std::fill(d.begin(), d.end(), std::exp(x));
      break;
    case Elementary::kSin:
    case Elementary::kCos: {
      const double s = std::sin(x);
      const double c = std::cos(x);
      const double cycle_sin[4] = {s, c, -s, -c};
      const double cycle_cos[4] = {c, -s, -c, s};
      const double* cycle = kind == Elementary::kSin ? cycle_sin : cycle_cos;
      for (int k = 0; k <= count; ++k) d[static_cast<std::size_t>(k)] = cycle[k % 4];
      break;
    }
    case Elementary::kLog:
      d[0] = std::log(x);
      for (int k = 1; k <= count; ++k) {
        d[static_cast<std::size_t>(k)] = ((k - 1) % 2 == 0 ? 1.0 : -1.0) * factorial(k - 1) / std::pow(x, k);
      }
      break;
    case Elementary::kReciprocal:
      for (int k = 0; k <= count; ++k) {
        d[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * factorial(k) / std::pow(x, k + 1);
      }
      break;
    case Elementary::kSqrt:
    case Elementary::kPow: {
      const double p = kind == Elementary::kSqrt ? 0.5 : exponent;
      double falling = 1.0;
      for (int k = 0; k <= count; ++k) {
        if (falling == 0.0) break;
        d[static_cast<std::size_t>(k)] = falling * std::pow(x, p - k);
        falling *= (p - k);
      }
      break;
    }
    case Elementary::kPolynomial: {
      Vector c = coefficients;
      for (int k = 0; k <= count; ++k) {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        d[static_cast<std::size_t>(k)] = acc;
        Vector next;
        for (std::size_t i = 1; i < c.size(); ++i) next.push_back(c[i] * static_cast<double>(i));
        c = std::move(next);
      }
      break;
    }
  }
  return d;
}

Jet lift(const ElementaryFunction& fn, const Jet& at) {
  require(at.target_dim() == 1, ErrorCode::kNonScalarTarget, "lift needs a scalar jet");
  const double c = at.scalar();
  const Vector d = fn.derivatives(c, at.order());
  Jet h = at;
  h.at(0, 0) = 0.0;
  // f(c + h) = sum_k f^(k)(c) h^k / k!; h^k vanishes beyond the truncation order.
  Jet out = Jet::constant(d[0], at.num_vars(), at.order(), Vector(at.origin().begin(), at.origin().end()));
  Jet power = h;
  double inv_fact = 1.0;
  for (int k = 1; k <= at.order(); ++k) {
    inv_fact /= k;
    if (d[static_cast<std::size_t>(k)] != 0.0) out = jet_axpy(out, d[static_cast<std::size_t>(k)] * inv_fact, power);
    if (k < at.order()) power = jet_mul(power, h);
  }
  return out;
}

}  // namespace diffeo
