#pragma once

// Truncated multivariate Taylor expansions ("jets").
//
// A Jet stores, for every multi-index alpha with |alpha| <= order, the value
// D^alpha f(origin) of a map f : R^num_vars -> R^target_dim. Coefficients are
// kept derivative-style (no 1/alpha! factor), so comparing two jets compares
// derivatives directly. The alpha! bookkeeping lives in the Leibniz table of
// JetLayout and in jet_compose.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "diffeo/error.hpp"

namespace diffeo {

using Vector = std::vector<double>;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zero(int num_vars);
  static MultiIndex unit(int num_vars, int var);

  int num_vars() const { return static_cast<int>(entries_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  std::span<const int> entries() const { return entries_; }

  // alpha! = prod_i alpha_i!
  double factorial() const;

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex& other) const = default;

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

// Graded-lexicographic enumeration of all multi-indices of a given number of
// variables up to a given order, shared by every jet of that shape.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
    double weight;  // out! / (lhs! rhs!)
  };

  static std::shared_ptr<const JetLayout> get(int num_vars, int order);

  JetLayout(int num_vars, int order);

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& index(std::size_t i) const { return indices_[i]; }
  std::span<const MultiIndex> indices() const { return indices_; }

  // Position of alpha in the enumeration; throws OrderExceeded if |alpha| > order.
  std::size_t position(const MultiIndex& alpha) const;
  std::size_t position(std::span<const int> alpha) const;

  // First position of the indices of degree d; degree_begin(order + 1) == size().
  std::size_t degree_begin(int d) const { return degree_begin_[static_cast<std::size_t>(d)]; }

  // Multinomial Leibniz table for truncated products.
  std::span<const Product> products() const { return products_; }

 private:
  std::size_t encode(std::span<const int> alpha) const;

  int num_vars_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> degree_begin_;
  std::vector<std::int32_t> lookup_;
  std::vector<Product> products_;
};

class Jet {
 public:
  Jet() = default;
  // Zero jet expanded about `origin` (defaults to 0 in R^num_vars).
  Jet(int num_vars, int order, int target_dim, Vector origin = {});

  static Jet constant(std::span<const double> value, int num_vars, int order,
                      Vector origin = {});
  static Jet constant(double value, int num_vars, int order, Vector origin = {});
  // The jet of x |-> x at `point`: num_vars == target_dim == point.size().
  static Jet identity(std::span<const double> point, int order);
  // The jet of the affine map s |-> base + s (per variable) at s = 0.
  static Jet coordinates(std::span<const double> base, int order);

  int num_vars() const { return layout_->num_vars(); }
  int order() const { return layout_->order(); }
  int target_dim() const { return target_dim_; }
  const JetLayout& layout() const { return *layout_; }
  std::span<const double> origin() const { return origin_; }

  std::size_t size() const { return layout_->size(); }
  double at(std::size_t index, int component) const {
    return coeffs_[index * static_cast<std::size_t>(target_dim_) + static_cast<std::size_t>(component)];
  }
  double& at(std::size_t index, int component) {
    return coeffs_[index * static_cast<std::size_t>(target_dim_) + static_cast<std::size_t>(component)];
  }
  std::span<const double> entry(std::size_t index) const {
    return std::span<const double>(coeffs_).subspan(index * static_cast<std::size_t>(target_dim_),
                                                     static_cast<std::size_t>(target_dim_));
  }
  std::span<double> entry(std::size_t index) {
    return std::span<double>(coeffs_).subspan(index * static_cast<std::size_t>(target_dim_),
                                               static_cast<std::size_t>(target_dim_));
  }
  std::span<const double> raw() const { return coeffs_; }
  std::span<double> raw() { return coeffs_; }

  // Constant term (the value at the origin).
  Vector value() const;
  // Scalar value; requires target_dim == 1.
  double scalar() const;

  Jet component(int c) const;
  static Jet stack(std::span<const Jet> components);

  Jet truncate(int order) const;
  Jet with_origin(Vector origin) const;
  bool is_finite() const;

  // Largest absolute difference over all entries; shapes must agree.
  double max_abs_difference(const Jet& other) const;

 private:
  std::shared_ptr<const JetLayout> layout_;
  int target_dim_ = 0;
  Vector origin_;
  Vector coeffs_;
};

void require_same_shape(const Jet& a, const Jet& b);

Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, double s);
Jet jet_axpy(const Jet& a, double c, const Jet& b);  // a + c b
Jet jet_mul(const Jet& a, const Jet& b);
// Scalar jet times every component of a vector jet.
Jet jet_scale_by(const Jet& scalar, const Jet& v);

// Substitutes `inner` into the Taylor polynomial of `outer`. inner's constant
// term must equal outer's expansion point within `tol`; otherwise
// ExpansionPointMismatch (recentering is the caller's job, see recenter()).
Jet jet_compose(const Jet& outer, const Jet& inner, double tol = 1e-12);

// Re-expands the Taylor polynomial of j about a new origin. Exact for maps
// that are polynomials of degree <= order.
Jet recenter(const Jet& j, std::span<const double> new_origin);

Vector extract_derivative(const Jet& j, const MultiIndex& alpha);

// d/dx_var; the result has order - 1.
Jet partial_derivative(const Jet& j, int var);
// Antiderivative in x_var vanishing on x_var = origin_var; the result has order + 1.
Jet antiderivative(const Jet& j, int var);
// Adds `extra_vars` trailing variables (on which nothing depends) and raises the
// order to `order`; new coefficients are zero.
Jet extend(const Jet& j, int extra_vars, int order);
// Keeps the first `keep_vars` variables, setting the others to their origin.
Jet slice(const Jet& j, int keep_vars);

inline Jet operator+(const Jet& a, const Jet& b) { return jet_add(a, b); }
inline Jet operator-(const Jet& a, const Jet& b) { return jet_sub(a, b); }
inline Jet operator-(const Jet& a) { return jet_scale(a, -1.0); }
inline Jet operator*(double s, const Jet& a) { return jet_scale(a, s); }
inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }

enum class Elementary {
  kIdentity,
  kExp,
  kSin,
  kCos,
  kLog,
  kReciprocal,
  kPow,
  kSqrt,
  kPolynomial,
};

// A univariate function from the closed-form catalog, liftable through jets.
struct ElementaryFunction {
  Elementary kind = Elementary::kIdentity;
  double exponent = 1.0;       // kPow
  Vector coefficients;         // kPolynomial: c0 + c1 x + c2 x^2 + ...

  static ElementaryFunction identity() { return {Elementary::kIdentity, 1.0, {}}; }
  static ElementaryFunction exp() { return {Elementary::kExp, 1.0, {}}; }
  static ElementaryFunction sin() { return {Elementary::kSin, 1.0, {}}; }
  static ElementaryFunction cos() { return {Elementary::kCos, 1.0, {}}; }
  static ElementaryFunction log() { return {Elementary::kLog, 1.0, {}}; }
  static ElementaryFunction reciprocal() { return {Elementary::kReciprocal, 1.0, {}}; }
  static ElementaryFunction sqrt() { return {Elementary::kSqrt, 1.0, {}}; }
  static ElementaryFunction pow(double p) { return {Elementary::kPow, p, {}}; }
  static ElementaryFunction polynomial(Vector c) { return {Elementary::kPolynomial, 1.0, std::move(c)}; }

  std::string name() const;
  bool defined_at(double x) const;
  double operator()(double x) const;
  // f(x), f'(x), ..., f^(count)(x); throws DomainError outside the domain.
  Vector derivatives(double x, int count) const;
};

Jet lift(const ElementaryFunction& fn, const Jet& at);

}  // namespace diffeo
