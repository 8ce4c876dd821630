#pragma once

// Closed-form expressions: arithmetic, integer/real powers and the elementary
// catalog (sin, cos, exp, log, sqrt, pow). Expressions are shared DAGs; the
// evaluators memoize per node so recurrences that reuse subtrees stay linear.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "diffeo/smooth_map.hpp"

namespace diffeo {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow, kCall };

  Op op = Op::kConst;
  double value = 0.0;
  int var = -1;
  ElementaryFunction fn;
  ExprPtr lhs;
  ExprPtr rhs;
};

namespace expr {

ExprPtr constant(double v);
ExprPtr variable(int index);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr call(ElementaryFunction fn, ExprPtr arg);

double evaluate(const ExprPtr& e, std::span<const double> vars);
// All variable jets must share shape; the result is a scalar jet.
Jet evaluate(const ExprPtr& e, std::span<const Jet> vars);

int max_variable(const ExprPtr& e);

// Variable names map to indices. Unknown identifiers, bad syntax and unknown
// functions raise SpecParseError.
using VariableTable = std::map<std::string, int, std::less<>>;
ExprPtr parse(std::string_view text, const VariableTable& variables);

}  // namespace expr

// A vector of expressions read as a map R^in -> R^out. Variables with index
// >= in_dim are bound to the values in `bound` (family parameters).
class ExpressionMap final : public SmoothMap {
 public:
  ExpressionMap(std::vector<ExprPtr> components, int in_dim, Vector bound = {});

  int in_dim() const override { return in_dim_; }
  int out_dim() const override { return static_cast<int>(components_.size()); }
  Vector evaluate(std::span<const double> x) const override;
  Jet evaluate(const Jet& x) const override;

 private:
  std::vector<ExprPtr> components_;
  int in_dim_;
  Vector bound_;
};

SmoothMapPtr expression_map(std::vector<ExprPtr> components, int in_dim, Vector bound = {});

}  // namespace diffeo
