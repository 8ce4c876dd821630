#include "diffeo/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace diffeo {
namespace expr {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.op = op;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  return make(std::move(e));
}

bool integral_exponent(double p) { return std::floor(p) == p && std::abs(p) <= 64; }

double ipow(double x, int n) {
  double r = 1.0;
  const bool invert = n < 0;
  for (int i = 0; i < std::abs(n); ++i) r *= x;
  return invert ? 1.0 / r : r;
}

class PointEvaluator {
 public:
  explicit PointEvaluator(std::span<const double> vars) : vars_(vars) {}

  double operator()(const ExprPtr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    const double v = compute(*e);
    memo_.emplace(e.get(), v);
    return v;
  }

 private:
  double compute(const Expr& e) {
    switch (e.op) {
      case Expr::Op::kConst: return e.value;
      case Expr::Op::kVar:
        require(e.var >= 0 && static_cast<std::size_t>(e.var) < vars_.size(), ErrorCode::kShapeMismatch,
                "expression variable out of range");
        return vars_[static_cast<std::size_t>(e.var)];
      case Expr::Op::kAdd: return (*this)(e.lhs) + (*this)(e.rhs);
      case Expr::Op::kSub: return (*this)(e.lhs) - (*this)(e.rhs);
      case Expr::Op::kMul: return (*this)(e.lhs) * (*this)(e.rhs);
      case Expr::Op::kDiv: {
        const double d = (*this)(e.rhs);
        require(d != 0.0, ErrorCode::kDomainError, "division by zero");
        return (*this)(e.lhs) / d;
      }
      case Expr::Op::kNeg: return -(*this)(e.lhs);
      case Expr::Op::kPow: {
        const double base = (*this)(e.lhs);
        if (e.rhs->op == Expr::Op::kConst) {
          const double p = e.rhs->value;
          if (integral_exponent(p)) {
            require(p >= 0 || base != 0.0, ErrorCode::kDomainError, "negative power of zero");
            return ipow(base, static_cast<int>(p));
          }
          return ElementaryFunction::pow(p)(base);
        }
        require(base > 0.0, ErrorCode::kDomainError, "variable exponent needs a positive base");
        return std::exp((*this)(e.rhs) * std::log(base));
      }
      case Expr::Op::kCall: return e.fn((*this)(e.lhs));
    }
    return 0.0;
  }

  std::span<const double> vars_;
  std::unordered_map<const Expr*, double> memo_;
};

class JetEvaluator {
 public:
  explicit JetEvaluator(std::span<const Jet> vars) : vars_(vars) {
    require(!vars.empty(), ErrorCode::kShapeMismatch, "jet evaluation needs at least one variable");
  }

  const Jet& operator()(const ExprPtr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Jet v = compute(*e);
    return memo_.emplace(e.get(), std::move(v)).first->second;
  }

 private:
  Jet constant(double c) const {
    const Jet& ref = vars_[0];
    return Jet::constant(c, ref.num_vars(), ref.order(), Vector(ref.origin().begin(), ref.origin().end()));
  }

  Jet compute(const Expr& e) {
    switch (e.op) {
      case Expr::Op::kConst: return constant(e.value);
      case Expr::Op::kVar:
        require(e.var >= 0 && static_cast<std::size_t>(e.var) < vars_.size(), ErrorCode::kShapeMismatch,
                "expression variable out of range");
        return vars_[static_cast<std::size_t>(e.var)];
      case Expr::Op::kAdd: return jet_add((*this)(e.lhs), (*this)(e.rhs));
      case Expr::Op::kSub: return jet_sub((*this)(e.lhs), (*this)(e.rhs));
      case Expr::Op::kMul: return jet_mul((*this)(e.lhs), (*this)(e.rhs));
      case Expr::Op::kDiv: return jet_mul((*this)(e.lhs), lift(ElementaryFunction::reciprocal(), (*this)(e.rhs)));
      case Expr::Op::kNeg: return jet_scale((*this)(e.lhs), -1.0);
      case Expr::Op::kPow: {
        const Jet& base = (*this)(e.lhs);
        if (e.rhs->op == Expr::Op::kConst) {
          const double p = e.rhs->value;
          if (integral_exponent(p) && p >= 0) {
            Jet r = constant(1.0);
            for (int i = 0; i < static_cast<int>(p); ++i) r = jet_mul(r, base);
            return r;
          }
          return lift(ElementaryFunction::pow(p), base);
        }
        return lift(ElementaryFunction::exp(),
                    jet_mul((*this)(e.rhs), lift(ElementaryFunction::log(), base)));
      }
      case Expr::Op::kCall: return lift(e.fn, (*this)(e.lhs));
    }
    return constant(0.0);
  }

  std::span<const Jet> vars_;
  std::unordered_map<const Expr*, Jet> memo_;
};

// Recursive-descent parser:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | identifier '(' sum (',' sum)* ')' | '(' sum ')'
class Parser {
 public:
  Parser(std::string_view text, const VariableTable& vars) : text_(text), vars_(vars) {}

  ExprPtr parse() {
    ExprPtr e = sum();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kSpecParseError,
         "in expression \"" + std::string(text_) + "\" at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr sum() {
    ExprPtr e = product_term();
    for (;;) {
      if (accept('+')) {
        e = add(e, product_term());
      } else if (accept('-')) {
        e = sub(e, product_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr product_term() {
    ExprPtr e = unary();
    for (;;) {
      if (accept('*')) {
        e = mul(e, unary());
      } else if (accept('/')) {
        e = div(e, unary());
      } else {
        return e;
      }
    }
  }

  ExprPtr unary() {
    if (accept('-')) return neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  ExprPtr primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      ExprPtr e = sum();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    error("unexpected '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) error("malformed number '" + token + "'");
      return constant(v);
    } catch (const std::logic_error&) {
      error("malformed number '" + token + "'");
    }
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (accept('(')) {
      std::vector<ExprPtr> args{sum()};
      while (accept(',')) args.push_back(sum());
      if (!accept(')')) error("expected ')' after arguments of " + name);
      return function(name, args);
    }
    if (name == "pi") return constant(std::numbers::pi);
    auto it = vars_.find(name);
    if (it == vars_.end()) error("unknown variable '" + name + "'");
    return variable(it->second);
  }

  ExprPtr function(const std::string& name, const std::vector<ExprPtr>& args) {
    auto unary_fn = [&](ElementaryFunction fn) {
      if (args.size() != 1) error(name + " takes one argument");
      return call(std::move(fn), args[0]);
    };
    if (name == "sin") return unary_fn(ElementaryFunction::sin());
    if (name == "cos") return unary_fn(ElementaryFunction::cos());
    if (name == "exp") return unary_fn(ElementaryFunction::exp());
    if (name == "log") return unary_fn(ElementaryFunction::log());
    if (name == "sqrt") return unary_fn(ElementaryFunction::sqrt());
    if (name == "pow") {
      if (args.size() != 2) error("pow takes two arguments");
      return pow(args[0], args[1]);
    }
    error("unknown function '" + name + "'");
  }

  std::string_view text_;
  const VariableTable& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr constant(double v) {
  Expr e;
  e.op = Expr::Op::kConst;
  e.value = v;
  return make(std::move(e));
}

ExprPtr variable(int index) {
  Expr e;
  e.op = Expr::Op::kVar;
  e.var = index;
  return make(std::move(e));
}

ExprPtr add(ExprPtr a, ExprPtr b) { return binary(Expr::Op::kAdd, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(Expr::Op::kSub, std::move(a), std::move(b)); }
ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(Expr::Op::kMul, std::move(a), std::move(b)); }
ExprPtr div(ExprPtr a, ExprPtr b) { return binary(Expr::Op::kDiv, std::move(a), std::move(b)); }
ExprPtr pow(ExprPtr base, ExprPtr exponent) { return binary(Expr::Op::kPow, std::move(base), std::move(exponent)); }

ExprPtr neg(ExprPtr a) {
  Expr e;
  e.op = Expr::Op::kNeg;
  e.lhs = std::move(a);
  return make(std::move(e));
}

ExprPtr call(ElementaryFunction fn, ExprPtr arg) {
  Expr e;
  e.op = Expr::Op::kCall;
  e.fn = std::move(fn);
  e.lhs = std::move(arg);
  return make(std::move(e));
}

double evaluate(const ExprPtr& e, std::span<const double> vars) { return PointEvaluator(vars)(e); }

Jet evaluate(const ExprPtr& e, std::span<const Jet> vars) { return JetEvaluator(vars)(e); }

int max_variable(const ExprPtr& e) {
  if (!e) return -1;
  int m = e->op == Expr::Op::kVar ? e->var : -1;
  return std::max({m, max_variable(e->lhs), max_variable(e->rhs)});
}

ExprPtr parse(std::string_view text, const VariableTable& variables) {
  return Parser(text, variables).parse();
}

}  // namespace expr

ExpressionMap::ExpressionMap(std::vector<ExprPtr> components, int in_dim, Vector bound)
    : components_(std::move(components)), in_dim_(in_dim), bound_(std::move(bound)) {
  require(!components_.empty(), ErrorCode::kShapeMismatch, "expression map needs components");
  require(in_dim_ >= 1, ErrorCode::kShapeMismatch, "expression map needs inputs");
  for (const auto& c : components_) {
    require(expr::max_variable(c) < in_dim_ + static_cast<int>(bound_.size()), ErrorCode::kShapeMismatch,
            "expression uses a variable outside the map's inputs");
  }
}

Vector ExpressionMap::evaluate(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == in_dim_, ErrorCode::kShapeMismatch, "expression map input size");
  Vector vars(x.begin(), x.end());
  vars.insert(vars.end(), bound_.begin(), bound_.end());
  Vector y;
  y.reserve(components_.size());
  for (const auto& c : components_) y.push_back(expr::evaluate(c, vars));
  return y;
}

Jet ExpressionMap::evaluate(const Jet& x) const {
  require(x.target_dim() == in_dim_, ErrorCode::kShapeMismatch, "expression map input size");
  std::vector<Jet> vars;
  for (int i = 0; i < in_dim_; ++i) vars.push_back(x.component(i));
  for (double b : bound_) {
    vars.push_back(Jet::constant(b, x.num_vars(), x.order(), Vector(x.origin().begin(), x.origin().end())));
  }
  std::vector<Jet> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(expr::evaluate(c, vars));
  return Jet::stack(out);
}

SmoothMapPtr expression_map(std::vector<ExprPtr> components, int in_dim, Vector bound) {
  return std::make_shared<ExpressionMap>(std::move(components), in_dim, std::move(bound));
}

}  // namespace diffeo
