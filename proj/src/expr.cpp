#include "jetgeo/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

#include "jetgeo/error.hpp"

namespace jetgeo {

struct Expression::Node {
  NodeKind kind = NodeKind::Constant;
  Rational value;
  double value_d = 0.0;
  std::string name;
  std::vector<Expression> children;
  int exponent = 0;
  Func func = Func::Sin;
};

namespace {

Rational rational_pow(const Rational& base, int exponent) {
  using boost::multiprecision::cpp_int;
  const unsigned k = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
  cpp_int num = boost::multiprecision::pow(boost::multiprecision::numerator(base), k);
  cpp_int den = boost::multiprecision::pow(boost::multiprecision::denominator(base), k);
  if (exponent < 0) std::swap(num, den);
  return Rational(num, den);
}

}  // namespace

Expression::Expression() : Expression(Rational(0)) {}

Expression::Expression(long long value) : Expression(Rational(value)) {}

Expression::Expression(Rational value) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Constant;
  node->value_d = static_cast<double>(value);
  node->value = std::move(value);
  node_ = std::move(node);
}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::symbol(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Symbol;
  node->name = std::move(name);
  return Expression(std::move(node));
}

Expression Expression::make_sum(std::vector<Expression> terms) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Sum;
  node->children = std::move(terms);
  return Expression(std::move(node));
}

Expression Expression::make_product(std::vector<Expression> factors) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Product;
  node->children = std::move(factors);
  return Expression(std::move(node));
}

Expression Expression::make_power(Expression base, int exponent) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Power;
  node->children = {std::move(base)};
  node->exponent = exponent;
  return Expression(std::move(node));
}

Expression Expression::make_quotient(Expression numerator, Expression denominator) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Quotient;
  node->children = {std::move(numerator), std::move(denominator)};
  return Expression(std::move(node));
}

Expression Expression::make_function(Func f, Expression argument) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Function;
  node->func = f;
  node->children = {std::move(argument)};
  return Expression(std::move(node));
}

NodeKind Expression::kind() const { return node_->kind; }

bool Expression::is_zero() const { return node_->kind == NodeKind::Constant && node_->value == 0; }

bool Expression::is_one() const { return node_->kind == NodeKind::Constant && node_->value == 1; }

const Rational& Expression::constant() const {
  assert(node_->kind == NodeKind::Constant);
  return node_->value;
}

double Expression::constant_double() const {
  assert(node_->kind == NodeKind::Constant);
  return node_->value_d;
}

const std::string& Expression::name() const {
  assert(node_->kind == NodeKind::Symbol);
  return node_->name;
}

std::span<const Expression> Expression::operands() const { return node_->children; }

int Expression::exponent() const {
  assert(node_->kind == NodeKind::Power);
  return node_->exponent;
}

Func Expression::function() const {
  assert(node_->kind == NodeKind::Function);
  return node_->func;
}

// ---------------------------------------------------------------------------
// ordering

int compare(const Expression& a, const Expression& b) {
  if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case NodeKind::Constant:
      if (a.constant() == b.constant()) return 0;
      return a.constant() < b.constant() ? -1 : 1;
    case NodeKind::Symbol: {
      const int c = a.name().compare(b.name());
      return c == 0 ? 0 : (c < 0 ? -1 : 1);
    }
    case NodeKind::Power:
      if (int c = compare(a.operands()[0], b.operands()[0]); c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    case NodeKind::Function:
      if (a.function() != b.function())
        return static_cast<int>(a.function()) < static_cast<int>(b.function()) ? -1 : 1;
      return compare(a.operands()[0], b.operands()[0]);
    case NodeKind::Sum:
    case NodeKind::Product:
    case NodeKind::Quotient: {
      auto x = a.operands();
      auto y = b.operands();
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (int c = compare(x[i], y[i]); c != 0) return c;
      return 0;
    }
  }
  return 0;
}

bool structurally_equal(const Expression& a, const Expression& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// simplification

namespace {

// Simplify the top node, assuming every child is already simplified.
Expression simplify_node(const Expression& e);

// Split a simplified term into rational coefficient and the remaining monomial.
std::pair<Rational, Expression> split_coefficient(const Expression& term) {
  if (term.kind() == NodeKind::Product) {
    auto ops = term.operands();
    if (!ops.empty() && ops[0].is_constant()) {
      if (ops.size() == 2) return {ops[0].constant(), ops[1]};
      return {ops[0].constant(), Expression::make_product({ops.begin() + 1, ops.end()})};
    }
  }
  return {Rational(1), term};
}

Expression with_coefficient(const Rational& coef, const Expression& rest) {
  if (coef == 1) return rest;
  std::vector<Expression> factors{Expression(coef)};
  if (rest.kind() == NodeKind::Product) {
    factors.insert(factors.end(), rest.operands().begin(), rest.operands().end());
  } else {
    factors.push_back(rest);
  }
  return Expression::make_product(std::move(factors));
}

Expression simplify_sum(std::span<const Expression> terms) {
  Rational constant = 0;
  std::map<Expression, Rational, ExpressionLess> monomials;
  auto absorb = [&](const Expression& t, auto& self) -> void {
    if (t.kind() == NodeKind::Sum) {
      for (const auto& c : t.operands()) self(c, self);
      return;
    }
    if (t.is_constant()) {
      constant += t.constant();
      return;
    }
    auto [coef, rest] = split_coefficient(t);
    monomials[rest] += coef;
  };
  for (const auto& t : terms) absorb(t, absorb);

  std::vector<Expression> out;
  bool nested = false;
  for (const auto& [rest, coef] : monomials) {
    if (coef == 0) continue;
    out.push_back(with_coefficient(coef, rest));
    nested = nested || out.back().kind() == NodeKind::Sum;
  }
  // c*(a+b) collapsing to (a+b) must be flattened into this sum
  if (nested) {
    if (constant != 0) out.emplace_back(constant);
    return simplify_sum(out);
  }
  std::sort(out.begin(), out.end(), ExpressionLess{});
  if (constant != 0) out.emplace_back(constant);
  if (out.empty()) return Expression(0LL);
  if (out.size() == 1) return out.front();
  return Expression::make_sum(std::move(out));
}

Expression simplify_product(std::span<const Expression> factors) {
  Rational coef = 1;
  std::map<Expression, int, ExpressionLess> powers;
  auto absorb = [&](const Expression& f, auto& self) -> void {
    if (f.kind() == NodeKind::Product) {
      for (const auto& c : f.operands()) self(c, self);
      return;
    }
    if (f.is_constant()) {
      coef *= f.constant();
      return;
    }
    if (f.kind() == NodeKind::Power) {
      powers[f.operands()[0]] += f.exponent();
      return;
    }
    powers[f] += 1;
  };
  for (const auto& f : factors) absorb(f, absorb);
  if (coef == 0) return Expression(0LL);

  std::vector<Expression> out;
  bool nested = false;
  for (const auto& [base, k] : powers) {
    if (k == 0) continue;
    out.push_back(k == 1 ? base : Expression::make_power(base, k));
    nested = nested || out.back().kind() == NodeKind::Product;
  }
  // (a*b)^1 must be flattened into this product
  if (nested) {
    out.emplace_back(coef);
    return simplify_product(out);
  }
  std::sort(out.begin(), out.end(), ExpressionLess{});
  if (out.empty()) return Expression(coef);
  if (coef == 1 && out.size() == 1) return out.front();
  if (coef != 1) out.insert(out.begin(), Expression(coef));
  return Expression::make_product(std::move(out));
}

Expression simplify_power(const Expression& base, int k) {
  if (k == 0) return Expression(1LL);
  if (k == 1) return base;
  if (base.is_constant()) {
    if (base.constant() == 0 && k < 0) return Expression::make_power(base, k);
    return Expression(rational_pow(base.constant(), k));
  }
  if (base.kind() == NodeKind::Power) return simplify_power(base.operands()[0], base.exponent() * k);
  return Expression::make_power(base, k);
}

Expression simplify_quotient(const Expression& num, const Expression& den) {
  if (den.is_constant()) {
    if (den.constant() == 0) return Expression::make_quotient(num, den);
    return simplify_node(Expression::make_product({Expression(Rational(1) / den.constant()), num}));
  }
  if (num.is_zero()) return Expression(0LL);
  if (structurally_equal(num, den)) return Expression(1LL);
  return Expression::make_quotient(num, den);
}

Expression simplify_function(Func f, const Expression& arg) {
  if (arg.is_zero()) {
    switch (f) {
      case Func::Sin:
      case Func::Sqrt:
        return Expression(0LL);
      case Func::Cos:
      case Func::Exp:
        return Expression(1LL);
    }
  }
  if (f == Func::Sqrt && arg.is_one()) return Expression(1LL);
  return Expression::make_function(f, arg);
}

Expression simplify_node(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Symbol:
      return e;
    case NodeKind::Sum:
      return simplify_sum(e.operands());
    case NodeKind::Product:
      return simplify_product(e.operands());
    case NodeKind::Power:
      return simplify_power(e.operands()[0], e.exponent());
    case NodeKind::Quotient:
      return simplify_quotient(e.operands()[0], e.operands()[1]);
    case NodeKind::Function:
      return simplify_function(e.function(), e.operands()[0]);
  }
  return e;
}

}  // namespace

Expression simplify(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Symbol:
      return e;
    case NodeKind::Sum:
    case NodeKind::Product: {
      std::vector<Expression> children;
      children.reserve(e.operands().size());
      for (const auto& c : e.operands()) children.push_back(simplify(c));
      return e.kind() == NodeKind::Sum ? simplify_sum(children) : simplify_product(children);
    }
    case NodeKind::Power:
      return simplify_power(simplify(e.operands()[0]), e.exponent());
    case NodeKind::Quotient:
      return simplify_quotient(simplify(e.operands()[0]), simplify(e.operands()[1]));
    case NodeKind::Function:
      return simplify_function(e.function(), simplify(e.operands()[0]));
  }
  return e;
}

// ---------------------------------------------------------------------------
// arithmetic

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const Expression terms[] = {a, b};
  return simplify_sum(terms);
}

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression(Rational(-a.constant()));
  const Expression factors[] = {Expression(-1LL), a};
  return simplify_product(factors);
}

Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

Expression operator*(const Expression& a, const Expression& b) {
  if (a.is_zero() || b.is_zero()) return Expression(0LL);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  const Expression factors[] = {a, b};
  return simplify_product(factors);
}

Expression operator/(const Expression& a, const Expression& b) { return simplify_quotient(a, b); }

Expression& operator+=(Expression& a, const Expression& b) { return a = a + b; }
Expression& operator-=(Expression& a, const Expression& b) { return a = a - b; }
Expression& operator*=(Expression& a, const Expression& b) { return a = a * b; }

Expression pow(const Expression& base, int exponent) { return simplify_power(base, exponent); }
Expression sin(const Expression& e) { return simplify_function(Func::Sin, e); }
Expression cos(const Expression& e) { return simplify_function(Func::Cos, e); }
Expression exp(const Expression& e) { return simplify_function(Func::Exp, e); }
Expression sqrt(const Expression& e) { return simplify_function(Func::Sqrt, e); }

// ---------------------------------------------------------------------------
// calculus and substitution

Expression differentiate(const Expression& e, std::string_view coord) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return Expression(0LL);
    case NodeKind::Symbol:
      return Expression(e.name() == coord ? 1LL : 0LL);
    case NodeKind::Sum: {
      Expression out;
      for (const auto& t : e.operands()) out += differentiate(t, coord);
      return out;
    }
    case NodeKind::Product: {
      auto ops = e.operands();
      Expression out;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expression d = differentiate(ops[i], coord);
        if (d.is_zero()) continue;
        Expression term = d;
        for (std::size_t j = 0; j < ops.size(); ++j)
          if (j != i) term *= ops[j];
        out += term;
      }
      return out;
    }
    case NodeKind::Power: {
      const Expression& base = e.operands()[0];
      Expression d = differentiate(base, coord);
      if (d.is_zero()) return Expression(0LL);
      return Expression(static_cast<long long>(e.exponent())) * pow(base, e.exponent() - 1) * d;
    }
    case NodeKind::Quotient: {
      const Expression& num = e.operands()[0];
      const Expression& den = e.operands()[1];
      Expression dn = differentiate(num, coord);
      Expression dd = differentiate(den, coord);
      if (dd.is_zero()) return dn / den;
      return (dn * den - num * dd) / pow(den, 2);
    }
    case NodeKind::Function: {
      const Expression& arg = e.operands()[0];
      Expression d = differentiate(arg, coord);
      if (d.is_zero()) return Expression(0LL);
      switch (e.function()) {
        case Func::Sin:
          return cos(arg) * d;
        case Func::Cos:
          return -(sin(arg) * d);
        case Func::Exp:
          return e * d;
        case Func::Sqrt:
          return d / (Expression(2LL) * e);
      }
    }
  }
  return Expression(0LL);
}

std::set<std::string> symbols(const Expression& e) {
  std::set<std::string> out;
  auto walk = [&](const Expression& x, auto& self) -> void {
    if (x.kind() == NodeKind::Symbol) {
      out.insert(x.name());
      return;
    }
    if (x.kind() == NodeKind::Constant) return;
    for (const auto& c : x.operands()) self(c, self);
  };
  walk(e, walk);
  return out;
}

Expression substitute(const Expression& e, const std::map<std::string, Expression, std::less<>>& values) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e;
    case NodeKind::Symbol: {
      auto it = values.find(e.name());
      return it == values.end() ? e : it->second;
    }
    case NodeKind::Sum: {
      Expression out;
      for (const auto& t : e.operands()) out += substitute(t, values);
      return out;
    }
    case NodeKind::Product: {
      Expression out(1LL);
      for (const auto& t : e.operands()) out *= substitute(t, values);
      return out;
    }
    case NodeKind::Power:
      return pow(substitute(e.operands()[0], values), e.exponent());
    case NodeKind::Quotient:
      return substitute(e.operands()[0], values) / substitute(e.operands()[1], values);
    case NodeKind::Function:
      return simplify_function(e.function(), substitute(e.operands()[0], values));
  }
  return e;
}

// ---------------------------------------------------------------------------
// evaluation

Assignment::Assignment(const CoordinateFrame& frame, std::span<const double> values) { set(frame, values); }

void Assignment::set(const CoordinateFrame& frame, std::span<const double> values) {
  if (static_cast<int>(values.size()) != frame.dimension())
    throw DimensionMismatch("assignment has " + std::to_string(values.size()) + " values for a frame of dimension " +
                            std::to_string(frame.dimension()));
  for (int i = 0; i < frame.dimension(); ++i) values_[frame.name(i)] = values[static_cast<std::size_t>(i)];
}

const double* Assignment::find(std::string_view name) const {
  auto it = values_.find(name);
  return it == values_.end() ? nullptr : &it->second;
}

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite value in ") + what);
  return v;
}

}  // namespace

double evaluate(const Expression& e, const Assignment& at) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return e.constant_double();
    case NodeKind::Symbol: {
      const double* v = at.find(e.name());
      if (v == nullptr) throw MissingSymbol(e.name());
      return *v;
    }
    case NodeKind::Sum: {
      double s = 0.0;
      for (const auto& t : e.operands()) s += evaluate(t, at);
      return checked(s, "sum");
    }
    case NodeKind::Product: {
      double p = 1.0;
      for (const auto& t : e.operands()) p *= evaluate(t, at);
      return checked(p, "product");
    }
    case NodeKind::Power: {
      const double b = evaluate(e.operands()[0], at);
      if (b == 0.0 && e.exponent() < 0) throw DomainError("zero raised to a negative power");
      return checked(std::pow(b, e.exponent()), "power");
    }
    case NodeKind::Quotient: {
      const double n = evaluate(e.operands()[0], at);
      const double d = evaluate(e.operands()[1], at);
      if (d == 0.0) throw DomainError("division by zero");
      return checked(n / d, "quotient");
    }
    case NodeKind::Function: {
      const double a = evaluate(e.operands()[0], at);
      switch (e.function()) {
        case Func::Sin:
          return std::sin(a);
        case Func::Cos:
          return std::cos(a);
        case Func::Exp:
          return checked(std::exp(a), "exp");
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative number");
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

}  // namespace jetgeo
