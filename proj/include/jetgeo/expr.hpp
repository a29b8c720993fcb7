#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetgeo/frame.hpp"

namespace jetgeo {

using Rational = boost::multiprecision::cpp_rational;

enum class NodeKind { Constant, Symbol, Sum, Product, Power, Quotient, Function };

enum class Func { Sin, Cos, Exp, Sqrt };

/// Immutable scalar expression tree over named coordinates.
///
/// Constants are exact rationals; real arithmetic only happens in evaluate().
/// The arithmetic operators and elementary functions below return simplified
/// trees. The make_* factories build raw nodes without any rewriting and are
/// mainly useful for exercising simplify().
class Expression {
 public:
  Expression();  // the constant 0
  Expression(long long value);  // NOLINT(google-explicit-constructor)
  Expression(Rational value);   // NOLINT(google-explicit-constructor)
  Expression(double) = delete;  // use a Rational or parse() for decimals

  static Expression symbol(std::string name);

  static Expression make_sum(std::vector<Expression> terms);
  static Expression make_product(std::vector<Expression> factors);
  static Expression make_power(Expression base, int exponent);
  static Expression make_quotient(Expression numerator, Expression denominator);
  static Expression make_function(Func f, Expression argument);

  NodeKind kind() const;
  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_zero() const;
  bool is_one() const;

  /// Valid only for Constant nodes.
  const Rational& constant() const;
  /// The constant rounded to double (cached).
  double constant_double() const;
  /// Valid only for Symbol nodes.
  const std::string& name() const;
  /// Children of Sum / Product nodes; {base} for Power, {num, den} for
  /// Quotient, {argument} for Function.
  std::span<const Expression> operands() const;
  /// Valid only for Power nodes.
  int exponent() const;
  /// Valid only for Function nodes.
  Func function() const;

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression& operator+=(Expression& a, const Expression& b);
Expression& operator-=(Expression& a, const Expression& b);
Expression& operator*=(Expression& a, const Expression& b);

Expression pow(const Expression& base, int exponent);
Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression exp(const Expression& e);
Expression sqrt(const Expression& e);

/// Constant folding, 0/1 absorption, flattening of sums and products and
/// collection of identical monomials. Idempotent.
Expression simplify(const Expression& e);

/// Total order on trees; 0 iff structurally equal.
int compare(const Expression& a, const Expression& b);
bool structurally_equal(const Expression& a, const Expression& b);

struct ExpressionLess {
  bool operator()(const Expression& a, const Expression& b) const { return compare(a, b) < 0; }
};

/// Exact partial derivative; symbols other than `coord` are constants.
Expression differentiate(const Expression& e, std::string_view coord);

std::set<std::string> symbols(const Expression& e);

/// Replace symbols by expressions (simultaneously).
Expression substitute(const Expression& e, const std::map<std::string, Expression, std::less<>>& values);

/// Map from coordinate name to real value.
class Assignment {
 public:
  Assignment() = default;
  Assignment(const CoordinateFrame& frame, std::span<const double> values);

  void set(std::string name, double value) { values_[std::move(name)] = value; }
  void set(const CoordinateFrame& frame, std::span<const double> values);
  const double* find(std::string_view name) const;

 private:
  std::map<std::string, double, std::less<>> values_;
};

/// Throws MissingSymbol or DomainError.
double evaluate(const Expression& e, const Assignment& at);

/// Parse infix text: + - * / ^, parentheses, sin cos exp sqrt, decimal and
/// integer literals, identifiers from `frame`. Exponents must reduce to
/// integers. Throws SyntaxError or UnknownSymbol.
Expression parse(std::string_view text, const CoordinateFrame& frame);

/// Text that parse() maps back to a structurally equal tree.
std::string to_string(const Expression& e);

/// Short grammar description used in error messages.
std::string_view expression_grammar();

}  // namespace jetgeo
