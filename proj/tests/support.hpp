#pragma once

#include <random>

#include "jetgeo/expr.hpp"

namespace jetgeo::testing {

/// Random smooth expression tree over the given symbols. Denominators and
/// sqrt arguments are kept positive so every sample point is admissible.
/// Nodes are built raw (no simplification).
inline Expression random_expression(std::mt19937_64& rng, const std::vector<std::string>& names, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_int_distribution<int> small(-4, 4);
  std::uniform_int_distribution<std::size_t> which(0, names.size() - 1);
  auto sub = [&] { return random_expression(rng, names, depth - 1); };
  switch (pick(rng)) {
    case 0:
      return Expression::symbol(names[which(rng)]);
    case 1:
      return Expression(Rational(small(rng), 1 + std::abs(small(rng))));
    case 2:
      return Expression::make_sum({sub(), sub(), sub()});
    case 3:
      return Expression::make_product({sub(), sub()});
    case 4:
      return Expression::make_power(sub(), std::uniform_int_distribution<int>(0, 3)(rng));
    case 5: {
      auto d = sub();
      return Expression::make_quotient(sub(), Expression::make_sum({Expression(2LL), Expression::make_power(d, 2)}));
    }
    case 6:
      return Expression::make_function(std::uniform_int_distribution<int>(0, 1)(rng) ? Func::Sin : Func::Cos, sub());
    case 7:
      return Expression::make_function(
          Func::Exp, Expression::make_product({Expression(Rational(1, 4)), Expression::make_function(Func::Sin, sub())}));
    default:
      return Expression::make_function(
          Func::Sqrt, Expression::make_sum({Expression(1LL), Expression::make_power(sub(), 2)}));
  }
}

}  // namespace jetgeo::testing
