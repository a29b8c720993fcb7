#pragma once

// Small symbolic matrices (cofactor expansion); intended for sizes <= 4.

#include <vector>

#include "jetgeo/expr.hpp"

namespace jetgeo::detail {

using SymMatrix = std::vector<std::vector<Expression>>;

inline SymMatrix minor_of(const SymMatrix& m, std::size_t row, std::size_t col) {
  SymMatrix out;
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (r == row) continue;
    std::vector<Expression> line;
    for (std::size_t c = 0; c < m.size(); ++c)
      if (c != col) line.push_back(m[r][c]);
    out.push_back(std::move(line));
  }
  return out;
}

inline Expression determinant(const SymMatrix& m) {
  if (m.empty()) return Expression(1LL);
  if (m.size() == 1) return m[0][0];
  Expression det;
  for (std::size_t col = 0; col < m.size(); ++col) {
    if (m[0][col].is_zero()) continue;
    const Expression term = m[0][col] * determinant(minor_of(m, 0, col));
    det = col % 2 ? det - term : det + term;
  }
  return det;
}

/// Adjugate divided by the determinant.
inline SymMatrix inverse(const SymMatrix& m) {
  const std::size_t l = m.size();
  const Expression det = determinant(m);
  SymMatrix inv(l, std::vector<Expression>(l));
  for (std::size_t r = 0; r < l; ++r)
    for (std::size_t c = 0; c < l; ++c) {
      const Expression cof = determinant(minor_of(m, c, r));
      inv[r][c] = ((r + c) % 2 ? -cof : cof) / det;
    }
  return inv;
}

}  // namespace jetgeo::detail
