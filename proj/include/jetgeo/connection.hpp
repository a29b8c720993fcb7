#pragma once

#include <functional>
#include <span>
#include <vector>

#include "jetgeo/expr.hpp"
#include "jetgeo/frame.hpp"
#include "jetgeo/sampling.hpp"

namespace jetgeo {

/// Christoffel values Γ_A^C_B at one point (0-based indices).
class ChristoffelTable {
 public:
  ChristoffelTable() = default;
  explicit ChristoffelTable(int dim) : dim_(dim), values_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dimension() const { return dim_; }
  double operator()(int a, int c, int b) const { return values_[index(a, c, b)]; }
  double& operator()(int a, int c, int b) { return values_[index(a, c, b)]; }

 private:
  std::size_t index(int a, int c, int b) const { return static_cast<std::size_t>((a * dim_ + c) * dim_ + b); }
  int dim_ = 0;
  std::vector<double> values_;
};

/// One Christoffel component Γ_A^C_B, 0-based.
struct ChristoffelEntry {
  int lower_a = 0;
  int lower_b = 0;
  int upper = 0;
  Expression expr;
};

/// Torsion-free linear connection given by symbolic Christoffel symbols in the
/// coordinates of its frame. Only A <= B is stored, so Γ_A^C_B = Γ_B^C_A holds
/// by construction.
class Connection {
 public:
  Connection() = default;
  /// The zero (flat, Cartesian) connection.
  explicit Connection(CoordinateFrame frame);

  /// `symbol(a, c, b)` is called once for every a <= b.
  static Connection generate(CoordinateFrame frame, const std::function<Expression(int a, int c, int b)>& symbol);
  /// Listing (A,B) and (B,A) with different expressions is an error; unlisted
  /// components are zero. Throws Error on out-of-range indices or expressions
  /// using symbols outside the frame.
  static Connection from_entries(CoordinateFrame frame, const std::vector<ChristoffelEntry>& entries);

  const CoordinateFrame& frame() const { return frame_; }
  int dimension() const { return frame_.dimension(); }

  /// Γ_a^c_b.
  const Expression& symbol(int a, int c, int b) const;
  ChristoffelTable evaluate(std::span<const double> point) const;
  bool is_structurally_zero() const;

 private:
  std::size_t slot(int a, int c, int b) const;
  CoordinateFrame frame_;
  std::vector<Expression> table_;
};

/// Γ' with Γ - Γ' = δ_A^C Φ_B + δ_B^C Φ_A. Throws DimensionMismatch.
Connection projective_shift(const Connection& g, std::span<const Expression> phi);

/// Thomas projective invariants Π_A^C_B.
class ProjInvariants {
 public:
  ProjInvariants(int dim, std::vector<Expression> values) : dim_(dim), values_(std::move(values)) {}
  int dimension() const { return dim_; }
  const Expression& operator()(int a, int c, int b) const {
    return values_[static_cast<std::size_t>((a * dim_ + c) * dim_ + b)];
  }
  std::span<const Expression> values() const& { return values_; }
  std::span<const Expression> values() && = delete;

 private:
  int dim_;
  std::vector<Expression> values_;
};

ProjInvariants thomas_pi(const Connection& g);

/// The n-Grassmannian invariants: coefficients of order 0..3 of the
/// totally-geodesic equation viewed as a polynomial in the u^i_α.
///
/// Greek arguments are 0..n-1, Latin arguments are absolute indices n..l-1.
/// The order-2 family is stored symmetrized under (j,α) <-> (i,β), which is
/// the form that is invariant (the unsymmetrized coefficient table is not).
class GrassInvariants {
 public:
  GrassInvariants(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }

  /// Γ_λ^k_ξ
  const Expression& g0(int lambda, int k, int xi) const;
  /// δ_ξ^β Γ_λ^k_i + δ_λ^β Γ_i^k_ξ − δ_i^k Γ_λ^β_ξ
  const Expression& g1(int lambda, int k, int i, int beta, int xi) const;
  /// δ_λ^α δ_ξ^β Γ_j^k_i − δ_ξ^α δ_i^k Γ_λ^β_j − δ_λ^α δ_i^k Γ_j^β_ξ, symmetrized
  const Expression& g2(int j, int k, int i, int alpha, int beta, int lambda, int xi) const;
  /// Γ_j^β_i
  const Expression& g3(int j, int beta, int i) const;

  /// All components in a fixed order (families 0..3 concatenated).
  std::vector<Expression> flatten() const;

  Expression& g0_ref(int lambda, int k, int xi);
  Expression& g1_ref(int lambda, int k, int i, int beta, int xi);
  Expression& g2_ref(int j, int k, int i, int alpha, int beta, int lambda, int xi);
  Expression& g3_ref(int j, int beta, int i);

 private:
  int n_;
  int m_;
  std::vector<Expression> g0_, g1_, g2_, g3_;
};

/// Throws BadSplit unless 1 <= n < l.
GrassInvariants grass_invariants(const Connection& g, int n);

/// Free data of an admissible Grassmannian perturbation: one function per
/// Greek index (psi) and one per Latin index (phi).
struct GrassShift {
  std::vector<Expression> psi;
  std::vector<Expression> phi;
};

/// Γ' = Γ − D with D the general solution of the equivalence relations:
/// D_λ^β_ξ = δ_ξ^β ψ_λ + δ_λ^β ψ_ξ, D_λ^k_i = δ_i^k ψ_λ, D_λ^β_i = δ_λ^β φ_i,
/// D_j^k_i = δ_j^k φ_i + δ_i^k φ_j, D_λ^k_ξ = D_j^β_i = 0.
/// Throws BadSplit or DimensionMismatch.
Connection grass_shift(const Connection& g, int n, const GrassShift& shift);

/// Γ' = Γ − D for an explicitly given difference table D. D is accepted if it
/// agrees, at the sample points of `opts`, with the admissible difference
/// rebuilt from its traces ψ_λ = D_λ^k_k (first Latin k) and
/// φ_i = D_1^1_i; otherwise throws InconsistentPerturbation naming the worst
/// component.
Connection grass_shift(const Connection& g, int n, const Connection& difference, const SamplingOptions& opts = {});

/// All l^2(l+1)/2 stored components, A <= B.
std::vector<Expression> components(const Connection& g);

/// Largest difference of Christoffel components over the sample points.
Deviation connection_deviation(const Connection& a, const Connection& b, const SamplingOptions& opts,
                               std::uint64_t stream = 0);

/// Every component an independent random_polynomial of the given degree.
Connection random_polynomial_connection(const CoordinateFrame& frame, int degree, Rng& rng);

}  // namespace jetgeo
