#pragma once

#include <Eigen/Dense>

#include <compare>
#include <span>
#include <vector>

#include "jetgeo/expr.hpp"
#include "jetgeo/frame.hpp"
#include "jetgeo/rng.hpp"

namespace jetgeo {

/// Symmetric multi-index: a sorted tuple of 0-based base indices.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> indices);
  MultiIndex(std::initializer_list<int> indices) : MultiIndex(std::vector<int>(indices)) {}

  int order() const { return static_cast<int>(indices_.size()); }
  std::span<const int> indices() const { return indices_; }
  /// (σ, λ), re-sorted.
  MultiIndex with(int index) const;
  /// σ with its last (largest) entry removed; order must be >= 1.
  MultiIndex without_last() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> indices_;
};

/// All multi-indices of the given order over 0..n-1, in lexicographic order
/// of the sorted tuples. This order is used by every file format.
std::vector<MultiIndex> multi_indices(int n, int order);
/// Position of sigma in multi_indices(n, sigma.order()).
std::size_t multi_index_rank(const MultiIndex& sigma, int n);

/// Derivative values u^c_σ for components c and 1 <= |σ| <= r, dense.
class DerivativeTable {
 public:
  DerivativeTable() = default;
  DerivativeTable(int components, int n, int r);

  int components() const { return components_; }
  int n() const { return n_; }
  int order() const { return static_cast<int>(by_order_.size()); }

  double get(int component, const MultiIndex& sigma) const;
  double& at(int component, const MultiIndex& sigma);
  /// Same values, orders above r dropped.
  DerivativeTable truncated(int r) const;

 private:
  std::size_t offset(int component, const MultiIndex& sigma) const;
  int components_ = 0;
  int n_ = 0;
  std::vector<std::vector<double>> by_order_;
};

/// Point of J^r(E, n) in a divided chart: base (u^λ, u^i) and u^i_σ.
/// Latin indices are absolute, n..l-1.
struct SubJet {
  SubJet() = default;
  SubJet(int n, int m, int r);

  int n = 0;
  int m = 0;
  std::vector<double> base;
  DerivativeTable derivs;

  int dimension() const { return n + m; }
  int order() const { return derivs.order(); }
  double d(int k, const MultiIndex& sigma) const { return derivs.get(k - n, sigma); }
  double& d(int k, const MultiIndex& sigma) { return derivs.at(k - n, sigma); }
  double first(int k, int xi) const { return d(k, MultiIndex{xi}); }
  double& first(int k, int xi) { return d(k, MultiIndex{xi}); }
  double second(int k, int lambda, int xi) const { return d(k, MultiIndex{lambda, xi}); }
  double& second(int k, int lambda, int xi) { return d(k, MultiIndex{lambda, xi}); }
};

/// Point of J^r(pro_M): (x^λ, u^A, u^A_{xσ}) over n parameters, 1 <= n <= l.
struct SecJet {
  SecJet() = default;
  SecJet(int n, int l, int r);

  int n = 0;
  int l = 0;
  std::vector<double> x;
  std::vector<double> u;
  DerivativeTable derivs;

  int order() const { return derivs.order(); }
  double d(int a, const MultiIndex& sigma) const { return derivs.get(a, sigma); }
  double& d(int a, const MultiIndex& sigma) { return derivs.at(a, sigma); }
  double first(int a, int lambda) const { return d(a, MultiIndex{lambda}); }
  double& first(int a, int lambda) { return d(a, MultiIndex{lambda}); }
  double second(int a, int lambda, int xi) const { return d(a, MultiIndex{lambda, xi}); }
  double& second(int a, int lambda, int xi) { return d(a, MultiIndex{lambda, xi}); }

  /// (u^ξ_{xλ}), row ξ, column λ.
  Eigen::MatrixXd greek_block() const;
  double greek_block_determinant() const;
  /// Full l×n Jacobian has rank n.
  bool is_immersion() const;
};

/// Parametrized submanifold / local section: s^A(x^1..x^n).
class ParamMap {
 public:
  /// Throws Error if a component uses a symbol outside `params`.
  ParamMap(CoordinateFrame params, std::vector<Expression> components);

  const CoordinateFrame& params() const { return params_; }
  const std::vector<Expression>& components() const { return components_; }
  int n() const { return params_.dimension(); }
  int l() const { return static_cast<int>(components_.size()); }

 private:
  CoordinateFrame params_;
  std::vector<Expression> components_;
};

/// x̃ = a x + b on R^n.
struct AffineMap {
  /// Throws Error if a is not square, b does not match, or det(a) = 0.
  AffineMap(Eigen::MatrixXd a, Eigen::VectorXd b);
  static AffineMap identity(int n);

  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  int n() const { return static_cast<int>(b.size()); }
  /// (this ∘ first)(x) = this(first(x)).
  AffineMap after(const AffineMap& first) const;
};

/// r-jet of s at x (any r >= 0). DomainError propagates.
SecJet prolong(const ParamMap& s, std::span<const double> x, int r);

/// Default relative threshold for a singular Greek block.
inline constexpr double kSingularThreshold = 1e-12;

/// Order-1 unparametrized jet of the submanifold parametrized by t.
/// Throws SingularJacobian when |det(u^ξ_{xλ})| <= threshold · max|u^ξ_{xλ}|^n.
SubJet cover1(const SecJet& t, double threshold = kSingularThreshold);
/// Order-2 version; t must have order >= 2.
SubJet cover2(const SecJet& t, double threshold = kSingularThreshold);

/// Action of an affine reparametrization on a jet of any order.
SecJet affine_act(const AffineMap& g, const SecJet& t);

/// Action of a general reparametrization x̃ = φ(x) on a jet of order <= 2.
/// φ is a ParamMap with n components over the same n parameters.
SecJet reparametrize(const ParamMap& phi, const SecJet& t);

/// Order-1 coordinates as flat vectors.
/// J^1(E,n): u^A (l values), then u^k_ξ for k = n..l-1 (outer), ξ (inner).
/// J^1(pro_M): x^λ (n), u^A (l), then u^A_{xλ} for A (outer), λ (inner).
std::vector<double> coordinates(const SubJet& p);
std::vector<double> coordinates(const SecJet& t);
SubJet subjet_from_coordinates(int n, int m, std::span<const double> c);
SecJet secjet_from_coordinates(int n, int l, std::span<const double> c);
int j1_dimension(int n, int m);
int j1pro_dimension(int n, int l);

/// Coordinate names for J^1(E,n): the names of `e`, then "<u^k>_<u^ξ>".
/// The split of `e` gives n. Throws Error if names collide.
CoordinateFrame j1_frame(const CoordinateFrame& e);
/// Names for J^1(pro_M): parameter names, names of `e`, then "<u^A>_<x^λ>".
CoordinateFrame j1pro_frame(const CoordinateFrame& params, const CoordinateFrame& e);

/// T(cover1) applied to a tangent vector v (J^1(pro_M) coordinates) at t;
/// result in J^1(E,n) coordinates.
std::vector<double> cover1_pushforward(const SecJet& t, std::span<const double> v,
                                       double threshold = kSingularThreshold);

/// Random order-r jets for sampling. Coordinates uniform in [-radius, radius];
/// secjets get a Greek block I + 0.3 U (U uniform in [-1, 1]) with |det| >= 0.25.
SubJet random_subjet(int n, int m, int r, Rng& rng, double radius = 1.0);
SecJet random_secjet(int n, int l, int r, Rng& rng, double radius = 1.0);
AffineMap random_affine_map(int n, Rng& rng);

}  // namespace jetgeo
