#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jetgeo/connection.hpp"
#include "jetgeo/jets.hpp"
#include "jetgeo/sampling.hpp"

namespace jetgeo {

/// dotΓ_A^k_ξ at an order-1 jet. A in 0..l-1, k absolute Latin, ξ Greek.
class DotGamma {
 public:
  DotGamma(int n, int m) : n_(n), m_(m), values_(static_cast<std::size_t>((n + m) * m * n), 0.0) {}
  int n() const { return n_; }
  int m() const { return m_; }
  double operator()(int a, int k, int xi) const { return values_[index(a, k, xi)]; }
  double& operator()(int a, int k, int xi) { return values_[index(a, k, xi)]; }
  std::span<const double> values() const& { return values_; }
  std::span<const double> values() && = delete;

 private:
  std::size_t index(int a, int k, int xi) const { return static_cast<std::size_t>((a * m_ + (k - n_)) * n_ + xi); }
  int n_;
  int m_;
  std::vector<double> values_;
};

/// Closed form dotΓ_A^k_ξ = Γ_A^k_ξ + Γ_A^k_i u^i_ξ − u^k_β(Γ_A^β_ξ + Γ_A^β_i u^i_ξ),
/// Christoffels evaluated at the base point of p. The split is p.n.
/// Throws FrameMismatch if the dimensions differ.
DotGamma dot_gamma(const Connection& g, const SubJet& p);
DotGamma dot_gamma(const ChristoffelTable& gamma, const SubJet& p);

/// Auxiliary Christoffel values Ξ_A_ξ^λ (base directions) and Ξ^α_h_ξ^λ
/// (jet directions, h absolute Latin) at one point.
class XiTable {
 public:
  XiTable(int n, int m);
  static XiTable random(int n, int m, Rng& rng);
  int n() const { return n_; }
  int m() const { return m_; }
  double& base(int a, int xi, int lambda) { return base_[base_index(a, xi, lambda)]; }
  double base(int a, int xi, int lambda) const { return base_[base_index(a, xi, lambda)]; }
  double& jet(int alpha, int h, int xi, int lambda) { return jet_[jet_index(alpha, h, xi, lambda)]; }
  double jet(int alpha, int h, int xi, int lambda) const { return jet_[jet_index(alpha, h, xi, lambda)]; }

 private:
  std::size_t base_index(int a, int xi, int lambda) const {
    return static_cast<std::size_t>((a * n_ + xi) * n_ + lambda);
  }
  std::size_t jet_index(int alpha, int h, int xi, int lambda) const {
    return static_cast<std::size_t>(((alpha * m_ + (h - n_)) * n_ + xi) * n_ + lambda);
  }
  int n_;
  int m_;
  std::vector<double> base_;
  std::vector<double> jet_;
};

/// Result of contracting the auxiliary connection Ω with D^1 and projecting
/// onto the vertical part: the base-direction block is dotΓ; the
/// jet-direction block (rows (k,ξ), columns (h,α)) must be the identity.
struct OmegaProjection {
  DotGamma dot;
  std::vector<double> jet_block;  // (m n) x (m n), row-major
};

OmegaProjection project_omega(const Connection& g, const XiTable& xi, const SubJet& p);
/// dotΓ computed through Ω; independent of xi.
DotGamma dot_gamma_via_xi(const Connection& g, const XiTable& xi, const SubJet& p);

/// The order-2 jet of Γ̈ over p: u^k_{λξ} = −(dotΓ_λ^k_ξ + u^j_λ dotΓ_j^k_ξ), symmetrized.
SubJet ddot_gamma(const Connection& g, const SubJet& p);

/// r[k, λ, ξ] with λ, ξ over 0..n-1 (symmetric) and k absolute Latin.
class Residual2 {
 public:
  Residual2(int n, int m) : n_(n), m_(m), values_(static_cast<std::size_t>(m * n * n), 0.0) {}
  int n() const { return n_; }
  int m() const { return m_; }
  double operator()(int k, int lambda, int xi) const { return values_[index(k, lambda, xi)]; }
  double& operator()(int k, int lambda, int xi) { return values_[index(k, lambda, xi)]; }
  std::span<const double> values() const& { return values_; }
  std::span<const double> values() && = delete;
  double max_abs() const;

 private:
  std::size_t index(int k, int lambda, int xi) const {
    return static_cast<std::size_t>(((k - n_) * n_ + lambda) * n_ + xi);
  }
  int n_;
  int m_;
  std::vector<double> values_;
};

/// Left side of the unparametrized totally geodesic equation at an order-2
/// jet, evaluated as written and averaged over λ <-> ξ.
Residual2 residual2(const Connection& g, const SubJet& q);

/// r[C, ξ, λ] = u^C_{xξxλ} + Γ_A^C_B u^A_{xξ} u^B_{xλ} − Θ_ξ^η_λ u^C_{xη}.
class ParamResidual2 {
 public:
  ParamResidual2(int n, int l) : n_(n), l_(l), values_(static_cast<std::size_t>(l * n * n), 0.0) {}
  int n() const { return n_; }
  int l() const { return l_; }
  double operator()(int c, int xi, int lambda) const { return values_[index(c, xi, lambda)]; }
  double& operator()(int c, int xi, int lambda) { return values_[index(c, xi, lambda)]; }
  std::span<const double> values() const& { return values_; }
  std::span<const double> values() && = delete;
  double max_abs() const;

 private:
  std::size_t index(int c, int xi, int lambda) const { return static_cast<std::size_t>((c * n_ + xi) * n_ + lambda); }
  int n_;
  int l_;
  std::vector<double> values_;
};

/// Throws DimensionMismatch unless g has q.l coordinates and theta has q.n.
ParamResidual2 param_residual2(const Connection& g, const Connection& theta, const SecJet& q);

/// Coefficients of Γ̇_proM at an order-1 section jet:
///   lift of ∂_{x^λ} has Θ_λ^ξ_η u^A_{xξ} on ∂_{u^A_{xη}}   -> horizontal(λ, A, η)
///   lift of ∂_{u^A} has −Γ_A^C_B u^B_{xξ} on ∂_{u^C_{xξ}}  -> vertical(A, C, ξ)
class DotGammaPro {
 public:
  DotGammaPro(int n, int l)
      : n_(n), l_(l), horizontal_(static_cast<std::size_t>(n * l * n), 0.0), vertical_(static_cast<std::size_t>(l * l * n), 0.0) {}
  int n() const { return n_; }
  int l() const { return l_; }
  double horizontal(int lambda, int a, int eta) const { return horizontal_[h_index(lambda, a, eta)]; }
  double& horizontal(int lambda, int a, int eta) { return horizontal_[h_index(lambda, a, eta)]; }
  double vertical(int a, int c, int xi) const { return vertical_[v_index(a, c, xi)]; }
  double& vertical(int a, int c, int xi) { return vertical_[v_index(a, c, xi)]; }

 private:
  std::size_t h_index(int lambda, int a, int eta) const { return static_cast<std::size_t>((lambda * l_ + a) * n_ + eta); }
  std::size_t v_index(int a, int c, int xi) const { return static_cast<std::size_t>((a * l_ + c) * n_ + xi); }
  int n_;
  int l_;
  std::vector<double> horizontal_;
  std::vector<double> vertical_;
};

DotGammaPro dot_gamma_pro(const Connection& g, const Connection& theta, const SecJet& p);

/// Order-2 section jet over p: u^C_{xξxλ} = −Γ_A^C_B u^A_{xξ} u^B_{xλ} + Θ_ξ^η_λ u^C_{xη}.
SecJet ddot_gamma_pro(const Connection& g, const Connection& theta, const SecJet& p);

/// Vertical part of a tangent vector w at p ∈ J^1(E,n) with respect to Γ̇:
/// components du^k_ξ + dotΓ_A^k_ξ du^A on ∂_{u^k_ξ}, zero elsewhere.
std::vector<double> vertical_part(const DotGamma& dot, const SubJet& p, std::span<const double> w);
/// Vertical part of v at t ∈ J^1(pro_M) with respect to Γ̇_proM: on
/// ∂_{u^C_{xη}} the value dv^C_η − dx^λ Θ_λ^ξ_η u^C_{xξ} + du^B Γ_B^C_A u^A_{xη}.
std::vector<double> vertical_part(const DotGammaPro& dot, const SecJet& t, std::span<const double> v);

/// Generators of the distribution R∘Γ̈ at p, in J^1(E,n) coordinates:
/// ∂_{u^λ} + u^j_λ ∂_{u^j} − (dotΓ_λ^k_ξ + u^j_λ dotΓ_j^k_ξ) ∂_{u^k_ξ}.
std::vector<std::vector<double>> distribution_fields(const Connection& g, const SubJet& p);

/// The same generators as expressions in the coordinates of j1_frame(frame
/// of g with split n).
std::vector<std::vector<Expression>> distribution_field_expressions(const Connection& g, int n);

/// Horizontal lifts of the total derivatives on J^1(pro_M):
/// ∂_{x^λ} + u^A_{xλ} ∂_{u^A} + u^C_{xλxη} ∂_{u^C_{xη}} with the second
/// derivatives taken from ddot_gamma_pro.
std::vector<std::vector<double>> pro_distribution_fields(const Connection& g, const Connection& theta,
                                                         const SecJet& t);

struct Trajectory {
  /// Order-2 jets at t = t0, t0 + h, ..., one per completed step.
  std::vector<SecJet> points;
  /// Set when integration stopped early (DomainError or non-finite state).
  std::optional<std::string> failure;
};

/// Classical RK4 for u'' = −Γ_A^C_B u'^A u'^B + Θ_1^1_1 u'^C, n = 1.
/// Throws DimensionMismatch for wrong sizes and Error for h <= 0 or steps < 0.
Trajectory integrate_geodesic(const Connection& g, const Connection& theta, std::span<const double> start,
                              std::span<const double> velocity, double h, int steps, double t0 = 0.0);

struct EquivalenceResult {
  bool equivalent = false;
  double max_deviation = 0.0;
  bool invariants_equal = false;
  double invariant_deviation = 0.0;
  int samples_used = 0;
};

/// Compares Γ̈ of both connections at opts.points random order-1 jets (base
/// point drawn as in sample_point, first derivatives uniform in [-1, 1])
/// and, as a fast path, the Grassmannian invariants. Throws FrameMismatch.
EquivalenceResult grass_equivalent(const Connection& g1, const Connection& g2, int n, const SamplingOptions& opts);

/// Random order-1 jet whose base point comes from sample_point(frame, opts, stream, index).
SubJet sample_subjet(const CoordinateFrame& frame, int n, const SamplingOptions& opts, std::uint64_t stream,
                     std::uint64_t index);

}  // namespace jetgeo
