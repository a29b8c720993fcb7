#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jetgeo/connection.hpp"
#include "jetgeo/geodesy.hpp"
#include "jetgeo/jets.hpp"
#include "jetgeo/sampling.hpp"

namespace jetgeo {

/// Which order-1 jet space a map or field lives on.
enum class JetKind {
  Submanifold,  // J^1(E,n), coordinates as in j1_frame
  Section,      // J^1(pro_M), coordinates as in j1pro_frame
};

/// Smooth map of order-1 jet coordinates given by expressions in the
/// coordinates of `frame`.
class JetMap {
 public:
  /// `prolonged` marks maps obtained by prolonging a point map; those preserve
  /// the contact structure by construction and skip the contact check.
  JetMap(CoordinateFrame frame, std::vector<Expression> components, JetKind kind, bool prolonged = false);

  const CoordinateFrame& frame() const { return frame_; }
  const std::vector<Expression>& components() const { return components_; }
  JetKind kind() const { return kind_; }
  bool prolonged() const { return prolonged_; }

  std::vector<double> apply(std::span<const double> point) const;
  Eigen::MatrixXd jacobian(std::span<const double> point) const;

 private:
  CoordinateFrame frame_;
  std::vector<Expression> components_;
  std::vector<Expression> partials_;  // row-major components x coordinates
  JetKind kind_;
  bool prolonged_;
};

/// Vector field on order-1 jet coordinates.
class JetField {
 public:
  JetField(CoordinateFrame frame, std::vector<Expression> components, JetKind kind);

  const CoordinateFrame& frame() const { return frame_; }
  const std::vector<Expression>& components() const { return components_; }
  JetKind kind() const { return kind_; }

  std::vector<double> value(std::span<const double> point) const;
  Eigen::MatrixXd jacobian(std::span<const double> point) const;

 private:
  CoordinateFrame frame_;
  std::vector<Expression> components_;
  std::vector<Expression> partials_;
  JetKind kind_;
};

/// Prolongation to J^1(E,n) of the point map u ↦ F(u) of E. `e` carries the
/// split n; F is given in the coordinates of e. The first-order part is
/// ũ^k_ξ = T^k_λ (T^{-1})^λ_ξ with T^A_λ = ∂_λ F^A + u^j_λ ∂_j F^A.
JetMap prolong_point_map(const CoordinateFrame& e, const std::vector<Expression>& f);

/// Prolongation of the point field ξ^A ∂_{u^A}:
/// φ^k_ξ = D_ξ ξ^k − u^k_β D_ξ ξ^β with D_ξ = ∂_ξ + u^j_ξ ∂_j.
JetField prolong_point_field(const CoordinateFrame& e, const std::vector<Expression>& xi);

/// Generators of the parametrized distribution as expressions in
/// j1pro_frame(theta frame, g frame).
std::vector<std::vector<Expression>> pro_distribution_field_expressions(const Connection& g, const Connection& theta);

struct CheckRow {
  std::uint64_t index = 0;
  std::vector<double> point;
  double residual = 0.0;
  bool passed = false;
  bool skipped = false;
  std::string note;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  double tol = 0.0;
  double worst = 0.0;

  int checked() const;
  int passed_count() const;
  int skipped_count() const;
  /// At least one sample checked and every checked sample passed.
  bool passed() const;
  /// "PASS k/N tol=<t>" or "FAIL k/N tol=<t>", N = checked samples.
  std::string summary() const;
};

/// Pushes the distribution generators at each sampled jet through the
/// Jacobian of `map` and measures, by least squares, how far they are from the
/// span of the generators at the image point. The residual is the largest
/// least-squares residual norm divided by max(1, ‖generators‖_F). For maps
/// that are not prolonged point maps the contact condition is checked too and
/// the residual is the larger of the two. Samples where evaluation fails
/// (DomainError, SingularJacobian) are skipped and reported.
/// Section-kind maps use `theta` (flat if omitted) for the parametrized distribution.
CheckReport preserves_distribution(const JetMap& map, const Connection& g, int n, const SamplingOptions& opts,
                                   const Connection* theta = nullptr);

/// Infinitesimal version: the commutators [f, X_λ] must lie in the span of
/// the generators X_μ; the commutator uses symbolic derivatives.
CheckReport field_preserves_distribution(const JetField& f, const Connection& g, int n, const SamplingOptions& opts,
                                         const Connection* theta = nullptr);

/// Samples points of the parametrized equation (ddot_gamma_pro of random
/// order-1 section jets) and evaluates param_residual2 after acting with aff.
CheckReport affine_symmetry_check(const Connection& g, const Connection& theta, const AffineMap& aff,
                                  const SamplingOptions& opts);

/// Same check for a general reparametrization x̃ = φ(x).
CheckReport reparametrization_check(const Connection& g, const Connection& theta, const ParamMap& phi,
                                    const SamplingOptions& opts);

struct OrbitReport {
  /// max |cover1(affine_act(a, t)) − cover1(t)| over samples and maps.
  double constancy = 0.0;
  /// max |cover1(preimage(p)) − p| with the identity-block preimage.
  double preimage = 0.0;
  /// max residual2(g, cover2(q)) over q = ddot_gamma_pro(g, flat, t).
  double factoring = 0.0;
  int samples = 0;
  int maps_per_sample = 0;
};

OrbitReport orbit_quotient_check(const Connection& g, int n, const SamplingOptions& opts, int maps_per_sample = 10);

/// SecJet with u^ξ_{xλ} = δ over p (x = (u^λ)).
SecJet identity_preimage(const SubJet& p);

/// Random order-1 section jet: x from the theta frame, u from the g frame (as
/// in sample_point), Greek block I + 0.3 U with |det| >= 0.25, the other first
/// derivatives uniform in [-1, 1].
SecJet sample_secjet(const CoordinateFrame& e, const CoordinateFrame& params, const SamplingOptions& opts,
                     std::uint64_t stream, std::uint64_t index);

}  // namespace jetgeo
