#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jetgeo/expr.hpp"
#include "jetgeo/frame.hpp"
#include "jetgeo/rng.hpp"

namespace jetgeo {

/// Controls randomized numeric comparison of symbolic quantities.
struct SamplingOptions {
  int points = 12;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  /// Points are drawn uniformly from [-radius, radius]^l.
  double radius = 1.0;
  std::vector<std::vector<double>> singular_points;
  double clearance = 1e-3;
};

/// The index-th sample point for `stream`; redraws until it is at least
/// `clearance` away from every singular point.
std::vector<double> sample_point(const CoordinateFrame& frame, const SamplingOptions& opts, std::uint64_t stream,
                                 std::uint64_t index);

std::vector<double> evaluate_all(std::span<const Expression> values, const CoordinateFrame& frame,
                                 std::span<const double> point);

struct Deviation {
  double max_abs = 0.0;
  int points_used = 0;
};

/// Largest componentwise |a - b| over opts.points sample points. Points where
/// either side raises DomainError are replaced by fresh draws (at most
/// 20 * points attempts in total). Throws DimensionMismatch if the lists
/// differ in length.
Deviation max_deviation(std::span<const Expression> a, std::span<const Expression> b, const CoordinateFrame& frame,
                        const SamplingOptions& opts, std::uint64_t stream = 0);

/// Polynomial of total degree <= `degree` in the frame coordinates with
/// coefficients k/1000, k uniform in [-1000, 1000].
Expression random_polynomial(const CoordinateFrame& frame, int degree, Rng& rng);

}  // namespace jetgeo
