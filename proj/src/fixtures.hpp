#pragma once

// Test fixtures shared by the unit tests and the self-test. Not installed.

#include <vector>

#include "jetgeo/connection.hpp"

namespace jetgeo::fixtures {

using Metric = std::vector<std::vector<Expression>>;

/// Levi-Civita connection Γ_A^C_B = ½ g^{CD}(∂_A g_DB + ∂_B g_DA − ∂_D g_AB).
/// The inverse metric is formed symbolically (cofactors), so keep l small.
Connection levi_civita(const CoordinateFrame& frame, const Metric& metric);

/// Round metric of S^2 in stereographic coordinates (u, v): 4 (1 + u^2 + v^2)^-2 δ.
Metric sphere_metric(const CoordinateFrame& frame);

/// Frame {"u", "v"} with split 1.
CoordinateFrame sphere_frame();

/// g_AB(p) v^A v^B.
double metric_speed(const CoordinateFrame& frame, const Metric& metric, std::span<const double> point,
                    std::span<const double> velocity);

}  // namespace jetgeo::fixtures
