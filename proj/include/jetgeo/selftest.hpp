#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jetgeo {

struct SelftestConfig {
  std::uint64_t seed = 0;
  /// Replaces every stated tolerance when set. Lower bounds that a
  /// counterexample must exceed are not affected.
  std::optional<double> tol;
};

/// One measured quantity of a criterion: value <= bound, or value > bound
/// when `exceed` is set.
struct Measurement {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool exceed = false;

  bool ok() const { return exceed ? value > bound : value <= bound; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Measurement> measurements;
  /// Set when the criterion could not be evaluated or a non-numeric
  /// condition failed.
  std::string failure;

  bool passed() const;
  /// "PASS  3 projective invariance: pi=1.2e-15<=1e-10 ..." with a fixed
  /// number format, so equal seeds give byte-identical lines.
  std::string line() const;
};

/// Runs the acceptance criteria in order. Sample counts are fixed per
/// criterion; only the seed and the tolerance can be changed.
std::vector<CriterionResult> run_acceptance(const SelftestConfig& config);

/// Single criterion by id (1..11).
CriterionResult run_criterion(int id, const SelftestConfig& config);

inline constexpr int kCriterionCount = 11;

}  // namespace jetgeo
