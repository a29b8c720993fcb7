#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jetgeo/connection.hpp"
#include "jetgeo/jets.hpp"
#include "jetgeo/symmetry.hpp"

namespace jetgeo {

/// Contents of a connection JSON file:
///   {"coords": [...], "n": 1,
///    "christoffel": [{"lower": [A, B], "upper": C, "expr": "..."}],
///    "singular_points": [[...], ...],
///    "metric": [{"lower": [A, B], "expr": "..."}]}
/// Indices are 1-based. "n", "christoffel", "singular_points" and "metric" are
/// optional; the metric is only used to report speeds along geodesics.
struct ConnectionSpec {
  Connection connection;
  std::vector<std::vector<double>> singular_points;
  /// Symmetric l×l matrix, empty when the file has no metric.
  std::vector<std::vector<Expression>> metric;

  const CoordinateFrame& frame() const { return connection.frame(); }
  /// The declared split, if the file has "n".
  std::optional<int> n() const;
  /// Sampling options with the declared singular points filled in.
  SamplingOptions sampling(SamplingOptions base) const;
};

/// Every loader throws LoadError; messages start with "<source>:<line>:<column>:".
ConnectionSpec parse_connection_spec(std::string_view text, std::string_view source = "<input>");
ConnectionSpec load_connection_spec(const std::filesystem::path& path);

/// Serialized form accepted by parse_connection_spec.
std::string connection_spec_json(const ConnectionSpec& spec);

using Jet = std::variant<SubJet, SecJet>;

/// Jet file: one object or an array of objects
///   {"kind": "secjet", "n": 1, "l": 2, "r": 2, "x": [...], "u": [...],
///    "derivs": [{"A": 2, "sigma": [1, 1], "value": 8.0}]}
///   {"kind": "subjet", "n": 1, "l": 2, "r": 2, "u": [...], "derivs": [...]}
/// A and sigma are 1-based; for subjets A ranges over n+1..l. Every
/// derivative up to order r must be listed exactly once (sigma in any order).
std::vector<Jet> parse_jets(std::string_view text, std::string_view source = "<input>");
std::vector<Jet> load_jets(const std::filesystem::path& path);

std::string jet_json(const Jet& jet);

/// Symmetry candidate file. Kinds:
///   {"kind": "point_map",   "components": [...]}   prolonged to J^1(E,n)
///   {"kind": "point_field", "components": [...]}   prolonged to J^1(E,n)
///   {"kind": "jet_map",   "space": "submanifold"|"section", "components": [...]}
///   {"kind": "jet_field", "space": "submanifold"|"section", "components": [...]}
///   {"kind": "affine", "a": [[...], ...], "b": [...]}
///   {"kind": "reparametrization", "components": [...]}
/// Point-map components use the connection coordinates. Jet-map components use
/// the names of j1_frame (submanifold) or j1pro_frame (section) built from
/// the connection frame and parameters x1..xn. Reparametrizations use x1..xn.
struct SymmetrySpec {
  std::string kind;
  std::optional<JetMap> map;
  std::optional<JetField> field;
  std::optional<AffineMap> affine;
  std::optional<ParamMap> reparametrization;
};

SymmetrySpec parse_symmetry_spec(std::string_view text, const CoordinateFrame& e, int n,
                                 std::string_view source = "<input>");
SymmetrySpec load_symmetry_spec(const std::filesystem::path& path, const CoordinateFrame& e, int n);

/// Parameter frame x1..xn used by section-kind specs.
CoordinateFrame parameter_frame(int n);

}  // namespace jetgeo
