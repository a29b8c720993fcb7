#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jetgeo {

/// Ordered coordinate names with a divided-chart split: the first `split`
/// names are the base coordinates u^λ, the rest are u^i.
class CoordinateFrame {
 public:
  CoordinateFrame() = default;
  /// split defaults to the full dimension. Throws BadSplit / Error on
  /// duplicate names or a split outside 1..dimension.
  explicit CoordinateFrame(std::vector<std::string> names, std::optional<int> split = std::nullopt);

  /// Frame with names prefix1..prefixN.
  static CoordinateFrame numbered(std::string_view prefix, int count, std::optional<int> split = std::nullopt);

  int dimension() const { return static_cast<int>(names_.size()); }
  int split() const { return split_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  std::optional<int> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  CoordinateFrame with_split(int split) const { return CoordinateFrame(names_, split); }

  /// Same names in the same order (the split may differ).
  bool same_coordinates(const CoordinateFrame& other) const { return names_ == other.names_; }

  friend bool operator==(const CoordinateFrame&, const CoordinateFrame&) = default;

 private:
  std::vector<std::string> names_;
  int split_ = 0;
};

}  // namespace jetgeo
