#include "jetgeo/frame.hpp"

#include <set>

#include "jetgeo/error.hpp"

namespace jetgeo {

CoordinateFrame::CoordinateFrame(std::vector<std::string> names, std::optional<int> split)
    : names_(std::move(names)), split_(split.value_or(static_cast<int>(names_.size()))) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error("empty coordinate name");
    if (!seen.insert(n).second) throw Error("duplicate coordinate name '" + n + "'");
  }
  if (split_ < 1 || split_ > dimension())
    throw BadSplit("split " + std::to_string(split_) + " outside 1.." + std::to_string(dimension()));
}

CoordinateFrame CoordinateFrame::numbered(std::string_view prefix, int count, std::optional<int> split) {
  std::vector<std::string> names;
  for (int i = 1; i <= count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return CoordinateFrame(std::move(names), split);
}

std::optional<int> CoordinateFrame::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

}  // namespace jetgeo
