#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace jetgeo::cli {

enum class Format { Csv, Json };

/// Empty, number or text.
using Cell = std::variant<std::monostate, double, std::string>;

/// Row-oriented report written as CSV (header + rows) or as a JSON array of
/// objects keyed by column name.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  void add(std::vector<Cell> row) {
    row.resize(columns_.size());
    rows_.push_back(std::move(row));
  }

  void write(std::ostream& out, Format format) const {
    if (format == Format::Csv) {
      write_row(out, columns_);
      for (const auto& row : rows_) {
        std::vector<std::string> text;
        for (const auto& c : row) text.push_back(to_text(c));
        write_row(out, text);
      }
      return;
    }
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (const double* d = std::get_if<double>(&row[i])) {
          obj[columns_[i]] = *d;
        } else if (const auto* s = std::get_if<std::string>(&row[i])) {
          obj[columns_[i]] = *s;
        } else {
          obj[columns_[i]] = nullptr;
        }
      }
      doc.push_back(std::move(obj));
    }
    out << doc.dump(2) << "\n";
  }

  static std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  static std::string to_text(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) return number(*d);
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    return {};
  }

  static void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      const std::string& f = fields[i];
      if (f.find_first_of(",\"\n") == std::string::npos) {
        out << f;
        continue;
      }
      out << '"';
      for (char ch : f) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    }
    out << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace jetgeo::cli
