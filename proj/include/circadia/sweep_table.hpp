#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace circadia {

using Cell = std::variant<double, long long, std::string>;

/// Rectangular record of parameter points and observables. Each column has
/// a name and a unit label ("1" for dimensionless).
class SweepTable {
 public:
  SweepTable() = default;
  SweepTable(std::vector<std::string> names, std::vector<std::string> units);

  void add_row(std::vector<Cell> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t columns() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::string>& units() const noexcept { return units_; }
  const Cell& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }
  int column_index(const std::string& name) const;
  /// Numeric column; strings become NaN.
  std::vector<double> column(const std::string& name) const;

  nlohmann::json meta;

  /// Header `name[unit]`, numbers in shortest round-trip form.
  std::string to_csv() const;
  nlohmann::json to_json() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::string> units_;
  std::vector<std::vector<Cell>> rows_;
};

/// Deterministic decimal form of a double (%.17g, "nan", "inf").
std::string format_number(double v);

}  // namespace circadia
