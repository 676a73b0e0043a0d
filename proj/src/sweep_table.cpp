#include "circadia/sweep_table.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "circadia/errors.hpp"

namespace circadia {

SweepTable::SweepTable(std::vector<std::string> names, std::vector<std::string> units)
    : names_(std::move(names)), units_(std::move(units)) {
  if (names_.size() != units_.size()) throw ValidationError("units", "one unit label per column");
}

void SweepTable::add_row(std::vector<Cell> row) {
  if (row.size() != names_.size()) throw ValidationError("row", "width differs from the header");
  rows_.push_back(std::move(row));
}

int SweepTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return int(i);
  return -1;
}

std::vector<double> SweepTable::column(const std::string& name) const {
  const int c = column_index(name);
  if (c < 0) throw ValidationError(name, "no such column");
  std::vector<double> out;
  for (const auto& r : rows_) {
    const Cell& v = r[c];
    if (auto d = std::get_if<double>(&v)) out.push_back(*d);
    else if (auto i = std::get_if<long long>(&v)) out.push_back(double(*i));
    else out.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return format_number(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

nlohmann::json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_number(*d);
    return *d;
  }
  if (auto i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < names_.size(); ++i)
    os << (i ? "," : "") << csv_escape(names_[i] + "[" + units_[i] + "]");
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::json SweepTable::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t i = 0; i < names_.size(); ++i) cols.push_back({{"name", names_[i]}, {"unit", units_[i]}});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(std::move(row));
  }
  return {{"columns", cols}, {"rows", rows}, {"meta", meta}};
}

}  // namespace circadia
