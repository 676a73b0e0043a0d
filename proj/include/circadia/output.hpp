#pragma once

#include <string>
#include <vector>

namespace circadia {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line plot. Non-finite points break the polyline.
std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                          const std::string& ylabel);

/// Writes the file, creating parent directories.
void write_text(const std::string& path, const std::string& content);

}  // namespace circadia
