#pragma once

#include <string>
#include <utility>
#include <vector>

namespace linkrl::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line chart (one polyline per series, legend included).
std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

// Grouped bar chart; every series must provide one value per category.
std::string bar_chart(const std::vector<std::string>& categories,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series,
                      const std::string& title, const std::string& y_label);

void write_file(const std::string& path, const std::string& content);

}  // namespace linkrl::svg
