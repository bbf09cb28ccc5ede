#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simmatch::svg {

struct Series {
  std::string label;
  std::vector<double> y;  // same length as the plot's x
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;
  bool log_x = false;
};

// Minimal standalone SVG line chart with axes, ticks and a legend.
// Non-finite points break the line.
void write_line_plot(std::ostream& out, const LinePlot& plot);

}  // namespace simmatch::svg
