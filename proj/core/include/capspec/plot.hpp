#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace capspec {

// Minimal dependency-free SVG line plots, fixed 800x500 viewport.
struct PlotSeries {
  std::string label;
  std::string color;  // any SVG color
  std::vector<std::pair<double, double>> points;
};

void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series);

} // namespace capspec
