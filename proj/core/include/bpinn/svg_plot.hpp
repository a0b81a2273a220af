#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bpinn {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
};

/// Self-contained SVG line plot. Non-positive values are dropped on log axes.
std::string line_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace bpinn
