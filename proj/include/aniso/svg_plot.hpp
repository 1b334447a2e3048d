#pragma once

#include <string>
#include <vector>

namespace aniso {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
};

/// Renders line series as a standalone SVG document. Non-positive values are
/// skipped on logarithmic axes.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_svg(const std::string& path, const PlotSpec& spec,
               const std::vector<PlotSeries>& series);

}  // namespace aniso
