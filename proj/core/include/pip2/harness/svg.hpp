#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pip2::harness::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

struct ColorLimits {
  double vmin = 0.0;
  double vmax = 1.0;
};

/// values(i, j) drawn with x_i on the vertical axis and t_j on the horizontal one. The
/// color scale spans exactly [min, max] of `values`; the limits are returned and also
/// written as data-vmin / data-vmax attributes of the root element.
std::string heatmap(const std::string& title, const Eigen::MatrixXd& values, double x_lo, double x_hi, double t_lo,
                    double t_hi, ColorLimits* limits = nullptr);

/// Reads back the data-vmin / data-vmax attributes of a heatmap.
ColorLimits read_limits(const std::string& svg_text);

}  // namespace pip2::harness::svg
