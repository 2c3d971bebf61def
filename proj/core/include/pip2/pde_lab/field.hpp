#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

namespace pip2::pde_lab {

/// Uniform 1-D grid. Closed grids include both endpoints; periodic grids omit x_hi.
struct Grid1D {
  int n = 2;
  double x_lo = 0.0;
  double x_hi = 1.0;
  bool periodic = false;

  static Grid1D closed(int n, double x_lo, double x_hi) { return {n, x_lo, x_hi, false}; }
  static Grid1D periodic_grid(int n, double x_lo, double x_hi) { return {n, x_lo, x_hi, true}; }

  double length() const { return x_hi - x_lo; }
  double spacing() const { return periodic ? length() / n : length() / (n - 1); }
  double point(int i) const { return x_lo + spacing() * i; }
  Eigen::VectorXd points() const;
  /// Quadrature weights: trapezoidal on closed grids, uniform on periodic ones.
  Eigen::VectorXd weights() const;
  /// Index of the node nearest to x (ties go to the lower index).
  int nearest(double x) const;
  void validate() const;

  bool operator==(const Grid1D&) const = default;
};

/// Solution values on a space-time grid: values(i, j) = u(x_i, t_j).
struct SpaceTimeField {
  Eigen::MatrixXd values;
  Grid1D xgrid;
  Grid1D tgrid;

  void validate() const;
};

/// Writes `<stem>.json` (grids, shape, `metadata_json` under "metadata") and `<stem>.bin`
/// (little-endian float64, row-major n_x x n_t).
void save_field(const std::filesystem::path& manifest_path, const SpaceTimeField& field,
                const std::string& metadata_json = "{}");
SpaceTimeField load_field(const std::filesystem::path& manifest_path);

}  // namespace pip2::pde_lab
