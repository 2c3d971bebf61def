#pragma once

#include <Eigen/Dense>

#include "pip2/pde_lab/field.hpp"

namespace pip2::pde_lab {

struct BurgersOptions {
  double cfl = 0.5;
  double dt_max = 0.01;
  int contour_points = 32;
};

/// u_t + u u_x = nu^2 u_xx on a periodic grid, Fourier pseudo-spectral in space (2/3
/// dealiasing) and ETDRK4 in time. Output at n_t uniform times on [0, T].
/// Throws NumericalError when |u| exceeds 1e3 max|u0|.
SpaceTimeField solve_burgers(const Eigen::VectorXd& u0, const Grid1D& grid, double nu, double T, int n_t,
                             const BurgersOptions& options = {});

/// Trigonometric interpolation of periodic samples onto n_new points (Nyquist mode dropped).
Eigen::VectorXd spectral_resample(const Eigen::VectorXd& u, int n_new);

}  // namespace pip2::pde_lab
