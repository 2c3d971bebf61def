#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pip2/pde_lab/field.hpp"

namespace pip2::pde_lab {

struct AllenCahnOptions {
  int steps = 1000;
};

struct AllenCahnSolution {
  SpaceTimeField field;
  std::vector<double> energy;  // discrete energy before the first and after every step
};

/// Double-well derivative f'(u) = u^3 - u.
inline double double_well_derivative(double u) { return u * u * u - u; }

/// E = sum(0.5 |D u|^2 + f(u) / eps2) dx with f(u) = (u^2 - 1)^2 / 4 and zero boundary values.
double allen_cahn_energy(const Eigen::VectorXd& u, const Grid1D& grid, double eps2);

/// u_t = u_xx - f'(u) / eps2 with u = 0 at both ends of a closed grid. Stabilized linearly
/// implicit steps with S = 2 / eps2; (steps) must be a multiple of (n_t - 1).
/// Throws NumericalError when the energy increases by more than 1e-12 relative in a step.
AllenCahnSolution solve_allen_cahn(const Eigen::VectorXd& u0, double eps2, const Grid1D& grid, double T,
                                   int n_t, const AllenCahnOptions& options = {});

/// The standard initial condition u0(x) = 0.2 sin(x) on `grid`.
Eigen::VectorXd allen_cahn_initial(const Grid1D& grid);

/// Solves a tridiagonal system in place (Thomas algorithm). d is overwritten with the solution.
void solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag, const Eigen::VectorXd& upper,
                       Eigen::VectorXd& d);

}  // namespace pip2::pde_lab
