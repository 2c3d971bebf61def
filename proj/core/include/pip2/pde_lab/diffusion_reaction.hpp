#pragma once

#include <functional>

#include <Eigen/Dense>

#include "pip2/pde_lab/field.hpp"

namespace pip2::pde_lab {

/// s_t = D s_xx + k s^2 + u_src(x) on a closed grid, s = 0 at both ends and at t = 0.
/// Crank-Nicolson diffusion; the reaction term uses a predictor and one corrector with
/// 0.5 (s_n^2 + s*^2). n_t time levels including t = 0.
/// Throws NumericalError when the correction exceeds 10% of the field norm.
SpaceTimeField solve_diffusion_reaction(const Eigen::VectorXd& u_src, const Grid1D& grid, double D, double k,
                                        double T, int n_t);

/// Same scheme with a time-dependent source, sampled at the half step.
SpaceTimeField solve_diffusion_reaction(const std::function<double(double x, double t)>& source,
                                        const Grid1D& grid, double D, double k, double T, int n_t);

}  // namespace pip2::pde_lab
