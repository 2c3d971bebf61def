#pragma once

#include <vector>

#include "pip2/pde_lab/field.hpp"

namespace pip2::pde_lab {

/// Quadrature-weighted relative L2 error; weights from the grids. Throws when ref is zero.
double relative_l2(const SpaceTimeField& pred, const SpaceTimeField& ref);

struct PointwiseErrors {
  std::vector<double> xs;      // requested locations
  std::vector<double> errors;  // |pred - ref| at the nearest nodes
  double average = 0.0;
};

PointwiseErrors pointwise_abs_error(const SpaceTimeField& pred, const SpaceTimeField& ref,
                                    const std::vector<double>& xs, double t);

}  // namespace pip2::pde_lab
