#pragma once

#include <Eigen/Dense>

namespace pip2::diffcore {

/// Elementwise tanh with SIMD packets: rational approximation for |x| < 0.625, exp-based
/// form elsewhere. Within a few ulp of std::tanh; every element gets the same arithmetic
/// regardless of its position, NaN propagates. `in` and `out` may be the same matrix.
void tanh_into(const Eigen::MatrixXd& in, Eigen::MatrixXd& out);

}  // namespace pip2::diffcore
