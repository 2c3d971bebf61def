#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pip2::diffcore {

/// First/second moment accumulators over a flat parameter vector.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. Throws NumericalError on non-finite gradients.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr);

}  // namespace pip2::diffcore
