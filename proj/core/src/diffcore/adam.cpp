#include "pip2/diffcore/adam.hpp"

#include <cmath>
#include <string>

#include "pip2/common/errors.hpp"

namespace pip2::diffcore {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw ConfigError("adam_step: parameter, gradient and state sizes differ");
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be positive");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw NumericalError("adam_step: non-finite gradient at parameter " + std::to_string(i));

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace pip2::diffcore
