#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pip2/diffcore/mlp.hpp"
#include "pip2/operator_models/losses.hpp"
#include "pip2/operator_models/model.hpp"

namespace pip2::testing {

// Glorot weights plus nonzero biases, so every parameter influences the output.
inline diffcore::MlpParams random_mlp(const std::vector<int>& widths, std::mt19937_64& rng,
                                      double bias_scale = 0.3) {
  auto p = diffcore::MlpParams::glorot(widths, rng);
  std::uniform_real_distribution<double> u(-bias_scale, bias_scale);
  for (auto& l : p.layers())
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = u(rng);
  return p;
}

inline operator_models::OperatorModel random_model(int m, int p, int width, std::uint64_t seed,
                                                   operator_models::Variant variant,
                                                   operator_models::PenaltyMode mode =
                                                       operator_models::PenaltyMode::magnitude_sum,
                                                   operator_models::CMode c = {},
                                                   bool hard_normalize = false) {
  std::mt19937_64 rng(seed);
  operator_models::OperatorModel model;
  model.branch = random_mlp({m, width, width, p}, rng);
  model.trunk = random_mlp({2, width, width, p}, rng);
  model.br0 = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  model.variant = variant;
  model.penalty_mode = mode;
  model.c = c;
  model.hard_normalize = hard_normalize;
  return model;
}

inline Eigen::Matrix2Xd random_coords(const operator_models::PdeSpec& spec, int n,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(spec.x_lo, spec.x_hi), ut(0.0, spec.T);
  Eigen::Matrix2Xd c(2, n);
  for (int j = 0; j < n; ++j) c.col(j) << ux(rng), ut(rng);
  return c;
}

inline Eigen::VectorXd random_kappa(const operator_models::PdeSpec& spec, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd k(m);
  for (int i = 0; i < m; ++i) k(i) = u(rng);
  if (spec.kind == operator_models::PdeKind::allen_cahn)
    k(m - 1) = std::uniform_real_distribution<double>(spec.eps2_min, spec.eps2_max)(rng);
  return k;
}

inline operator_models::CollocationBatch random_batch(const operator_models::PdeSpec& spec, int samples,
                                                      int m, int n_data, int n_bc, int n_res,
                                                      std::mt19937_64& rng) {
  operator_models::CollocationBatch b;
  std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, spec.T);
  for (int s = 0; s < samples; ++s) {
    operator_models::SampleCollocation c;
    c.kappa = random_kappa(spec, m, rng);
    c.data_coords = random_coords(spec, n_data, rng);
    c.data_labels = Eigen::VectorXd(n_data);
    for (int j = 0; j < n_data; ++j) c.data_labels(j) = u(rng);
    c.bc_times = Eigen::VectorXd(n_bc);
    for (int j = 0; j < n_bc; ++j) c.bc_times(j) = ut(rng);
    c.residual_coords = random_coords(spec, n_res, rng);
    b.samples.push_back(std::move(c));
  }
  return b;
}

// Central differences of f over every flat model parameter.
inline std::vector<double> fd_gradient(const operator_models::OperatorModel& model,
                                       const std::function<double(const operator_models::OperatorModel&)>& f,
                                       double h = 1e-6) {
  const auto flat = model.flatten();
  std::vector<double> g(flat.size());
  auto probe = model;
  auto x = flat;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    x[i] = flat[i] + h;
    probe.assign(x);
    const double fp = f(probe);
    x[i] = flat[i] - h;
    probe.assign(x);
    const double fm = f(probe);
    x[i] = flat[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// Fourth-order central differences of a scalar function along one direction.
inline double fd4_d1(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}
inline double fd4_d2(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 16 * f(h) - 30 * f(0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
}

}  // namespace pip2::testing
