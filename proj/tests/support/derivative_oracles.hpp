#pragma once

// Finite-difference oracles for the jet engine and loss gradients (unit and acceptance suites).

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pip2/diffcore/mlp.hpp"
#include "pip2/operator_models/losses.hpp"
#include "random_models.hpp"

namespace pip2::testing {

struct GradientCase {
  std::string name;
  operator_models::PdeSpec spec;
  operator_models::Variant variant;
  operator_models::LossWeights weights;
  operator_models::PenaltyMode mode = operator_models::PenaltyMode::magnitude_sum;
  operator_models::CMode c = {};
  bool hard = false;
};

// Every loss term in isolation, then the weighted totals.
inline std::vector<GradientCase> gradient_cases() {
  using namespace operator_models;
  const auto bu = PdeSpec::burgers(0.01);
  const auto ac = PdeSpec::allen_cahn(0.1, 0.5);
  const auto dr = PdeSpec::diffusion_reaction(0.01, 0.01);
  return {
      {"data", bu, Variant::deeponet, {1, 0, 0, 0}},
      {"data hard-normalized", bu, Variant::pou_deeponet, {1, 0, 0, 0}, PenaltyMode::value_sum, {}, true},
      {"periodic bc", bu, Variant::pi_deeponet, {0, 0, 1, 0}},
      {"dirichlet bc", dr, Variant::pi_deeponet, {0, 0, 1, 0}},
      {"burgers physics", bu, Variant::pi_deeponet, {0, 1, 0, 0}},
      {"allen-cahn physics", ac, Variant::pi_deeponet, {0, 1, 0, 0}},
      {"diffusion-reaction physics", dr, Variant::pi_deeponet, {0, 1, 0, 0}},
      {"value-sum penalty", bu, Variant::pip2net, {0, 0, 0, 1}, PenaltyMode::value_sum},
      {"magnitude-sum penalty", bu, Variant::pip2net, {0, 0, 0, 1}, PenaltyMode::magnitude_sum},
      {"learnable c penalty", dr, Variant::pip2net, {0, 0, 0, 1}, PenaltyMode::magnitude_sum, {true, 0.7}},
      {"total burgers", bu, Variant::pip2net, {20, 1, 1, 0.5}},
      {"total allen-cahn", ac, Variant::pip2net, {1, 1, 1, 0.3}, PenaltyMode::value_sum, {true, 1.2}},
      {"total diffusion-reaction", dr, Variant::pip2net, {1, 1, 1, 0.1}},
  };
}

// Relative 2-norm error of the reverse-mode gradient against central differences.
inline double gradient_case_error(const GradientCase& cs, std::uint64_t seed) {
  using namespace operator_models;
  const int m = 6;
  const auto model = random_model(m, 5, 8, seed, cs.variant, cs.mode, cs.c, cs.hard);
  std::mt19937_64 rng(seed + 100);
  const auto batch = random_batch(cs.spec, 3, m, 5, 4, 10, rng);
  ModelGradient g;
  total_loss_and_grad(model, cs.spec, batch, cs.weights, g);
  const auto fd =
      fd_gradient(model, [&](const OperatorModel& q) { return total_loss(q, cs.spec, batch, cs.weights).total; });
  return relative_error(g.flatten(model), fd);
}

// Worst relative error of mlp_jet2 d1/d2 against fourth-order differences over random
// nets of widths <= 8 (denominators floored at 1e-2).
inline double jet_fd_worst(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> width(1, 8), depth(1, 4), in_w(1, 4);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<int> w{in_w(rng)};
    const int d = depth(rng);
    for (int l = 0; l < d; ++l) w.push_back(width(rng));
    w.push_back(width(rng));
    const auto p = random_mlp(w, rng);
    Eigen::VectorXd x(w[0]);
    for (int i = 0; i < w[0]; ++i) x(i) = ux(rng);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(w[0]);
    dir(std::uniform_int_distribution<int>(0, w[0] - 1)(rng)) = 1.0;
    const auto j = diffcore::mlp_jet2(p, x, dir);
    for (int o = 0; o < w.back(); ++o) {
      auto f = [&](double s) { return diffcore::mlp_forward(p, Eigen::VectorXd(x + s * dir))(o); };
      const double d1 = fd4_d1(f, 1e-3);
      const double d2 = fd4_d2(f, 1e-3);
      const double e1 = std::abs(j.d1(o) - d1) / std::max(std::abs(d1), 1e-2);
      const double e2 = std::abs(j.d2(o) - d2) / std::max(std::abs(d2), 1e-2);
      worst = std::max({worst, e1, e2});
    }
  }
  return worst;
}

}  // namespace pip2::testing
