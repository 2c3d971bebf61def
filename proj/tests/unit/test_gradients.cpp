#include <doctest.h>

#include <random>
#include <string>

#include "pip2/common/errors.hpp"
#include "pip2/operator_models/losses.hpp"
#include "derivative_oracles.hpp"
#include "random_models.hpp"

using namespace pip2;
using namespace pip2::operator_models;

TEST_CASE("reverse-mode gradients of every loss term match finite differences") {
  for (const auto& cs : testing::gradient_cases()) {
    for (std::uint64_t seed : {1u, 2u}) {
      const double err = testing::gradient_case_error(cs, seed);
      INFO(cs.name << " seed " << seed << " relative error " << err);
      CHECK(err < 1e-5);
    }
  }
}

TEST_CASE("constant loss has zero gradient") {
  const auto spec = PdeSpec::burgers(0.01);
  const auto model = testing::random_model(4, 3, 5, 3, Variant::pip2net);
  std::mt19937_64 rng(3);
  const auto batch = testing::random_batch(spec, 2, 4, 3, 3, 3, rng);
  ModelGradient g;
  total_loss_and_grad(model, spec, batch, {0, 0, 0, 0}, g);
  for (double v : g.flatten(model)) CHECK(v == 0.0);
}

TEST_CASE("half squared output of a linear net") {
  // One linear trunk layer with p = 1 and a constant unit branch: loss = 0.5 * (W x)^2 with
  // label 0 and data weight 0.5 (data loss is a mean over one point).
  OperatorModel model;
  model.branch = diffcore::MlpParams({{Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Constant(1, 1.0)}});
  Eigen::MatrixXd w(1, 2);
  w << 0.4, -1.3;
  model.trunk = diffcore::MlpParams({{w, Eigen::VectorXd::Zero(1)}});
  model.variant = Variant::deeponet;
  CollocationBatch b;
  SampleCollocation s;
  s.kappa = Eigen::Vector2d(0.2, 0.1);
  s.data_coords = Coord(0.7, 0.2);
  s.data_labels = Eigen::VectorXd::Zero(1);
  b.samples.push_back(s);
  ModelGradient g;
  total_loss_and_grad(model, PdeSpec::burgers(0.01), b, {0.5, 0, 0, 0}, g);
  const double out = 0.4 * 0.7 - 1.3 * 0.2;
  CHECK(std::abs(g.trunk[0].weight(0, 0) - out * 0.7) <= 1e-15);
  CHECK(std::abs(g.trunk[0].weight(0, 1) - out * 0.2) <= 1e-15);
}

TEST_CASE("non-finite loss is reported with its location") {
  const auto spec = PdeSpec::burgers(0.01);
  auto model = testing::random_model(4, 3, 5, 4, Variant::pi_deeponet);
  model.trunk.layers()[1].weight(0, 0) = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(4);
  const auto batch = testing::random_batch(spec, 2, 4, 3, 3, 3, rng);
  ModelGradient g;
  try {
    total_loss_and_grad(model, spec, batch, {1, 1, 1, 0}, g);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("trunk") != std::string::npos);
  }
}

TEST_CASE("pip2 with zero penalty weight matches pi-deeponet gradients bit for bit") {
  const auto spec = PdeSpec::diffusion_reaction(0.01, 0.01);
  auto model = testing::random_model(6, 4, 6, 5, Variant::pi_deeponet);
  std::mt19937_64 rng(5);
  const auto batch = testing::random_batch(spec, 3, 6, 4, 4, 6, rng);
  ModelGradient a, b;
  const auto la = total_loss_and_grad(model, spec, batch, {1, 1, 1, 0}, a);
  model.variant = Variant::pip2net;
  const auto lb = total_loss_and_grad(model, spec, batch, {1, 1, 1, 0}, b);
  CHECK(la.total == lb.total);
  CHECK(a.flatten(model) == b.flatten(model));
}
