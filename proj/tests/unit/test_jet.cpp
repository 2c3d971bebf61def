#include <doctest.h>

#include <random>

#include "pip2/common/parallel.hpp"
#include "pip2/diffcore/jet_tape.hpp"
#include "pip2/diffcore/mlp.hpp"
#include "derivative_oracles.hpp"
#include "random_models.hpp"

using namespace pip2;
using namespace pip2::diffcore;

TEST_CASE("affine network has zero second derivative") {
  std::mt19937_64 rng(1);
  const auto p = testing::random_mlp({3, 4}, rng);
  const auto j = mlp_jet2(p, Eigen::Vector3d(0.1, 0.2, -0.3), Eigen::Vector3d(0.5, -1.0, 2.0));
  CHECK(j.d2.isZero(0.0));
  const Eigen::VectorXd expect = p.layers()[0].weight * Eigen::Vector3d(0.5, -1.0, 2.0);
  CHECK((j.d1 - expect).norm() <= 1e-15);
}

TEST_CASE("null direction gives zero derivatives") {
  std::mt19937_64 rng(2);
  const auto p = testing::random_mlp({2, 6, 6, 3}, rng);
  const auto j = mlp_jet2(p, Eigen::Vector2d(0.4, 0.9), Eigen::Vector2d::Zero());
  CHECK(j.d1.isZero(0.0));
  CHECK(j.d2.isZero(0.0));
}

TEST_CASE("zero-weight network has zero derivatives") {
  const auto p = MlpParams::zeros(std::vector<int>{2, 5, 5, 2});
  const auto j = mlp_jet2(p, Eigen::Vector2d(0.4, 0.9), Eigen::Vector2d(1.0, 0.0));
  CHECK(j.d1.isZero(0.0));
  CHECK(j.d2.isZero(0.0));
}

TEST_CASE("jet value equals forward pass bit for bit") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing::random_mlp({2, 8, 7, 4}, rng);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(2);
    const auto j = mlp_jet2(p, x, Eigen::Vector2d(0.0, 1.0));
    const Eigen::VectorXd y = mlp_forward(p, x);
    CHECK((j.value.array() == y.array()).all());
  }
}

TEST_CASE("jet derivatives agree with fourth-order finite differences") {
  const double worst = testing::jet_fd_worst(100, 20);
  MESSAGE("worst relative error " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("tape spanning several chunks agrees with per-point jets") {
  std::mt19937_64 rng(9);
  const auto p = testing::random_mlp({2, 6, 6, 3}, rng);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(2, 700);
  JetTape tape(p, X, {{Eigen::Vector2d(1, 0), true}, {Eigen::Vector2d(0, 1), false}});
  for (Eigen::Index c : {0, 255, 256, 511, 699}) {
    const auto j = mlp_jet2(p, Eigen::VectorXd(X.col(c)), Eigen::Vector2d(1, 0));
    CHECK((tape.output().value.col(c) - j.value).norm() <= 1e-14);
    CHECK((tape.output().d1[0].col(c) - j.d1).norm() <= 1e-14);
    CHECK((tape.output().d2[0].col(c) - j.d2).norm() <= 1e-14);
  }
}

TEST_CASE("tape backward of a linear functional matches finite differences") {
  std::mt19937_64 rng(13);
  auto p = testing::random_mlp({2, 5, 4, 3}, rng);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(2, 9);
  const std::vector<JetDirection> dirs{{Eigen::Vector2d(1, 0), true}, {Eigen::Vector2d(0, 1), false}};
  JetTape tape(p, X, dirs);
  JetBlock seeds = JetBlock::zeros_like(tape.output());
  seeds.value = Eigen::MatrixXd::Random(3, 9);
  seeds.d1[0] = Eigen::MatrixXd::Random(3, 9);
  seeds.d1[1] = Eigen::MatrixXd::Random(3, 9);
  seeds.d2[0] = Eigen::MatrixXd::Random(3, 9);
  auto functional = [&](const MlpParams& q) {
    JetTape t(q, X, dirs);
    const auto& o = t.output();
    return (seeds.value.array() * o.value.array()).sum() + (seeds.d1[0].array() * o.d1[0].array()).sum() +
           (seeds.d1[1].array() * o.d1[1].array()).sum() + (seeds.d2[0].array() * o.d2[0].array()).sum();
  };
  const auto g = tape.backward(seeds);
  std::vector<double> flat_g(gradient_size(g));
  flatten_gradient(g, flat_g);
  std::vector<double> flat(p.parameter_count());
  p.flatten_into(flat);
  std::vector<double> fd(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto x = flat;
    x[i] += 1e-6;
    p.assign_from(x);
    const double fp = functional(p);
    x[i] -= 2e-6;
    p.assign_from(x);
    const double fm = functional(p);
    fd[i] = (fp - fm) / 2e-6;
  }
  p.assign_from(flat);
  CHECK(testing::relative_error(flat_g, fd) < 1e-7);
}

TEST_CASE("tape results do not depend on the worker count") {
  std::mt19937_64 rng(10);
  const auto p = testing::random_mlp({2, 8, 8, 4}, rng);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(2, 1100);
  const std::vector<JetDirection> dirs{{Eigen::Vector2d(1, 0), true}, {Eigen::Vector2d(0, 1), false}};
  auto run = [&](int threads) {
    set_thread_count(threads);
    JetTape tape(p, X, dirs);
    JetBlock seeds = JetBlock::zeros_like(tape.output());
    seeds.value.setOnes();
    seeds.d2[0].setConstant(0.5);
    const auto g = tape.backward(seeds);
    std::vector<double> flat(gradient_size(g));
    flatten_gradient(g, flat);
    return std::make_pair(Eigen::MatrixXd(tape.output().d2[0]), flat);
  };
  const auto a = run(1);
  const auto b = run(3);
  set_thread_count(1);
  CHECK((a.first.array() == b.first.array()).all());
  CHECK(a.second == b.second);
}
