#include <benchmark/benchmark.h>

#include <random>

#include "pip2/common/allocator.hpp"
#include "pip2/diffcore/jet_tape.hpp"
#include "pip2/harness/collocation.hpp"
#include "pip2/harness/config.hpp"
#include "pip2/harness/train.hpp"
#include "pip2/operator_models/losses.hpp"
#include "pip2/pde_lab/burgers.hpp"
#include "pip2/pde_lab/grf.hpp"
#include "random_models.hpp"

using namespace pip2;

namespace {

void BM_JetForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int points = static_cast<int>(state.range(1));
  std::mt19937_64 rng(1);
  const auto net = testing::random_mlp({2, width, width, width, width, width, width}, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, points);
  const std::vector<diffcore::JetDirection> dirs{{Eigen::Vector2d(1, 0), true}, {Eigen::Vector2d(0, 1), false}};
  for (auto _ : state) {
    diffcore::JetTape tape(net, x, dirs);
    benchmark::DoNotOptimize(tape.output().value.data());
  }
  state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(BM_JetForward)->Args({50, 1600})->Args({100, 2500})->Unit(benchmark::kMillisecond);

void BM_JetBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int points = static_cast<int>(state.range(1));
  std::mt19937_64 rng(2);
  const auto net = testing::random_mlp({2, width, width, width, width, width, width}, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, points);
  const std::vector<diffcore::JetDirection> dirs{{Eigen::Vector2d(1, 0), true}, {Eigen::Vector2d(0, 1), false}};
  const diffcore::JetTape tape(net, x, dirs);
  auto seeds = diffcore::JetBlock::zeros_like(tape.output());
  seeds.value.setRandom();
  seeds.d1[0].setRandom();
  seeds.d1[1].setRandom();
  seeds.d2[0].setRandom();
  for (auto _ : state) benchmark::DoNotOptimize(tape.backward(seeds));
  state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(BM_JetBackward)->Args({50, 1600})->Args({100, 2500})->Unit(benchmark::kMillisecond);

void BM_TotalLossAndGrad(benchmark::State& state) {
  auto cfg = harness::default_config(operator_models::PdeKind::diffusion_reaction);
  cfg.batch_functions = static_cast<int>(state.range(0));
  const auto model = harness::initial_model(cfg, 0);
  std::mt19937_64 rng(3);
  harness::TrainingSample s;
  s.field.xgrid = pde_lab::Grid1D::closed(cfg.n_x, 0.0, 1.0);
  s.field.tgrid = pde_lab::Grid1D::closed(cfg.n_t, 0.0, 1.0);
  s.field.values = Eigen::MatrixXd::Zero(cfg.n_x, cfg.n_t);
  operator_models::CollocationBatch batch;
  for (int b = 0; b < cfg.batch_functions; ++b) {
    s.kappa = Eigen::VectorXd::Random(cfg.m);
    batch.samples.push_back(harness::sample_collocation(cfg, s, rng));
  }
  auto grad = operator_models::ModelGradient::zeros(model);
  for (auto _ : state)
    benchmark::DoNotOptimize(operator_models::total_loss_and_grad(model, cfg.pde, batch, cfg.weights, grad));
}
BENCHMARK(BM_TotalLossAndGrad)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_BurgersSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = pde_lab::Grid1D::periodic_grid(n, 0.0, 1.0);
  const auto u0 = pde_lab::sample_grf_matern(pde_lab::GrfSpec::matern(5.0, 5.0, 4.0), grid, 7);
  for (auto _ : state) benchmark::DoNotOptimize(pde_lab::solve_burgers(u0, grid, 0.01, 1.0, 101));
}
BENCHMARK(BM_BurgersSolve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  pip2::retain_heap_memory();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
