#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pip2/harness/dataset.hpp"
#include "pip2/harness/train.hpp"
#include "pip2/pde_lab/field.hpp"

namespace pip2::harness {

struct SampleError {
  int index = 0;
  double rel_l2 = 0.0;
};

/// Errors of one checkpoint on one split. mean/median/std weight every sample equally;
/// std is the sample standard deviation (0 for a single sample).
struct RunEvaluation {
  std::string checkpoint;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<SampleError> per_sample;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  double pointwise_t = 1.0;
  std::vector<double> pointwise_x;
  std::vector<double> pointwise_error;  // |pred - ref| at the nearest node, averaged over samples
};

/// One variant evaluated over one or more seeds; the reported statistic is the median over seeds.
struct Evaluation {
  std::string variant;
  std::string split;
  std::string manifest;
  std::string pde_hash;
  std::vector<RunEvaluation> runs;

  double median_rel_l2() const;
  std::vector<double> per_seed_rel_l2() const;
  std::vector<double> median_pointwise() const;
  /// Run whose mean error is the (lower) median: used for plots.
  const RunEvaluation& representative() const;
};

/// Model prediction on the reference grid of `like`.
pde_lab::SpaceTimeField predict_field(const operator_models::OperatorModel& model, const Eigen::VectorXd& kappa,
                                      const pde_lab::SpaceTimeField& like);

RunEvaluation evaluate_run(const LoadedModel& model, const DatasetManifest& manifest,
                           const std::vector<int>& indices);

/// `split` is "test" or "train". `checkpoint` is a model manifest or a directory holding
/// `seed_*/model.json` runs.
Evaluation evaluate(const std::filesystem::path& checkpoint, const DatasetManifest& manifest,
                    const std::string& split);

double median(std::vector<double> values);

/// `<dir>/evaluation.json` and `<dir>/per_sample.csv`.
void write_evaluation(const std::filesystem::path& dir, const Evaluation& eval);
Evaluation read_evaluation(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering used in every CSV table.
std::string format_number(double v);

}  // namespace pip2::harness
