#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pip2/harness/config.hpp"
#include "pip2/harness/collocation.hpp"
#include "pip2/harness/dataset.hpp"
#include "pip2/operator_models/losses.hpp"
#include "pip2/operator_models/model.hpp"

namespace pip2::harness {

struct TrainRecord {
  int iteration = 0;
  operator_models::LossBreakdown loss;  // at the parameters before this iteration's update
  double c = 1.0;
  double wall_time = 0.0;  // seconds since the start of the run
};

/// One record per iteration 0..N-1 plus a final record N taken without an update.
struct TrainLog {
  std::vector<TrainRecord> records;

  const TrainRecord& first() const { return records.front(); }
  const TrainRecord& last() const { return records.back(); }
  /// Iteration, losses and c compared bit-for-bit; wall time ignored.
  bool same_trajectory(const TrainLog& other) const;
};

std::string to_json(const TrainLog& log);
TrainLog parse_train_log(const std::string& json_text);

struct TrainOptions {
  int iterations = -1;          // -1 uses the config
  int progress_every = 500;     // info line cadence; 0 disables
  std::vector<int> train_indices;  // empty uses manifest.train
};

struct TrainResult {
  operator_models::OperatorModel model;
  TrainLog log;
  ExperimentConfig config;
  std::uint64_t seed = 0;
  int iterations = 0;
};

/// Adam minimization of the variant's total loss. Each iteration draws `batch_functions`
/// training functions without replacement and fresh collocation points.
TrainResult train(const ExperimentConfig& config, const DatasetManifest& manifest, std::uint64_t seed,
                  const TrainOptions& options = {});

/// Initial parameters of a run: identical for every variant sharing layer widths.
operator_models::OperatorModel initial_model(const ExperimentConfig& config, std::uint64_t seed);

/// `<dir>/model.json|.bin` and `<dir>/train_log.json`.
void save_run(const std::filesystem::path& dir, const TrainResult& result);

struct LoadedModel {
  operator_models::OperatorModel model;
  ExperimentConfig config;
  std::string config_hash;
  std::string pde_hash;
  std::uint64_t seed = 0;
};

void save_model(const std::filesystem::path& manifest_path, const operator_models::OperatorModel& model,
                const ExperimentConfig& config, std::uint64_t seed);
LoadedModel load_model(const std::filesystem::path& manifest_path);

/// Reads every training function of `indices` into memory.
std::vector<TrainingSample> load_training_samples(const DatasetManifest& manifest,
                                                  const std::vector<int>& indices);

}  // namespace pip2::harness
