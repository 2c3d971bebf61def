#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pip2/operator_models/model.hpp"
#include "pip2/pde_lab/grf.hpp"

namespace pip2::harness {

/// Locations used by the pointwise error table and the slice plots.
struct ReportSettings {
  std::vector<double> pointwise_x;
  double pointwise_t = 1.0;
  std::vector<double> slice_t;
  std::vector<double> slice_x;
};

struct GridSearchSettings {
  std::vector<double> w_data;
  std::vector<double> lambda;
  int iterations = 2000;
  int validation_functions = 20;
};

/// Full recipe of one experiment. Layer lists include the input and output widths.
struct ExperimentConfig {
  std::string name = "experiment";
  operator_models::PdeSpec pde;
  operator_models::Variant variant = operator_models::Variant::pip2net;
  std::vector<int> branch_layers;
  std::vector<int> trunk_layers;
  std::string activation = "tanh";
  int m = 0;
  int p = 0;
  operator_models::LossWeights weights;
  operator_models::PenaltyMode penalty_mode = operator_models::PenaltyMode::magnitude_sum;
  operator_models::CMode c_mode;
  double lr = 1e-3;
  int iterations = 10000;
  int batch_functions = 32;
  int P = 100;
  int Q = 100;
  int data_points = 0;  // labels drawn per function per iteration (data-driven variants); 0 means Q
  int data_lattice = 50;
  int n_train = 500;
  int n_test = 50;
  int n_x = 100;
  int n_t = 100;
  pde_lab::GrfSpec grf;
  std::uint64_t data_seed = 1;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  GridSearchSettings grid_search;
  ReportSettings report;

  /// POU-DeepONet uses the normalized-exponential trunk.
  bool hard_normalize() const { return variant == operator_models::Variant::pou_deeponet; }
  /// Branch input length: sensors, plus eps^2 for Allen-Cahn.
  int branch_input() const;
  int labels_per_iteration() const { return data_points > 0 ? data_points : Q; }
  void validate() const;
};

/// Paper-scale defaults for one equation; a config file overrides any subset.
ExperimentConfig default_config(operator_models::PdeKind kind);

/// Parses a versioned JSON config (schema_version 1). Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON rendering: every field, fixed key order.
std::string to_json(const ExperimentConfig& config);
/// Fingerprints of the canonical rendering and of the PDE/data section alone.
std::string config_hash(const ExperimentConfig& config);
std::string pde_hash(const ExperimentConfig& config);

}  // namespace pip2::harness
