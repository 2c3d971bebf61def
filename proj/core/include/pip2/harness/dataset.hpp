#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pip2/harness/config.hpp"
#include "pip2/pde_lab/field.hpp"

namespace pip2::harness {

struct SampleRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::string field_file;   // manifest of the reference solution, relative to the dataset directory
  Eigen::VectorXd input;    // branch input: sensor values (plus eps^2 for Allen-Cahn)
};

/// Index of a generated dataset. Samples that failed to solve are listed in `failed` and
/// appear in neither split.
struct DatasetManifest {
  int format_version = 1;
  std::string pde_hash;
  std::string config_json;  // canonical config that produced the data
  operator_models::PdeSpec pde;
  std::uint64_t seed = 0;
  int m = 0;
  pde_lab::Grid1D sensors;
  std::vector<SampleRecord> samples;  // generated and solved samples, by index
  std::vector<int> train;             // sample indices
  std::vector<int> test;
  std::vector<int> failed;
  std::filesystem::path directory;

  const SampleRecord& sample(int index) const;
  pde_lab::SpaceTimeField load_field(int index) const;
};

/// Sensor grid and reference-solution grids for a config.
pde_lab::Grid1D sensor_grid(const ExperimentConfig& config);

/// Draws inputs, solves every sample (per-sample seed = data_seed + index) and writes
/// `manifest.json` plus one field file pair per sample into `out_dir`.
DatasetManifest generate_dataset(const ExperimentConfig& config, const std::filesystem::path& out_dir);

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

}  // namespace pip2::harness
