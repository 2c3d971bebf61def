#pragma once

#include <filesystem>
#include <vector>

#include "pip2/harness/config.hpp"
#include "pip2/harness/dataset.hpp"

namespace pip2::harness {

struct GridCell {
  double w_data = 1.0;
  double lambda_p2 = 0.0;
  double final_loss = 0.0;       // last recorded weighted total
  double validation_rel_l2 = 0.0;  // mean over the held-out training functions
};

struct GridSearchResult {
  std::vector<GridCell> cells;  // w_data major, lambda minor
  std::size_t best_by_validation = 0;
  std::size_t best_by_loss = 0;
  std::vector<int> validation_indices;

  const GridCell& best() const { return cells.at(best_by_validation); }
};

/// Trains one short run per (w_data, lambda) cell on the training split minus its last
/// `validation_functions` entries and scores each cell on those held-out functions.
/// Variants without a partition penalty search w_data only.
GridSearchResult grid_search(const ExperimentConfig& config, const std::vector<double>& w_data_grid,
                             const std::vector<double>& lambda_grid, const DatasetManifest& manifest,
                             std::uint64_t seed, int iterations);

/// `<dir>/grid_search.csv` (one row per cell) and `<dir>/grid_search.json` (both selections).
void write_grid_search(const std::filesystem::path& dir, const GridSearchResult& result);

}  // namespace pip2::harness
