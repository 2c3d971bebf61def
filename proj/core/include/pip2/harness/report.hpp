#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pip2/harness/evaluate.hpp"

namespace pip2::harness {

struct PlotFile {
  std::string variant;
  std::string kind;  // time_slice, space_slice, heatmap_pred, heatmap_error
  std::string file;  // relative to the bundle directory
  double vmin = 0.0;  // color limits (heatmaps only)
  double vmax = 0.0;
};

struct ErrorRow {
  std::string variant;
  std::string split;
  std::vector<double> per_seed;
  double rel_l2_median = 0.0;
  std::vector<double> pointwise;  // median over seeds at each pointwise x
};

struct ReportBundle {
  std::vector<std::string> tables;  // relative file names
  std::vector<PlotFile> plots;
  std::vector<std::string> snapshots;
  std::vector<double> pointwise_x;
  double pointwise_t = 1.0;
  std::vector<ErrorRow> rows;
};

/// Every `evaluation.json` below `results_dir`, ordered by path.
std::vector<Evaluation> load_results(const std::filesystem::path& results_dir);

/// Writes errors.csv, per-variant slice plots and heatmaps of one test function (the first
/// sample of each variant's representative run), config snapshots and index.json.
ReportBundle emit_report(const std::vector<Evaluation>& results, const std::filesystem::path& out_dir);

/// Header and data rows of a CSV file written by this library (no quoting).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace pip2::harness
