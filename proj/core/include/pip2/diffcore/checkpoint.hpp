#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pip2/diffcore/mlp.hpp"

namespace pip2::diffcore {

/// Parameter checkpoint: named networks and scalars plus free-form JSON metadata.
///
/// On disk: `<stem>.json` lists every network's layer shapes and every scalar in blob
/// order; `<stem>.bin` holds little-endian float64 values in that order (per network:
/// layers in order, weight row-major then bias; then the scalars). Round trips are bit-exact.
struct Checkpoint {
  std::vector<std::pair<std::string, MlpParams>> networks;
  std::vector<std::pair<std::string, double>> scalars;
  std::string metadata_json = "{}";

  const MlpParams& network(const std::string& name) const;
  double scalar(const std::string& name) const;
  bool has_scalar(const std::string& name) const;
};

/// Writes `manifest_path` (JSON) and the blob next to it with extension `.bin`.
void save_checkpoint(const std::filesystem::path& manifest_path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& manifest_path);

}  // namespace pip2::diffcore
