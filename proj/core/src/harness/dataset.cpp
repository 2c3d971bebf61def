#include "pip2/harness/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/common/parallel.hpp"
#include "pip2/pde_lab/allen_cahn.hpp"
#include "pip2/pde_lab/burgers.hpp"
#include "pip2/pde_lab/diffusion_reaction.hpp"
#include "pip2/pde_lab/grf.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;
using operator_models::PdeKind;

namespace {

std::string sample_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%05d", index);
  return buf;
}

json grid_json(const pde_lab::Grid1D& g) {
  return {{"n", g.n}, {"lo", g.x_lo}, {"hi", g.x_hi}, {"periodic", g.periodic}};
}

constexpr std::uint64_t kSplitSalt = 0x5eedf00dULL;

}  // namespace

const SampleRecord& DatasetManifest::sample(int index) const {
  const auto it = std::lower_bound(samples.begin(), samples.end(), index,
                                   [](const SampleRecord& r, int i) { return r.index < i; });
  if (it == samples.end() || it->index != index)
    throw ConfigError("dataset has no sample " + std::to_string(index));
  return *it;
}

pde_lab::SpaceTimeField DatasetManifest::load_field(int index) const {
  return pde_lab::load_field(directory / sample(index).field_file);
}

pde_lab::Grid1D sensor_grid(const ExperimentConfig& c) {
  switch (c.pde.kind) {
    case PdeKind::burgers:
      return pde_lab::Grid1D::periodic_grid(c.n_x, c.pde.x_lo, c.pde.x_hi);
    case PdeKind::allen_cahn:
    case PdeKind::diffusion_reaction:
      return pde_lab::Grid1D::closed(c.n_x, c.pde.x_lo, c.pde.x_hi);
  }
  throw ConfigError("unknown PDE kind");
}

DatasetManifest generate_dataset(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const int total = config.n_train + config.n_test;
  const auto grid = sensor_grid(config);
  std::optional<pde_lab::RbfSampler> rbf;
  if (config.pde.kind == PdeKind::diffusion_reaction) rbf.emplace(config.grf, grid);

  std::vector<std::optional<SampleRecord>> records(static_cast<std::size_t>(total));
  std::mutex warn_mutex;
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
    const int index = static_cast<int>(i);
    const std::uint64_t seed = config.data_seed + i;
    SampleRecord rec;
    rec.index = index;
    rec.seed = seed;
    rec.field_file = sample_stem(index) + ".json";
    json meta;
    meta["index"] = index;
    meta["seed"] = seed;
    meta["pde"] = operator_models::to_string(config.pde.kind);
    try {
      pde_lab::SpaceTimeField field;
      switch (config.pde.kind) {
        case PdeKind::burgers: {
          rec.input = pde_lab::sample_grf_matern(config.grf, grid, seed);
          field = pde_lab::solve_burgers(rec.input, grid, config.pde.nu, config.pde.T, config.n_t);
          break;
        }
        case PdeKind::allen_cahn: {
          std::mt19937_64 rng(seed);
          const double eps2 = std::uniform_real_distribution<double>(config.pde.eps2_min, config.pde.eps2_max)(rng);
          const auto u0 = pde_lab::allen_cahn_initial(grid);
          field = pde_lab::solve_allen_cahn(u0, eps2, grid, config.pde.T, config.n_t).field;
          rec.input.resize(config.m + 1);
          rec.input.head(config.m) = u0;
          rec.input(config.m) = eps2;
          meta["eps2"] = eps2;
          break;
        }
        case PdeKind::diffusion_reaction: {
          rec.input = rbf->sample(seed);
          field = pde_lab::solve_diffusion_reaction(rec.input, grid, config.pde.D, config.pde.k, config.pde.T,
                                                    config.n_t);
          break;
        }
      }
      pde_lab::save_field(out_dir / rec.field_file, field, meta.dump());
      records[i] = std::move(rec);
    } catch (const NumericalError& e) {
      std::lock_guard lock(warn_mutex);
      log::warn("sample " + std::to_string(index) + " skipped: " + e.what());
    }
  });

  DatasetManifest man;
  man.pde_hash = pde_hash(config);
  man.config_json = to_json(config);
  man.pde = config.pde;
  man.seed = config.data_seed;
  man.m = config.m;
  man.sensors = grid;
  man.directory = out_dir;
  std::vector<int> ok;
  for (int i = 0; i < total; ++i) {
    if (records[static_cast<std::size_t>(i)]) {
      ok.push_back(i);
      man.samples.push_back(std::move(*records[static_cast<std::size_t>(i)]));
    } else {
      man.failed.push_back(i);
    }
  }
  if (man.failed.size() * 100 > static_cast<std::size_t>(total))
    throw NumericalError(std::to_string(man.failed.size()) + " of " + std::to_string(total) +
                         " samples failed to solve (more than 1%)");
  std::mt19937_64 split_rng(config.data_seed ^ kSplitSalt);
  std::shuffle(ok.begin(), ok.end(), split_rng);
  const std::size_t n_train = std::min(ok.size(), static_cast<std::size_t>(config.n_train));
  man.train.assign(ok.begin(), ok.begin() + static_cast<std::ptrdiff_t>(n_train));
  man.test.assign(ok.begin() + static_cast<std::ptrdiff_t>(n_train), ok.end());
  std::sort(man.train.begin(), man.train.end());
  std::sort(man.test.begin(), man.test.end());

  json j;
  j["format"] = "pip2-dataset";
  j["format_version"] = man.format_version;
  j["pde_hash"] = man.pde_hash;
  j["config"] = json::parse(man.config_json);
  j["seed"] = man.seed;
  j["m"] = man.m;
  j["sensors"] = grid_json(grid);
  json samples = json::array();
  for (const auto& r : man.samples)
    samples.push_back({{"index", r.index},
                       {"seed", r.seed},
                       {"field", r.field_file},
                       {"input", std::vector<double>(r.input.data(), r.input.data() + r.input.size())}});
  j["samples"] = samples;
  j["split"] = {{"train", man.train}, {"test", man.test}};
  j["failed"] = man.failed;
  io::write_text(out_dir / "manifest.json", j.dump(1) + "\n");
  log::info("wrote " + std::to_string(man.samples.size()) + " samples to " + out_dir.string());
  return man;
}

DatasetManifest load_manifest(const std::filesystem::path& manifest_path) {
  json j;
  try {
    j = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw ConfigError("dataset manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "pip2-dataset") throw ConfigError("not a dataset manifest: " + manifest_path.string());
  DatasetManifest man;
  try {
    man.format_version = j.at("format_version").get<int>();
    if (man.format_version != 1) throw ConfigError("unsupported dataset format version");
    man.pde_hash = j.at("pde_hash").get<std::string>();
    man.config_json = j.at("config").dump(2);
    const auto cfg = parse_config(man.config_json);
    man.pde = cfg.pde;
    man.seed = j.at("seed").get<std::uint64_t>();
    man.m = j.at("m").get<int>();
    const auto& s = j.at("sensors");
    man.sensors = {s.at("n").get<int>(), s.at("lo").get<double>(), s.at("hi").get<double>(),
                   s.at("periodic").get<bool>()};
    for (const auto& r : j.at("samples")) {
      SampleRecord rec;
      rec.index = r.at("index").get<int>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.field_file = r.at("field").get<std::string>();
      const auto v = r.at("input").get<std::vector<double>>();
      rec.input = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      man.samples.push_back(std::move(rec));
    }
    man.train = j.at("split").at("train").get<std::vector<int>>();
    man.test = j.at("split").at("test").get<std::vector<int>>();
    man.failed = j.at("failed").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError("dataset manifest " + manifest_path.string() + ": " + e.what());
  }
  man.directory = manifest_path.parent_path();
  for (int i : man.train) (void)man.sample(i);
  for (int i : man.test) (void)man.sample(i);
  for (const auto& r : man.samples)
    if (!std::filesystem::exists(man.directory / r.field_file))
      throw ConfigError("dataset file missing: " + (man.directory / r.field_file).string());
  return man;
}

}  // namespace pip2::harness
