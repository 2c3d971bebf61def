#include "pip2/harness/train.hpp"

#include <bit>
#include <chrono>
#include <json.hpp>
#include <random>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/diffcore/adam.hpp"
#include "pip2/diffcore/checkpoint.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;
using operator_models::OperatorModel;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

std::string breakdown_text(const operator_models::LossBreakdown& l) {
  return "total=" + std::to_string(l.total) + " data=" + std::to_string(l.data) +
         " physics=" + std::to_string(l.physics) + " bc=" + std::to_string(l.bc) +
         " penalty=" + std::to_string(l.penalty);
}

}  // namespace

bool TrainLog::same_trajectory(const TrainLog& other) const {
  if (records.size() != other.records.size()) return false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = other.records[i];
    if (a.iteration != b.iteration || !same_bits(a.loss.total, b.loss.total) ||
        !same_bits(a.loss.data, b.loss.data) || !same_bits(a.loss.physics, b.loss.physics) ||
        !same_bits(a.loss.bc, b.loss.bc) || !same_bits(a.loss.penalty, b.loss.penalty) ||
        !same_bits(a.c, b.c))
      return false;
  }
  return true;
}

std::string to_json(const TrainLog& log) {
  json recs = json::array();
  for (const auto& r : log.records)
    recs.push_back({{"iteration", r.iteration},
                    {"total", r.loss.total},
                    {"data", r.loss.data},
                    {"physics", r.loss.physics},
                    {"bc", r.loss.bc},
                    {"penalty", r.loss.penalty},
                    {"c", r.c},
                    {"wall_time", r.wall_time}});
  json j;
  j["format"] = "pip2-train-log";
  j["format_version"] = 1;
  j["records"] = recs;
  return j.dump() + "\n";
}

TrainLog parse_train_log(const std::string& text) {
  TrainLog log;
  try {
    const auto j = json::parse(text);
    if (j.value("format", "") != "pip2-train-log") throw ConfigError("not a train log");
    for (const auto& r : j.at("records")) {
      TrainRecord rec;
      rec.iteration = r.at("iteration").get<int>();
      rec.loss.total = r.at("total").get<double>();
      rec.loss.data = r.at("data").get<double>();
      rec.loss.physics = r.at("physics").get<double>();
      rec.loss.bc = r.at("bc").get<double>();
      rec.loss.penalty = r.at("penalty").get<double>();
      rec.c = r.at("c").get<double>();
      rec.wall_time = r.at("wall_time").get<double>();
      if (!log.records.empty() && rec.iteration <= log.records.back().iteration)
        throw ConfigError("train log iterations not increasing");
      log.records.push_back(rec);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train log: ") + e.what());
  }
  return log;
}

OperatorModel initial_model(const ExperimentConfig& config, std::uint64_t seed) {
  return OperatorModel::initialize(config.branch_layers, config.trunk_layers, config.variant, config.penalty_mode,
                                   config.c_mode, config.hard_normalize(), seed);
}

std::vector<TrainingSample> load_training_samples(const DatasetManifest& manifest,
                                                  const std::vector<int>& indices) {
  std::vector<TrainingSample> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back({manifest.sample(i).input, manifest.load_field(i)});
  return out;
}

TrainResult train(const ExperimentConfig& config, const DatasetManifest& manifest, std::uint64_t seed,
                  const TrainOptions& options) {
  config.validate();
  if (manifest.pde_hash != pde_hash(config))
    throw ConfigError("dataset was generated for a different PDE/data configuration (hash " + manifest.pde_hash +
                      ", config " + pde_hash(config) + ")");
  const int iterations = options.iterations >= 0 ? options.iterations : config.iterations;
  const auto& indices = options.train_indices.empty() ? manifest.train : options.train_indices;
  if (indices.empty()) throw ConfigError("no training functions");
  const auto samples = load_training_samples(manifest, indices);
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_functions), samples.size());

  TrainResult res;
  res.config = config;
  res.config.iterations = iterations;
  res.seed = seed;
  res.iterations = iterations;
  res.model = initial_model(config, seed);
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  diffcore::AdamState adam(res.model.parameter_count());
  auto params = res.model.flatten();
  const auto start = std::chrono::steady_clock::now();

  for (int it = 0; it <= iterations; ++it) {
    operator_models::CollocationBatch cb;
    for (std::size_t k = 0; k < batch; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, order.size() - 1);
      std::swap(order[k], order[pick(rng)]);
    }
    for (std::size_t k = 0; k < batch; ++k) cb.samples.push_back(sample_collocation(config, samples[order[k]], rng));

    auto grad = operator_models::ModelGradient::zeros(res.model);
    operator_models::LossBreakdown loss;
    try {
      loss = operator_models::total_loss_and_grad(res.model, config.pde, cb, config.weights, grad);
    } catch (const NumericalError& e) {
      throw NumericalError("training diverged at iteration " + std::to_string(it) + ": " + e.what());
    }
    TrainRecord rec;
    rec.iteration = it;
    rec.loss = loss;
    rec.c = res.model.c.value;
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.log.records.push_back(rec);
    if (options.progress_every > 0 && (it % options.progress_every == 0 || it == iterations))
      log::info("iter " + std::to_string(it) + " " + breakdown_text(loss));
    if (it == iterations) break;

    const auto g = grad.flatten(res.model);
    try {
      diffcore::adam_step(adam, params, g, config.lr);
    } catch (const NumericalError& e) {
      throw NumericalError("training diverged at iteration " + std::to_string(it) + " (" + breakdown_text(loss) +
                           "): " + e.what());
    }
    res.model.assign(params);
  }
  return res;
}

void save_model(const std::filesystem::path& manifest_path, const OperatorModel& model,
                const ExperimentConfig& config, std::uint64_t seed) {
  if (manifest_path.has_parent_path()) std::filesystem::create_directories(manifest_path.parent_path());
  diffcore::Checkpoint ck;
  ck.networks = {{"branch", model.branch}, {"trunk", model.trunk}};
  ck.scalars = {{"br0", model.br0}, {"c", model.c.value}};
  json meta;
  meta["config_hash"] = config_hash(config);
  meta["pde_hash"] = pde_hash(config);
  meta["seed"] = seed;
  meta["config"] = json::parse(to_json(config));
  ck.metadata_json = meta.dump();
  diffcore::save_checkpoint(manifest_path, ck);
}

LoadedModel load_model(const std::filesystem::path& manifest_path) {
  const auto ck = diffcore::load_checkpoint(manifest_path);
  LoadedModel out;
  try {
    const auto meta = json::parse(ck.metadata_json);
    out.config = parse_config(meta.at("config").dump());
    out.config_hash = meta.at("config_hash").get<std::string>();
    out.pde_hash = meta.at("pde_hash").get<std::string>();
    out.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint " + manifest_path.string() + " lacks experiment metadata: " + e.what());
  }
  if (out.config_hash != config_hash(out.config))
    throw ConfigError("checkpoint config hash does not match its embedded config");
  const auto& c = out.config;
  out.model.branch = ck.network("branch");
  out.model.trunk = ck.network("trunk");
  out.model.br0 = ck.scalar("br0");
  out.model.variant = c.variant;
  out.model.penalty_mode = c.penalty_mode;
  out.model.c = c.c_mode;
  out.model.c.value = ck.scalar("c");
  out.model.hard_normalize = c.hard_normalize();
  out.model.validate();
  return out;
}

void save_run(const std::filesystem::path& dir, const TrainResult& result) {
  std::filesystem::create_directories(dir);
  save_model(dir / "model.json", result.model, result.config, result.seed);
  io::write_text(dir / "train_log.json", to_json(result.log));
}

}  // namespace pip2::harness
