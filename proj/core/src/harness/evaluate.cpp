#include "pip2/harness/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/operator_models/losses.hpp"
#include "pip2/pde_lab/metrics.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> seed_checkpoints(const fs::path& p) {
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  if (fs::exists(p / "model.json")) return {p / "model.json"};
  for (const auto& e : fs::directory_iterator(p))
    if (e.is_directory() && e.path().filename().string().rfind("seed_", 0) == 0 && fs::exists(e.path() / "model.json"))
      out.push_back(e.path() / "model.json");
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ConfigError("no model.json or seed_*/model.json under " + p.string());
  return out;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Evaluation::median_rel_l2() const { return median(per_seed_rel_l2()); }

std::vector<double> Evaluation::per_seed_rel_l2() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.mean);
  return v;
}

std::vector<double> Evaluation::median_pointwise() const {
  if (runs.empty()) return {};
  std::vector<double> out(runs.front().pointwise_error.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.pointwise_error.at(i));
    out[i] = median(v);
  }
  return out;
}

const RunEvaluation& Evaluation::representative() const {
  if (runs.empty()) throw ConfigError("evaluation has no runs");
  std::vector<std::size_t> order(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return runs[a].mean < runs[b].mean; });
  return runs[order[(order.size() - 1) / 2]];
}

pde_lab::SpaceTimeField predict_field(const operator_models::OperatorModel& model, const Eigen::VectorXd& kappa,
                                      const pde_lab::SpaceTimeField& like) {
  const int nx = like.xgrid.n;
  const int nt = like.tgrid.n;
  Eigen::Matrix2Xd coords(2, static_cast<Eigen::Index>(nx) * nt);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) coords.col(i + static_cast<Eigen::Index>(j) * nx) << like.xgrid.point(i), like.tgrid.point(j);
  const Eigen::MatrixXd pred = operator_models::predict(model, kappa, coords);
  pde_lab::SpaceTimeField out;
  out.xgrid = like.xgrid;
  out.tgrid = like.tgrid;
  out.values = Eigen::Map<const Eigen::MatrixXd>(pred.data(), nx, nt);
  return out;
}

RunEvaluation evaluate_run(const LoadedModel& lm, const DatasetManifest& manifest, const std::vector<int>& indices) {
  if (lm.pde_hash != manifest.pde_hash)
    throw ConfigError("checkpoint was trained for a different PDE/data configuration than the dataset");
  if (indices.empty()) throw ConfigError("evaluation split is empty");
  RunEvaluation r;
  r.config_hash = lm.config_hash;
  r.seed = lm.seed;
  r.pointwise_t = lm.config.report.pointwise_t;
  r.pointwise_x = lm.config.report.pointwise_x;
  const std::size_t n = indices.size();
  r.per_sample.resize(n);
  std::vector<std::vector<double>> pw(n);
  for (std::size_t s = 0; s < n; ++s) {
    const int idx = indices[s];
    const auto ref = manifest.load_field(idx);
    const auto pred = predict_field(lm.model, manifest.sample(idx).input, ref);
    r.per_sample[s] = {idx, pde_lab::relative_l2(pred, ref)};
    pw[s] = pde_lab::pointwise_abs_error(pred, ref, r.pointwise_x, r.pointwise_t).errors;
  }
  std::vector<double> errs;
  double sum = 0.0;
  for (const auto& e : r.per_sample) {
    errs.push_back(e.rel_l2);
    sum += e.rel_l2;
  }
  r.mean = sum / static_cast<double>(n);
  r.median = median(errs);
  double ss = 0.0;
  for (double e : errs) ss += (e - r.mean) * (e - r.mean);
  r.std = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  r.pointwise_error.assign(r.pointwise_x.size(), 0.0);
  for (std::size_t k = 0; k < r.pointwise_x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) acc += pw[s][k];
    r.pointwise_error[k] = acc / static_cast<double>(n);
  }
  return r;
}

Evaluation evaluate(const fs::path& checkpoint, const DatasetManifest& manifest, const std::string& split) {
  if (split != "test" && split != "train") throw ConfigError("split must be 'test' or 'train', got '" + split + "'");
  const auto& indices = split == "test" ? manifest.test : manifest.train;
  Evaluation ev;
  ev.split = split;
  ev.manifest = fs::absolute(manifest.directory / "manifest.json").lexically_normal().string();
  ev.pde_hash = manifest.pde_hash;
  for (const auto& ck : seed_checkpoints(checkpoint)) {
    const auto lm = load_model(ck);
    const auto variant = operator_models::to_string(lm.config.variant);
    if (!ev.variant.empty() && ev.variant != variant)
      throw ConfigError("runs under " + checkpoint.string() + " mix variants");
    ev.variant = variant;
    auto run = evaluate_run(lm, manifest, indices);
    run.checkpoint = fs::absolute(ck).lexically_normal().string();
    ev.runs.push_back(std::move(run));
  }
  return ev;
}

void write_evaluation(const fs::path& dir, const Evaluation& ev) {
  fs::create_directories(dir);
  json runs = json::array();
  std::string csv = "seed,index,rel_l2\n";
  for (const auto& r : ev.runs) {
    json ps = json::array();
    for (const auto& e : r.per_sample) {
      ps.push_back({{"index", e.index}, {"rel_l2", e.rel_l2}});
      csv += std::to_string(r.seed) + "," + std::to_string(e.index) + "," + format_number(e.rel_l2) + "\n";
    }
    runs.push_back({{"checkpoint", r.checkpoint},
                    {"config_hash", r.config_hash},
                    {"seed", r.seed},
                    {"mean", r.mean},
                    {"median", r.median},
                    {"std", r.std},
                    {"pointwise", {{"t", r.pointwise_t}, {"x", r.pointwise_x}, {"error", r.pointwise_error}}},
                    {"per_sample", ps}});
  }
  json j;
  j["format"] = "pip2-evaluation";
  j["format_version"] = 1;
  j["variant"] = ev.variant;
  j["split"] = ev.split;
  j["manifest"] = ev.manifest;
  j["pde_hash"] = ev.pde_hash;
  j["median_rel_l2"] = ev.median_rel_l2();
  j["per_seed_rel_l2"] = ev.per_seed_rel_l2();
  j["runs"] = runs;
  io::write_text(dir / "evaluation.json", j.dump(1) + "\n");
  io::write_text(dir / "per_sample.csv", csv);
}

Evaluation read_evaluation(const fs::path& path) {
  Evaluation ev;
  try {
    const auto j = json::parse(io::read_text(path));
    if (j.value("format", "") != "pip2-evaluation") throw ConfigError("not an evaluation file: " + path.string());
    ev.variant = j.at("variant").get<std::string>();
    ev.split = j.at("split").get<std::string>();
    ev.manifest = j.at("manifest").get<std::string>();
    ev.pde_hash = j.at("pde_hash").get<std::string>();
    for (const auto& rj : j.at("runs")) {
      RunEvaluation r;
      r.checkpoint = rj.at("checkpoint").get<std::string>();
      r.config_hash = rj.at("config_hash").get<std::string>();
      r.seed = rj.at("seed").get<std::uint64_t>();
      r.mean = rj.at("mean").get<double>();
      r.median = rj.at("median").get<double>();
      r.std = rj.at("std").get<double>();
      r.pointwise_t = rj.at("pointwise").at("t").get<double>();
      r.pointwise_x = rj.at("pointwise").at("x").get<std::vector<double>>();
      r.pointwise_error = rj.at("pointwise").at("error").get<std::vector<double>>();
      for (const auto& e : rj.at("per_sample")) r.per_sample.push_back({e.at("index").get<int>(), e.at("rel_l2").get<double>()});
      ev.runs.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("evaluation file " + path.string() + ": " + e.what());
  }
  return ev;
}

}  // namespace pip2::harness
