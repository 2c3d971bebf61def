#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pip2/common/allocator.hpp"
#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/common/parallel.hpp"
#include "pip2/harness/config.hpp"
#include "pip2/harness/dataset.hpp"
#include "pip2/harness/evaluate.hpp"
#include "pip2/harness/grid_search.hpp"
#include "pip2/harness/report.hpp"
#include "pip2/harness/train.hpp"

namespace fs = std::filesystem;
using namespace pip2;
using namespace pip2::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed (data seed for gen-data, training seed otherwise)");
  cmd->add_option("--iterations", c.iterations, "Override the configured iteration count")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--quiet", c.quiet, "Only print warnings and errors");
}

int gen_data(const std::string& config_path, const std::string& out, const Common& c) {
  auto cfg = load_config(config_path);
  if (c.seed) cfg.data_seed = *c.seed;
  const auto man = generate_dataset(cfg, out);
  std::cout << (fs::path(out) / "manifest.json").string() << "\n";
  (void)man;
  return 0;
}

int train_cmd(const std::string& config_path, const std::string& manifest, const std::string& out, const Common& c) {
  const auto cfg = load_config(config_path);
  const auto man = load_manifest(manifest);
  const std::vector<std::uint64_t> seeds = c.seed ? std::vector<std::uint64_t>{*c.seed} : cfg.seeds;
  TrainOptions opt;
  if (c.iterations) opt.iterations = *c.iterations;
  for (auto s : seeds) {
    log::info("training " + operator_models::to_string(cfg.variant) + " seed " + std::to_string(s));
    const auto res = train(cfg, man, s, opt);
    const auto dir = fs::path(out) / ("seed_" + std::to_string(s));
    save_run(dir, res);
    std::cout << (dir / "model.json").string() << "\n";
  }
  return 0;
}

int grid_cmd(const std::string& config_path, const std::string& manifest, const std::string& out, const Common& c) {
  auto cfg = load_config(config_path);
  const auto man = load_manifest(manifest);
  const auto seed = c.seed ? *c.seed : cfg.seeds.at(0);
  const int iters = c.iterations ? *c.iterations : cfg.grid_search.iterations;
  const auto res = grid_search(cfg, cfg.grid_search.w_data, cfg.grid_search.lambda, man, seed, iters);
  write_grid_search(out, res);
  cfg.weights.w_data = res.best().w_data;
  cfg.weights.lambda_p2 = res.best().lambda_p2;
  io::write_text(fs::path(out) / "best_config.json", to_json(cfg) + "\n");
  std::cout << "w_data=" << format_number(res.best().w_data) << " lambda_p2=" << format_number(res.best().lambda_p2)
            << " validation_rel_l2=" << format_number(res.best().validation_rel_l2) << "\n";
  return 0;
}

int eval_cmd(const std::string& checkpoint, const std::string& manifest, const std::string& out,
             const std::string& split) {
  const auto man = load_manifest(manifest);
  const auto ev = evaluate(checkpoint, man, split);
  write_evaluation(out, ev);
  std::cout << ev.variant << " median rel L2 over " << ev.runs.size()
            << " seed(s): " << format_number(ev.median_rel_l2()) << "\n";
  return 0;
}

int report_cmd(const std::string& results, const std::string& out) {
  const auto b = emit_report(load_results(results), out);
  for (const auto& r : b.rows) std::cout << r.variant << " " << format_number(r.rel_l2_median) << "\n";
  std::cout << (fs::path(out) / "index.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-learning experiments: data generation, training, evaluation and reports"};
  app.require_subcommand(1);
  Common common;
  std::string a, b, out, split = "test";

  auto* gen = app.add_subcommand("gen-data", "Sample input functions and solve the reference PDE");
  gen->add_option("config", a, "Experiment config (JSON)")->required();
  gen->add_option("out", out, "Output dataset directory")->required();
  add_common(gen, common);

  auto* tr = app.add_subcommand("train", "Train one run per seed into <out>/seed_<s>/");
  tr->add_option("config", a, "Experiment config (JSON)")->required();
  tr->add_option("manifest", b, "Dataset manifest.json")->required();
  tr->add_option("out", out, "Output directory")->required();
  add_common(tr, common);

  auto* gs = app.add_subcommand("grid-search", "Score a (w_data, lambda) grid on held-out training functions");
  gs->add_option("config", a, "Experiment config (JSON)")->required();
  gs->add_option("manifest", b, "Dataset manifest.json")->required();
  gs->add_option("out", out, "Output directory")->required();
  add_common(gs, common);

  auto* ev = app.add_subcommand("eval", "Relative L2 and pointwise errors of a checkpoint or seed_* directory");
  ev->add_option("checkpoint", a, "model.json or a directory of seed_* runs")->required();
  ev->add_option("manifest", b, "Dataset manifest.json")->required();
  ev->add_option("out", out, "Output directory")->required();
  ev->add_option("--split", split, "test or train")->check(CLI::IsMember({"test", "train"}));
  add_common(ev, common);

  auto* rep = app.add_subcommand("report", "Tables and SVG plots from evaluation results");
  rep->add_option("results", a, "Directory searched for evaluation.json files")->required();
  rep->add_option("out", out, "Output directory")->required();
  add_common(rep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  retain_heap_memory();
  log::set_quiet(common.quiet);
  if (common.threads > 0) set_thread_count(common.threads);
  try {
    if (*gen) return gen_data(a, out, common);
    if (*tr) return train_cmd(a, b, out, common);
    if (*gs) return grid_cmd(a, b, out, common);
    if (*ev) return eval_cmd(a, b, out, split);
    if (*rep) return report_cmd(a, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
