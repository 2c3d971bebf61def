// Acceptance gate: one PASS/FAIL line per criterion.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "derivative_oracles.hpp"
#include "harness_fixtures.hpp"
#include "pip2/common/allocator.hpp"
#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/common/parallel.hpp"
#include "pip2/harness/dataset.hpp"
#include "pip2/harness/evaluate.hpp"
#include "pip2/harness/report.hpp"
#include "pip2/harness/train.hpp"
#include "random_models.hpp"
#include "solver_oracles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pip2;
using namespace pip2::harness;
using operator_models::Variant;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path configs;
  fs::path work;
  std::string cli;
};

std::string sci(double v) { return fmt::format("{:.3e}", v); }

// ---------------------------------------------------------------------------------------

Outcome differentiation(const Context&) {
  const double jet = testing::jet_fd_worst(100, 20260);
  double worst_grad = 0.0;
  std::string worst_name;
  for (const auto& cs : testing::gradient_cases())
    for (std::uint64_t seed : {11u, 12u}) {
      const double e = testing::gradient_case_error(cs, seed);
      if (e > worst_grad) worst_grad = e, worst_name = cs.name;
    }
  return {jet < 1e-6 && worst_grad < 1e-5,
          "jet vs 4th-order FD worst " + sci(jet) + " (< 1e-6); loss gradients worst " + sci(worst_grad) + " [" +
              worst_name + "] (< 1e-5)"};
}

Outcome solvers(const Context&) {
  const auto spec = pde_lab::GrfSpec::matern(5.0, 5.0, 4.0);
  double drift = 0.0, conv = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto b = testing::burgers_checks(spec, 0.01, 1.0, seed);
    drift = std::max(drift, b.mass_drift);
    conv = std::max(conv, b.self_convergence);
  }
  const auto ac = testing::allen_cahn_energy_sweep(100, 77);
  const auto dr = testing::diffusion_reaction_manufactured(0.01, 0.01, 100);
  const bool ok = drift < 1e-10 && conv < 1e-4 && ac.runs == 100 && ac.violations == 0 && ac.steps_checked == 100000 &&
                  dr.error_coarse < 1e-3 && std::abs(dr.ratio - 4.0) <= 0.8;
  return {ok, "burgers mass drift " + sci(drift) + ", 128 vs 256 " + sci(conv) + "; allen-cahn " +
                  std::to_string(ac.violations) + " energy increases in " + std::to_string(ac.steps_checked) +
                  " steps; diffusion-reaction error " + sci(dr.error_coarse) + ", ratio " + fmt::format("{:.3f}", dr.ratio)};
}

Outcome grf(const Context&) {
  const auto ms = pde_lab::GrfSpec::matern(5.0, 5.0, 4.0);
  const auto mg = pde_lab::Grid1D::periodic_grid(128, 0.0, 1.0);
  const auto m = testing::matern_monte_carlo(ms, mg, 10000, 500000);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < m.variances.size(); ++i)
    worst_z = std::max(worst_z, std::abs(m.variances[i] - m.analytic) / m.variance_se[i]);
  const auto rs = pde_lab::GrfSpec::rbf(1.0, 0.2);
  const auto rg = pde_lab::Grid1D::closed(101, 0.0, 1.0);
  const auto r = testing::rbf_covariance_monte_carlo(rs, rg, 40, 60, 20000, 900000);
  const double rz = std::abs(r.estimate - r.expected) / r.standard_error;
  return {worst_z < 3.0 && rz < 3.0, "matern variance worst |z| " + fmt::format("{:.2f}", worst_z) + " (analytic " +
                                         sci(m.analytic) + "); rbf covariance at l: " + sci(r.estimate) + " vs " +
                                         sci(r.expected) + ", |z| " + fmt::format("{:.2f}", rz)};
}

// ---------------------------------------------------------------------------------------

struct RunSummary {
  std::string variant;
  std::uint64_t seed = 0;
  double rel_l2 = 0.0;
  double penalty_first = 0.0;
  double penalty_last = 0.0;
  double seconds = 0.0;
};

// Trains every variant config over its seeds, evaluates on the test split, writes
// summary.json, evaluation files and a report bundle under `dir`.
std::map<std::string, double> desk_reproduction(const Context& ctx, const std::string& prefix, const fs::path& dir,
                                                std::vector<RunSummary>& runs) {
  const std::vector<std::string> variants{"deeponet", "pi_deeponet", "pip2net"};
  std::vector<ExperimentConfig> cfgs;
  for (const auto& v : variants) cfgs.push_back(load_config(ctx.configs / (prefix + "_" + v + ".json")));
  for (const auto& c : cfgs)
    if (pde_hash(c) != pde_hash(cfgs[0])) throw ConfigError(prefix + " variant configs disagree on the data section");
  fs::remove_all(dir);
  const auto man = generate_dataset(cfgs[0], dir / "data");
  std::map<std::string, double> medians;
  json jruns = json::array();
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const auto& c = cfgs[k];
    TrainOptions opt;
    opt.progress_every = 1000;
    std::vector<double> errs;
    for (auto seed : c.seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = train(c, man, seed, opt);
      const auto run_dir = dir / "runs" / variants[k] / ("seed_" + std::to_string(seed));
      save_run(run_dir, res);
      LoadedModel lm{res.model, res.config, config_hash(res.config), pde_hash(res.config), seed};
      const auto ev = evaluate_run(lm, man, man.test);
      RunSummary rs{variants[k], seed, ev.mean, res.log.first().loss.penalty, res.log.last().loss.penalty,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
      log::info(fmt::format("{} {} seed {}: rel L2 {:.4e}, {:.0f} s", prefix, variants[k], seed, rs.rel_l2, rs.seconds));
      runs.push_back(rs);
      errs.push_back(rs.rel_l2);
      jruns.push_back({{"variant", rs.variant}, {"seed", rs.seed}, {"rel_l2", rs.rel_l2},
                       {"penalty_first", rs.penalty_first}, {"penalty_last", rs.penalty_last},
                       {"seconds", rs.seconds}, {"config_hash", lm.config_hash}});
    }
    medians[variants[k]] = median(errs);
    write_evaluation(dir / "results" / variants[k], evaluate(dir / "runs" / variants[k], man, "test"));
  }
  emit_report(load_results(dir / "results"), dir / "report");
  json j;
  j["runs"] = jruns;
  j["medians"] = medians;
  io::write_text(dir / "summary.json", j.dump(1) + "\n");
  return medians;
}

// Training plus evaluation time allowed for each desk reproduction.
constexpr double kDeskBudgetSeconds = 2.0 * 3600.0;

std::string medians_text(const std::map<std::string, double>& m) {
  return "median rel L2: PIP2Net " + sci(m.at("pip2net")) + ", PI-DeepONet " + sci(m.at("pi_deeponet")) +
         ", DeepONet " + sci(m.at("deeponet"));
}

Outcome diffusion_reaction_reproduction(const Context& ctx) {
  std::vector<RunSummary> runs;
  const auto m = desk_reproduction(ctx, "dr", ctx.work / "c4", runs);
  double total = 0.0;
  for (const auto& r : runs) total += r.seconds;
  const bool ok = m.at("pip2net") < m.at("pi_deeponet") && m.at("pi_deeponet") < m.at("deeponet") &&
                  m.at("pip2net") < 5e-2 && m.at("deeponet") < 2.5e-1 && total <= kDeskBudgetSeconds;
  return {ok, medians_text(m) + "; training time " + fmt::format("{:.0f}", total) + " s (budget 7200 s)"};
}

Outcome burgers_reproduction(const Context& ctx) {
  std::vector<RunSummary> runs;
  const auto m = desk_reproduction(ctx, "burgers", ctx.work / "c5", runs);
  double total = 0.0;
  for (const auto& r : runs) total += r.seconds;
  const bool ok = m.at("pip2net") <= 1.1 * m.at("pi_deeponet") && m.at("pip2net") < m.at("deeponet") &&
                  m.at("pi_deeponet") < m.at("deeponet") && m.at("pip2net") < 3e-1 && total <= kDeskBudgetSeconds;
  return {ok, medians_text(m) + "; training time " + fmt::format("{:.0f}", total) + " s (budget 7200 s)"};
}

Outcome penalty_behavior(const Context& ctx) {
  std::string detail;
  bool ok = true;
  int checked = 0;
  for (const char* c : {"c4", "c5"}) {
    const auto path = ctx.work / c / "summary.json";
    if (!fs::exists(path)) {
      ok = false;
      detail += std::string(c) + " results missing; ";
      continue;
    }
    const auto j = json::parse(io::read_text(path));
    double worst = 0.0;
    for (const auto& r : j.at("runs")) {
      if (r.at("variant") != "pip2net") continue;
      const double ratio = r.at("penalty_last").get<double>() / r.at("penalty_first").get<double>();
      worst = std::max(worst, ratio);
      ok = ok && ratio < 0.5;
      ++checked;
    }
    detail += std::string(c) + " worst final/initial penalty " + sci(worst) + "; ";
  }
  double worst_hard = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto model = testing::random_model(7, 9, 12, seed, Variant::pou_deeponet,
                                             operator_models::PenaltyMode::value_sum, {false, 1.0}, true);
    std::mt19937_64 rng(seed);
    const auto pts = testing::random_coords(operator_models::PdeSpec::burgers(0.01), 500, rng);
    worst_hard =
        std::max(worst_hard, operator_models::partition_penalty(model, pts, operator_models::PenaltyMode::value_sum, 1.0));
  }
  ok = ok && checked > 0 && worst_hard < 1e-20;
  return {ok, detail + std::to_string(checked) + " runs checked; hard-normalized value-sum penalty max " + sci(worst_hard)};
}

int run_cli(const Context& ctx, const std::string& args) {
  const std::string cmd = "\"" + ctx.cli + "\" " + args + " --quiet > /dev/null";
  return std::system(cmd.c_str());
}

Outcome determinism(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  const auto dir = ctx.work / "c7";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = testing::tiny_dr_config();
  cfg.iterations = 50;
  io::write_text(dir / "config.json", to_json(cfg) + "\n");
  const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
  std::vector<std::string> mismatches;
  int files = 0;
  const auto compare_tree = [&](const fs::path& a, const fs::path& b) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), a);
      if (rel.filename() == "train_log.json") continue;  // carries wall-clock times
      ++files;
      if (!fs::exists(b / rel) || testing::file_bytes(e.path()) != testing::file_bytes(b / rel))
        mismatches.push_back(rel.string());
    }
  };
  for (const char* run : {"a", "b"}) {
    const auto r = dir / run;
    if (run_cli(ctx, "gen-data " + q(dir / "config.json") + " " + q(r / "data")) != 0 ||
        run_cli(ctx, "train " + q(dir / "config.json") + " " + q(r / "data/manifest.json") + " " + q(r / "runs") +
                         " --seed 5") != 0 ||
        run_cli(ctx, "eval " + q(r / "runs") + " " + q(r / "data/manifest.json") + " " + q(r / "eval")) != 0 ||
        run_cli(ctx, "report " + q(r / "eval") + " " + q(r / "report")) != 0)
      return {false, std::string("CLI invocation failed in run ") + run};
  }
  compare_tree(dir / "a/data", dir / "b/data");
  compare_tree(dir / "a/runs", dir / "b/runs");
  for (const char* f : {"eval/per_sample.csv", "report/errors.csv"}) {
    ++files;
    if (testing::file_bytes(dir / "a" / f) != testing::file_bytes(dir / "b" / f)) mismatches.push_back(f);
  }
  const auto la = parse_train_log(io::read_text(dir / "a/runs/seed_5/train_log.json"));
  const auto lb = parse_train_log(io::read_text(dir / "b/runs/seed_5/train_log.json"));
  const bool logs = la.same_trajectory(lb);
  std::string detail = std::to_string(files) + " files compared byte for byte, " +
                       std::to_string(mismatches.size()) + " differ";
  if (!mismatches.empty()) detail += " (first: " + mismatches.front() + ")";
  detail += logs ? "; train logs identical apart from wall time" : "; train logs differ";
  return {mismatches.empty() && logs, detail};
}

Outcome reduction_identity(const Context& ctx) {
  std::string detail;
  bool ok = true;
  for (auto kind : {operator_models::PdeKind::diffusion_reaction, operator_models::PdeKind::burgers}) {
    auto pi = load_config(ctx.configs / (kind == operator_models::PdeKind::burgers ? "burgers_pi_deeponet.json"
                                                                                   : "dr_pi_deeponet.json"));
    pi.n_train = 20;
    pi.n_test = 2;
    pi.grid_search.validation_functions = 2;
    pi.iterations = 300;
    pi.batch_functions = 4;
    auto pip = pi;
    pip.variant = Variant::pip2net;
    pip.weights.lambda_p2 = 0.0;
    const auto dir = ctx.work / "c8" / operator_models::to_string(kind);
    fs::remove_all(dir);
    const auto man = generate_dataset(pi, dir);
    TrainOptions opt;
    opt.progress_every = 0;
    const auto a = train(pi, man, 9, opt);
    const auto b = train(pip, man, 9, opt);
    const bool same = a.log.same_trajectory(b.log);
    ok = ok && same;
    detail += operator_models::to_string(kind) + ": " + std::to_string(a.log.records.size()) + " records " +
              (same ? "identical" : "differ") + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> criteria;
  Context ctx;
  std::string configs = PIP2_ACCEPTANCE_CONFIG_DIR;
  std::string work = "acceptance_work";
  int threads = 0;
  bool verbose = false;
  app.add_option("--criterion", criteria, "Criterion numbers to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--configs", configs, "Directory holding the desk-scale configs");
  app.add_option("--work", work, "Scratch and results directory");
  app.add_option("--cli", ctx.cli, "Path of the pip2 executable");
  app.add_option("--threads", threads, "Worker threads");
  app.add_flag("--verbose", verbose, "Show progress output");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  ctx.work = fs::absolute(work);
  fs::create_directories(ctx.work);
  retain_heap_memory();
  log::set_quiet(!verbose);
  if (threads > 0) set_thread_count(threads);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::map<int, std::function<Outcome(const Context&)>> table{
      {1, differentiation}, {2, solvers}, {3, grf}, {4, diffusion_reaction_reproduction},
      {5, burgers_reproduction}, {6, penalty_behavior}, {7, determinism}, {8, reduction_identity}};
  bool all = true;
  for (int c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = table.at(c)(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << c << " " << (o.pass ? "PASS" : "FAIL") << " (" << fmt::format("{:.1f}", secs)
              << " s): " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
