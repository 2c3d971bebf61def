#include "pip2/harness/grid_search.hpp"

#include <json.hpp>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/harness/evaluate.hpp"
#include "pip2/harness/train.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;

GridSearchResult grid_search(const ExperimentConfig& config, const std::vector<double>& w_data_grid,
                             const std::vector<double>& lambda_grid, const DatasetManifest& manifest,
                             std::uint64_t seed, int iterations) {
  if (w_data_grid.empty() || lambda_grid.empty()) throw ConfigError("grid search needs nonempty grids");
  const int n_val = config.grid_search.validation_functions;
  if (n_val <= 0 || static_cast<std::size_t>(n_val) >= manifest.train.size())
    throw ConfigError("validation slice must be nonempty and smaller than the training split");
  GridSearchResult res;
  const std::vector<int> fit(manifest.train.begin(), manifest.train.end() - n_val);
  res.validation_indices.assign(manifest.train.end() - n_val, manifest.train.end());
  const bool penalized = config.variant == operator_models::Variant::pip2net;
  const std::vector<double> lambdas = penalized ? lambda_grid : std::vector<double>{0.0};

  for (double w : w_data_grid) {
    for (double lam : lambdas) {
      ExperimentConfig c = config;
      c.weights.w_data = w;
      c.weights.lambda_p2 = lam;
      c.validate();
      TrainOptions opt;
      opt.iterations = iterations;
      opt.progress_every = 0;
      opt.train_indices = fit;
      const auto run = train(c, manifest, seed, opt);
      LoadedModel lm{run.model, run.config, config_hash(run.config), pde_hash(run.config), seed};
      const auto ev = evaluate_run(lm, manifest, res.validation_indices);
      res.cells.push_back({w, lam, run.log.last().loss.total, ev.mean});
      log::info("grid cell w_data=" + format_number(w) + " lambda=" + format_number(lam) +
                " validation rel L2=" + format_number(ev.mean));
    }
  }
  for (std::size_t i = 1; i < res.cells.size(); ++i) {
    if (res.cells[i].validation_rel_l2 < res.cells[res.best_by_validation].validation_rel_l2) res.best_by_validation = i;
    if (res.cells[i].final_loss < res.cells[res.best_by_loss].final_loss) res.best_by_loss = i;
  }
  return res;
}

void write_grid_search(const std::filesystem::path& dir, const GridSearchResult& r) {
  std::filesystem::create_directories(dir);
  std::string csv = "w_data,lambda_p2,final_loss,validation_rel_l2\n";
  for (const auto& c : r.cells)
    csv += format_number(c.w_data) + "," + format_number(c.lambda_p2) + "," + format_number(c.final_loss) + "," +
           format_number(c.validation_rel_l2) + "\n";
  io::write_text(dir / "grid_search.csv", csv);
  const auto cell = [](const GridCell& c) {
    return json{{"w_data", c.w_data}, {"lambda_p2", c.lambda_p2}, {"final_loss", c.final_loss},
                {"validation_rel_l2", c.validation_rel_l2}};
  };
  json j;
  j["best_by_validation"] = cell(r.cells.at(r.best_by_validation));
  j["best_by_loss"] = cell(r.cells.at(r.best_by_loss));
  j["validation_indices"] = r.validation_indices;
  io::write_text(dir / "grid_search.json", j.dump(1) + "\n");
}

}  // namespace pip2::harness
