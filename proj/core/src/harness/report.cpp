#include "pip2/harness/report.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <sstream>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"
#include "pip2/harness/svg.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<Evaluation> load_results(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("results directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "evaluation.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Evaluation> out;
  for (const auto& f : files) out.push_back(read_evaluation(f));
  if (out.empty()) throw ConfigError("no evaluation.json under " + dir.string());
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(io::read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

ReportBundle emit_report(const std::vector<Evaluation>& results, const fs::path& out_dir) {
  if (results.empty()) throw ConfigError("report needs at least one evaluation");
  fs::create_directories(out_dir);
  ReportBundle b;
  b.pointwise_x = results.front().runs.at(0).pointwise_x;
  b.pointwise_t = results.front().runs.at(0).pointwise_t;

  std::map<std::string, int> seen;
  json variants = json::array();
  for (const auto& ev : results) {
    const auto& rep = ev.representative();
    if (rep.pointwise_x != b.pointwise_x || rep.pointwise_t != b.pointwise_t)
      throw ConfigError("evaluations use different pointwise error locations");
    std::string tag = ev.variant;
    if (const int n = seen[ev.variant]++; n > 0) tag += "_" + std::to_string(n + 1);
    b.rows.push_back({tag, ev.split, ev.per_seed_rel_l2(), ev.median_rel_l2(), ev.median_pointwise()});

    const auto lm = load_model(rep.checkpoint);
    const auto man = load_manifest(ev.manifest);
    const int idx = rep.per_sample.at(0).index;
    const auto ref = man.load_field(idx);
    const auto pred = predict_field(lm.model, man.sample(idx).input, ref);
    const auto& rs = lm.config.report;
    const auto xs = ref.xgrid.points();
    const auto ts = ref.tgrid.points();
    const std::vector<double> xv(xs.data(), xs.data() + xs.size());
    const std::vector<double> tv(ts.data(), ts.data() + ts.size());
    const auto save = [&](const std::string& kind, const std::string& name, const std::string& text, double vmin = 0,
                          double vmax = 0) {
      const auto file = tag + "_" + name + ".svg";
      io::write_text(out_dir / file, text);
      b.plots.push_back({tag, kind, file, vmin, vmax});
    };
    for (std::size_t k = 0; k < rs.slice_t.size(); ++k) {
      const int j = ref.tgrid.nearest(rs.slice_t[k]);
      std::vector<double> yr(xv.size()), yp(xv.size());
      for (std::size_t i = 0; i < xv.size(); ++i) {
        yr[i] = ref.values(static_cast<Eigen::Index>(i), j);
        yp[i] = pred.values(static_cast<Eigen::Index>(i), j);
      }
      save("time_slice", "t" + std::to_string(k),
           svg::line_plot(tag + ": t = " + format_number(ref.tgrid.point(j)), "x", "u",
                          {{"reference", xv, yr, "#222222", false}, {tag, xv, yp, "#d62728", true}}));
    }
    for (std::size_t k = 0; k < rs.slice_x.size(); ++k) {
      const int i = ref.xgrid.nearest(rs.slice_x[k]);
      std::vector<double> yr(tv.size()), yp(tv.size());
      for (std::size_t j = 0; j < tv.size(); ++j) {
        yr[j] = ref.values(i, static_cast<Eigen::Index>(j));
        yp[j] = pred.values(i, static_cast<Eigen::Index>(j));
      }
      save("space_slice", "x" + std::to_string(k),
           svg::line_plot(tag + ": x = " + format_number(ref.xgrid.point(i)), "t", "u",
                          {{"reference", tv, yr, "#222222", false}, {tag, tv, yp, "#d62728", true}}));
    }
    svg::ColorLimits lim;
    auto text = svg::heatmap(tag + ": prediction", pred.values, ref.xgrid.x_lo, ref.xgrid.point(ref.xgrid.n - 1),
                             ref.tgrid.x_lo, ref.tgrid.x_hi, &lim);
    save("heatmap_pred", "pred", text, lim.vmin, lim.vmax);
    const Eigen::MatrixXd err = (pred.values - ref.values).cwiseAbs();
    text = svg::heatmap(tag + ": absolute error", err, ref.xgrid.x_lo, ref.xgrid.point(ref.xgrid.n - 1),
                        ref.tgrid.x_lo, ref.tgrid.x_hi, &lim);
    save("heatmap_error", "error", text, lim.vmin, lim.vmax);

    const auto snap = tag + "_config.json";
    io::write_text(out_dir / snap, json::parse(to_json(lm.config)).dump(2) + "\n");
    b.snapshots.push_back(snap);
    json runs = json::array();
    for (const auto& r : ev.runs) runs.push_back({{"seed", r.seed}, {"checkpoint", r.checkpoint}, {"rel_l2", r.mean}});
    variants.push_back({{"variant", tag}, {"manifest", ev.manifest}, {"plot_sample", idx},
                        {"plot_checkpoint", rep.checkpoint}, {"runs", runs}});
  }

  std::string csv = "variant,split,seeds,rel_l2_median,rel_l2_per_seed";
  for (double x : b.pointwise_x) csv += ",abs_err_x" + format_number(x) + "_t" + format_number(b.pointwise_t);
  csv += "\n";
  for (const auto& r : b.rows) {
    std::string seeds;
    for (std::size_t i = 0; i < r.per_seed.size(); ++i) seeds += (i ? ";" : "") + format_number(r.per_seed[i]);
    csv += r.variant + "," + r.split + "," + std::to_string(r.per_seed.size()) + "," + format_number(r.rel_l2_median) +
           "," + seeds;
    for (double e : r.pointwise) csv += "," + format_number(e);
    csv += "\n";
  }
  io::write_text(out_dir / "errors.csv", csv);
  b.tables.push_back("errors.csv");

  json plots = json::array();
  for (const auto& p : b.plots) {
    json pj{{"variant", p.variant}, {"kind", p.kind}, {"file", p.file}};
    if (p.kind.rfind("heatmap", 0) == 0) pj["color_limits"] = {p.vmin, p.vmax};
    plots.push_back(pj);
  }
  json idx;
  idx["format"] = "pip2-report";
  idx["tables"] = b.tables;
  idx["plots"] = plots;
  idx["configs"] = b.snapshots;
  idx["variants"] = variants;
  io::write_text(out_dir / "index.json", idx.dump(1) + "\n");
  return b;
}

}  // namespace pip2::harness
