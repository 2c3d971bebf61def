#include "pip2/harness/config.hpp"

#include <json.hpp>
#include <set>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"

namespace pip2::harness {

using json = nlohmann::ordered_json;
using operator_models::LossWeights;
using operator_models::PdeKind;
using operator_models::PdeSpec;
using operator_models::PenaltyMode;
using operator_models::Variant;

namespace {

std::vector<int> mlp_widths(int in, int hidden_width, int linear_layers, int out) {
  std::vector<int> w{in};
  for (int i = 0; i + 1 < linear_layers; ++i) w.push_back(hidden_width);
  w.push_back(out);
  return w;
}

LossWeights default_weights(PdeKind kind, Variant v) {
  const double w_data = kind == PdeKind::diffusion_reaction ? 1.0 : 20.0;
  const double lambda = kind == PdeKind::diffusion_reaction ? 0.1 : 0.5;
  switch (v) {
    case Variant::deeponet:
    case Variant::pou_deeponet:
      return {1.0, 0.0, 0.0, 0.0};
    case Variant::pi_deeponet:
      return {w_data, 1.0, 1.0, 0.0};
    case Variant::pip2net:
      return {w_data, 1.0, 1.0, lambda};
  }
  return {};
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + where + "." + key + " has the wrong type");
  }
}

std::string kind_name(pde_lab::GrfKind k) { return k == pde_lab::GrfKind::matern ? "matern" : "rbf"; }

json pde_json(const ExperimentConfig& c) {
  json p;
  p["kind"] = operator_models::to_string(c.pde.kind);
  switch (c.pde.kind) {
    case PdeKind::burgers:
      p["nu"] = c.pde.nu;
      break;
    case PdeKind::allen_cahn:
      p["eps2_min"] = c.pde.eps2_min;
      p["eps2_max"] = c.pde.eps2_max;
      break;
    case PdeKind::diffusion_reaction:
      p["D"] = c.pde.D;
      p["k"] = c.pde.k;
      break;
  }
  p["T"] = c.pde.T;
  return p;
}

json data_json(const ExperimentConfig& c) {
  json g;
  g["kind"] = kind_name(c.grf.kind);
  g["sigma"] = c.grf.sigma;
  if (c.grf.kind == pde_lab::GrfKind::matern) {
    g["tau"] = c.grf.tau;
    g["gamma"] = c.grf.gamma;
  } else {
    g["length_scale"] = c.grf.length_scale;
  }
  json d;
  d["n_train"] = c.n_train;
  d["n_test"] = c.n_test;
  d["m"] = c.m;
  d["n_x"] = c.n_x;
  d["n_t"] = c.n_t;
  d["seed"] = c.data_seed;
  d["grf"] = g;
  return d;
}

}  // namespace

int ExperimentConfig::branch_input() const { return pde.kind == PdeKind::allen_cahn ? m + 1 : m; }

void ExperimentConfig::validate() const {
  pde.validate();
  grf.validate();
  if (m < 2 || n_x < 2 || n_t < 2) throw ConfigError("config: m, n_x and n_t must be at least 2");
  if (pde.kind == PdeKind::burgers) {
    if (grf.kind != pde_lab::GrfKind::matern) throw ConfigError("config: Burgers inputs use a Matern GRF");
    if (m != n_x) throw ConfigError("config: Burgers sensors are the solver grid, so m must equal n_x");
  } else if (pde.kind == PdeKind::diffusion_reaction) {
    if (grf.kind != pde_lab::GrfKind::rbf) throw ConfigError("config: diffusion-reaction sources use an RBF GRF");
    if (m != n_x) throw ConfigError("config: diffusion-reaction sensors are the solver grid, so m must equal n_x");
  } else if (m != n_x) {
    throw ConfigError("config: Allen-Cahn sensors are the solver grid, so m must equal n_x");
  }
  if (branch_layers.size() < 2 || trunk_layers.size() < 2) throw ConfigError("config: layer lists need two entries");
  for (int w : branch_layers)
    if (w <= 0) throw ConfigError("config: layer widths must be positive");
  for (int w : trunk_layers)
    if (w <= 0) throw ConfigError("config: layer widths must be positive");
  if (branch_layers.front() != branch_input())
    throw ConfigError("config: branch input width " + std::to_string(branch_layers.front()) + " does not match " +
                      std::to_string(branch_input()) + " branch inputs");
  if (trunk_layers.front() != 2) throw ConfigError("config: trunk input width must be 2 (x, t)");
  if (branch_layers.back() != trunk_layers.back() || p != branch_layers.back())
    throw ConfigError("config: branch and trunk output widths must both equal p");
  if (activation != "tanh") throw ConfigError("config: only tanh hidden activations are supported");
  weights.validate_for(variant);
  if (!(lr > 0.0)) throw ConfigError("config: lr must be positive");
  if (iterations < 0) throw ConfigError("config: iterations must be nonnegative");
  if (batch_functions <= 0 || P <= 0 || Q <= 0 || data_points < 0 || data_lattice < 2)
    throw ConfigError("config: counts must be positive");
  if (n_train <= 0 || n_test < 0) throw ConfigError("config: n_train must be positive");
  if (seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (grid_search.w_data.empty() || grid_search.lambda.empty()) throw ConfigError("config: grid-search grids must be nonempty");
  if (grid_search.iterations < 0 || grid_search.validation_functions <= 0 ||
      grid_search.validation_functions >= n_train)
    throw ConfigError("config: grid-search validation slice must be a proper subset of the training functions");
  if (pde.kind == PdeKind::allen_cahn && 1000 % (n_t - 1) != 0)
    throw ConfigError("config: Allen-Cahn n_t - 1 must divide the 1000 solver steps");
  if (pde.kind == PdeKind::burgers && (n_x & (n_x - 1)) != 0)
    throw ConfigError("config: Burgers n_x must be a power of two");
}

ExperimentConfig default_config(PdeKind kind) {
  ExperimentConfig c;
  c.variant = Variant::pip2net;
  c.penalty_mode = PenaltyMode::magnitude_sum;
  c.c_mode = {false, 1.0};
  c.lr = 1e-3;
  switch (kind) {
    case PdeKind::burgers:
      c.name = "burgers";
      c.pde = PdeSpec::burgers(0.01);
      c.m = c.n_x = 128;
      c.n_t = 101;
      c.p = 100;
      c.branch_layers = mlp_widths(128, 100, 7, 100);
      c.trunk_layers = mlp_widths(2, 100, 7, 100);
      c.grf = pde_lab::GrfSpec::matern(5.0, 5.0, 4.0);
      c.P = 100;
      c.Q = 2500;
      c.iterations = 10000;
      c.n_train = 200;
      c.n_test = 800;
      c.grid_search.w_data = {1, 5, 10, 20, 50, 100};
      c.grid_search.lambda = {0.25, 0.5, 0.75, 1};
      c.report = {{0.2, 0.4, 0.6, 0.8, 1.0}, 1.0, {0.05, 0.75, 1.0}, {0.1, 0.45, 0.6}};
      break;
    case PdeKind::allen_cahn:
      c.name = "allen_cahn";
      c.pde = PdeSpec::allen_cahn(0.1, 0.5);
      c.m = c.n_x = 100;
      c.n_t = 101;
      c.p = 100;
      c.branch_layers = mlp_widths(101, 100, 7, 100);
      c.trunk_layers = mlp_widths(2, 100, 7, 100);
      c.grf = pde_lab::GrfSpec::matern(1.0, 1.0, 1.0);  // unused: inputs are (u0, eps^2)
      c.P = 100;
      c.Q = 2500;
      c.iterations = 20000;
      c.n_train = 200;
      c.n_test = 800;
      c.grid_search.w_data = {1, 5, 10, 20, 50, 100};
      c.grid_search.lambda = {0.25, 0.5, 0.75, 1};
      c.report = {{0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, 0.9, {0.05, 0.75, 1.0}, {0.1, 0.35, 0.6}};
      break;
    case PdeKind::diffusion_reaction:
      c.name = "diffusion_reaction";
      c.pde = PdeSpec::diffusion_reaction(0.01, 0.01);
      c.m = c.n_x = 100;
      c.n_t = 100;
      c.p = 50;
      c.branch_layers = mlp_widths(100, 50, 6, 50);
      c.trunk_layers = mlp_widths(2, 50, 6, 50);
      c.grf = pde_lab::GrfSpec::rbf(1.0, 0.2);
      c.P = 100;
      c.Q = 100;
      c.iterations = 10000;
      c.n_train = 500;
      c.n_test = 50;
      c.grid_search.w_data = {1};
      c.grid_search.lambda = {0.05, 0.1, 0.15, 0.2, 0.5, 1};
      c.report = {{0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, 1.0, {0.5, 0.75, 1.0}, {0.5, 0.75, 0.85}};
      break;
  }
  c.weights = default_weights(kind, c.variant);
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"schema_version", "name", "pde", "data", "model", "training", "grid_search", "report"}, "config");
  if (!j.contains("schema_version") || j.at("schema_version") != 1)
    throw ConfigError("config: schema_version 1 is required");
  if (!j.contains("pde") || !j.at("pde").contains("kind")) throw ConfigError("config: pde.kind is required");

  const json& pj = j.at("pde");
  reject_unknown(pj, {"kind", "nu", "eps2_min", "eps2_max", "D", "k", "T"}, "pde");
  ExperimentConfig c = default_config(operator_models::parse_pde_kind(pj.at("kind").get<std::string>()));
  read(j, "name", c.name, "config");
  read(pj, "nu", c.pde.nu, "pde");
  read(pj, "eps2_min", c.pde.eps2_min, "pde");
  read(pj, "eps2_max", c.pde.eps2_max, "pde");
  read(pj, "D", c.pde.D, "pde");
  read(pj, "k", c.pde.k, "pde");
  read(pj, "T", c.pde.T, "pde");

  bool m_given = false;
  if (j.contains("data")) {
    const json& d = j.at("data");
    reject_unknown(d, {"n_train", "n_test", "m", "n_x", "n_t", "seed", "grf"}, "data");
    m_given = d.contains("m");
    read(d, "n_train", c.n_train, "data");
    read(d, "n_test", c.n_test, "data");
    read(d, "m", c.m, "data");
    read(d, "n_x", c.n_x, "data");
    read(d, "n_t", c.n_t, "data");
    read(d, "seed", c.data_seed, "data");
    if (m_given && !d.contains("n_x")) c.n_x = c.m;
    if (!m_given && d.contains("n_x")) c.m = c.n_x;
    m_given = m_given || d.contains("n_x");
    if (d.contains("grf")) {
      const json& g = d.at("grf");
      reject_unknown(g, {"kind", "sigma", "tau", "gamma", "length_scale"}, "data.grf");
      if (g.contains("kind")) {
        const auto k = g.at("kind").get<std::string>();
        if (k == "matern") c.grf.kind = pde_lab::GrfKind::matern;
        else if (k == "rbf") c.grf.kind = pde_lab::GrfKind::rbf;
        else throw ConfigError("config: unknown GRF kind '" + k + "'");
      }
      read(g, "sigma", c.grf.sigma, "data.grf");
      read(g, "tau", c.grf.tau, "data.grf");
      read(g, "gamma", c.grf.gamma, "data.grf");
      read(g, "length_scale", c.grf.length_scale, "data.grf");
    }
  }

  bool branch_given = false;
  if (j.contains("model")) {
    const json& mj = j.at("model");
    reject_unknown(mj, {"variant", "branch_layers", "trunk_layers", "activation", "penalty_mode", "c"}, "model");
    if (mj.contains("variant")) {
      c.variant = operator_models::parse_variant(mj.at("variant").get<std::string>());
      c.weights = default_weights(c.pde.kind, c.variant);
    }
    branch_given = mj.contains("branch_layers");
    read(mj, "branch_layers", c.branch_layers, "model");
    read(mj, "trunk_layers", c.trunk_layers, "model");
    read(mj, "activation", c.activation, "model");
    if (mj.contains("penalty_mode"))
      c.penalty_mode = operator_models::parse_penalty_mode(mj.at("penalty_mode").get<std::string>());
    if (mj.contains("c")) {
      const json& cj = mj.at("c");
      reject_unknown(cj, {"learnable", "value"}, "model.c");
      read(cj, "learnable", c.c_mode.learnable, "model.c");
      read(cj, "value", c.c_mode.value, "model.c");
    }
  }
  // A changed sensor count carries over to the default branch input width.
  if (m_given && !branch_given && !c.branch_layers.empty()) c.branch_layers.front() = c.branch_input();
  c.p = c.branch_layers.empty() ? 0 : c.branch_layers.back();

  if (j.contains("training")) {
    const json& t = j.at("training");
    reject_unknown(t, {"lr", "iterations", "batch_functions", "P", "Q", "data_points", "data_lattice", "seeds",
                       "weights"},
                   "training");
    read(t, "lr", c.lr, "training");
    read(t, "iterations", c.iterations, "training");
    read(t, "batch_functions", c.batch_functions, "training");
    read(t, "P", c.P, "training");
    read(t, "Q", c.Q, "training");
    read(t, "data_points", c.data_points, "training");
    read(t, "data_lattice", c.data_lattice, "training");
    read(t, "seeds", c.seeds, "training");
    if (t.contains("weights")) {
      const json& w = t.at("weights");
      reject_unknown(w, {"w_data", "w_physics", "w_bc", "lambda_p2"}, "training.weights");
      read(w, "w_data", c.weights.w_data, "training.weights");
      read(w, "w_physics", c.weights.w_physics, "training.weights");
      read(w, "w_bc", c.weights.w_bc, "training.weights");
      read(w, "lambda_p2", c.weights.lambda_p2, "training.weights");
    }
  }
  if (j.contains("grid_search")) {
    const json& g = j.at("grid_search");
    reject_unknown(g, {"w_data", "lambda", "iterations", "validation_functions"}, "grid_search");
    read(g, "w_data", c.grid_search.w_data, "grid_search");
    read(g, "lambda", c.grid_search.lambda, "grid_search");
    read(g, "iterations", c.grid_search.iterations, "grid_search");
    read(g, "validation_functions", c.grid_search.validation_functions, "grid_search");
  }
  if (j.contains("report")) {
    const json& r = j.at("report");
    reject_unknown(r, {"pointwise_x", "pointwise_t", "slice_t", "slice_x"}, "report");
    read(r, "pointwise_x", c.report.pointwise_x, "report");
    read(r, "pointwise_t", c.report.pointwise_t, "report");
    read(r, "slice_t", c.report.slice_t, "report");
    read(r, "slice_x", c.report.slice_x, "report");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(io::read_text(path)); }

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["name"] = c.name;
  j["pde"] = pde_json(c);
  j["data"] = data_json(c);
  j["model"] = {{"variant", operator_models::to_string(c.variant)},
                {"branch_layers", c.branch_layers},
                {"trunk_layers", c.trunk_layers},
                {"activation", c.activation},
                {"penalty_mode", operator_models::to_string(c.penalty_mode)},
                {"c", {{"learnable", c.c_mode.learnable}, {"value", c.c_mode.value}}}};
  j["training"] = {{"lr", c.lr},
                   {"iterations", c.iterations},
                   {"batch_functions", c.batch_functions},
                   {"P", c.P},
                   {"Q", c.Q},
                   {"data_points", c.data_points},
                   {"data_lattice", c.data_lattice},
                   {"seeds", c.seeds},
                   {"weights",
                    {{"w_data", c.weights.w_data},
                     {"w_physics", c.weights.w_physics},
                     {"w_bc", c.weights.w_bc},
                     {"lambda_p2", c.weights.lambda_p2}}}};
  j["grid_search"] = {{"w_data", c.grid_search.w_data},
                      {"lambda", c.grid_search.lambda},
                      {"iterations", c.grid_search.iterations},
                      {"validation_functions", c.grid_search.validation_functions}};
  j["report"] = {{"pointwise_x", c.report.pointwise_x},
                 {"pointwise_t", c.report.pointwise_t},
                 {"slice_t", c.report.slice_t},
                 {"slice_x", c.report.slice_x}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& c) { return io::hex64(io::fnv1a64(to_json(c))); }

std::string pde_hash(const ExperimentConfig& c) {
  json j;
  j["pde"] = pde_json(c);
  j["data"] = data_json(c);
  return io::hex64(io::fnv1a64(j.dump()));
}

}  // namespace pip2::harness
