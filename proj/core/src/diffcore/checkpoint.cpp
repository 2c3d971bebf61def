#include "pip2/diffcore/checkpoint.hpp"

#include <json.hpp>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"

namespace pip2::diffcore {

using nlohmann::json;

namespace {

const char* activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw ConfigError("checkpoint: unknown activation '" + s + "'");
}

}  // namespace

const MlpParams& Checkpoint::network(const std::string& name) const {
  for (const auto& [n, p] : networks)
    if (n == name) return p;
  throw ConfigError("checkpoint: no network named '" + name + "'");
}

double Checkpoint::scalar(const std::string& name) const {
  for (const auto& [n, v] : scalars)
    if (n == name) return v;
  throw ConfigError("checkpoint: no scalar named '" + name + "'");
}

bool Checkpoint::has_scalar(const std::string& name) const {
  for (const auto& [n, v] : scalars)
    if (n == name) return true;
  return false;
}

void save_checkpoint(const std::filesystem::path& manifest_path, const Checkpoint& ckpt) {
  auto blob_path = manifest_path;
  blob_path.replace_extension(".bin");

  json manifest;
  manifest["format"] = "pip2-checkpoint";
  manifest["format_version"] = 1;
  manifest["blob"] = blob_path.filename().string();
  manifest["byte_order"] = "little";
  manifest["dtype"] = "float64";

  std::vector<double> blob;
  json nets = json::array();
  for (const auto& [name, params] : ckpt.networks) {
    params.validate();
    json layers = json::array();
    for (const auto& l : params.layers())
      layers.push_back({{"out", l.weight.rows()}, {"in", l.weight.cols()}});
    nets.push_back({{"name", name},
                    {"hidden_activation", activation_name(params.hidden_activation())},
                    {"output_activation", activation_name(params.output_activation())},
                    {"offset", blob.size()},
                    {"layers", layers}});
    const std::size_t start = blob.size();
    blob.resize(start + params.parameter_count());
    params.flatten_into(std::span<double>(blob).subspan(start));
  }
  manifest["networks"] = nets;
  json scalars = json::array();
  for (const auto& [name, value] : ckpt.scalars) {
    scalars.push_back({{"name", name}, {"offset", blob.size()}});
    blob.push_back(value);
  }
  manifest["scalars"] = scalars;
  manifest["total_values"] = blob.size();
  manifest["metadata"] = json::parse(ckpt.metadata_json);

  io::write_f64_blob(blob_path, blob);
  io::write_text(manifest_path, manifest.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint manifest is not valid JSON: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "pip2-checkpoint")
    throw ConfigError("not a checkpoint manifest: " + manifest_path.string());
  const auto blob = io::read_f64_blob(manifest_path.parent_path() / manifest.at("blob").get<std::string>());
  if (blob.size() != manifest.at("total_values").get<std::size_t>())
    throw ConfigError("checkpoint blob length does not match manifest");

  Checkpoint ckpt;
  for (const auto& net : manifest.at("networks")) {
    std::vector<DenseLayer> layers;
    for (const auto& l : net.at("layers")) {
      const auto out = l.at("out").get<Eigen::Index>();
      const auto in = l.at("in").get<Eigen::Index>();
      layers.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
    MlpParams params(std::move(layers), parse_activation(net.at("hidden_activation")),
                     parse_activation(net.at("output_activation")));
    const auto offset = net.at("offset").get<std::size_t>();
    if (offset + params.parameter_count() > blob.size())
      throw ConfigError("checkpoint network '" + net.at("name").get<std::string>() + "' overruns blob");
    params.assign_from(std::span<const double>(blob).subspan(offset, params.parameter_count()));
    ckpt.networks.emplace_back(net.at("name").get<std::string>(), std::move(params));
  }
  for (const auto& s : manifest.at("scalars")) {
    const auto offset = s.at("offset").get<std::size_t>();
    if (offset >= blob.size()) throw ConfigError("checkpoint scalar overruns blob");
    ckpt.scalars.emplace_back(s.at("name").get<std::string>(), blob[offset]);
  }
  ckpt.metadata_json = manifest.value("metadata", json::object()).dump();
  return ckpt;
}

}  // namespace pip2::diffcore
