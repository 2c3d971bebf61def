#include "pip2/diffcore/mlp.hpp"

#include <cmath>
#include <string>

#include "pip2/common/errors.hpp"
#include "pip2/diffcore/jet_tape.hpp"

namespace pip2::diffcore {

MlpParams::MlpParams(std::vector<DenseLayer> layers, Activation hidden, Activation output)
    : layers_(std::move(layers)), hidden_(hidden), output_(output) {
  validate();
}

MlpParams MlpParams::glorot(std::span<const int> widths, std::mt19937_64& rng) {
  MlpParams p = zeros(widths);
  for (auto& layer : p.layers_) {
    const double fan = static_cast<double>(layer.weight.rows() + layer.weight.cols());
    const double limit = std::sqrt(6.0 / fan);
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill so the draw order matches the flattened parameter order.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
  }
  return p;
}

MlpParams MlpParams::zeros(std::span<const int> widths) {
  if (widths.size() < 2) throw ConfigError("an MLP needs at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    if (widths[i] <= 0 || widths[i + 1] <= 0) throw ConfigError("layer widths must be positive");
    layers.push_back({Eigen::MatrixXd::Zero(widths[i + 1], widths[i]),
                      Eigen::VectorXd::Zero(widths[i + 1])});
  }
  return MlpParams(std::move(layers));
}

int MlpParams::input_width() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int MlpParams::output_width() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::vector<int> MlpParams::widths() const {
  std::vector<int> w;
  if (layers_.empty()) return w;
  w.push_back(input_width());
  for (const auto& l : layers_) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

void MlpParams::validate() const {
  if (layers_.empty()) throw ConfigError("MLP has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.bias.size() != l.weight.rows())
      throw ConfigError("layer " + std::to_string(i) + ": bias length does not match weight rows");
    if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows())
      throw ConfigError("layer " + std::to_string(i) + ": input width does not match previous output");
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

namespace {

void flatten_layers(const std::vector<DenseLayer>& layers, std::span<double> out) {
  std::size_t k = 0;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out[k++] = l.weight(r, c);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out[k++] = l.bias(r);
  }
}

}  // namespace

void MlpParams::flatten_into(std::span<double> out) const {
  if (out.size() != parameter_count()) throw ConfigError("flatten: wrong output size");
  flatten_layers(layers_, out);
}

void MlpParams::assign_from(std::span<const double> in) {
  if (in.size() != parameter_count()) throw ConfigError("assign: wrong parameter count");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = in[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = in[k++];
  }
}

MlpGradient MlpParams::zero_gradient() const {
  MlpGradient g;
  g.reserve(layers_.size());
  for (const auto& l : layers_)
    g.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                 Eigen::VectorXd::Zero(l.bias.size())});
  return g;
}

std::size_t gradient_size(const MlpGradient& g) {
  std::size_t n = 0;
  for (const auto& l : g) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void flatten_gradient(const MlpGradient& g, std::span<double> out) {
  if (out.size() != gradient_size(g)) throw ConfigError("flatten_gradient: wrong output size");
  flatten_layers(g, out);
}

void accumulate(MlpGradient& into, const MlpGradient& g) {
  if (into.size() != g.size()) throw ConfigError("accumulate: gradient depth mismatch");
  for (std::size_t i = 0; i < g.size(); ++i) {
    into[i].weight += g[i].weight;
    into[i].bias += g[i].bias;
  }
}

Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& x) {
  JetTape tape(params, x, {});
  return tape.output().value;
}

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x) {
  Eigen::MatrixXd col = x;
  return mlp_forward(params, col).col(0);
}

Jet2 mlp_jet2(const MlpParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& dir) {
  if (dir.size() != x.size()) throw ConfigError("mlp_jet2: direction and point differ in length");
  Eigen::MatrixXd col = x;
  JetTape tape(params, col, {JetDirection{dir, true}});
  const auto& out = tape.output();
  return {out.value.col(0), out.d1[0].col(0), out.d2[0].col(0)};
}

}  // namespace pip2::diffcore
