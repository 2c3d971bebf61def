#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pip2::diffcore {

enum class Activation { tanh, identity };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Gradient with the same layer shapes as the network it belongs to.
using MlpGradient = std::vector<DenseLayer>;

/// Dense feed-forward network: hidden layers use `hidden`, the last layer `output`.
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(std::vector<DenseLayer> layers, Activation hidden = Activation::tanh,
            Activation output = Activation::identity);

  /// Glorot-uniform weights, zero biases. `widths` = {in, h1, ..., out}.
  static MlpParams glorot(std::span<const int> widths, std::mt19937_64& rng);
  static MlpParams zeros(std::span<const int> widths);

  std::size_t depth() const { return layers_.size(); }
  int input_width() const;
  int output_width() const;
  std::vector<int> widths() const;

  Activation activation(std::size_t layer) const {
    return layer + 1 == layers_.size() ? output_ : hidden_;
  }
  Activation hidden_activation() const { return hidden_; }
  Activation output_activation() const { return output_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Throws ConfigError when the dimension chain is broken.
  void validate() const;

  std::size_t parameter_count() const;
  /// Layer order; within a layer, weight row-major then bias.
  void flatten_into(std::span<double> out) const;
  void assign_from(std::span<const double> in);

  MlpGradient zero_gradient() const;

 private:
  std::vector<DenseLayer> layers_;
  Activation hidden_ = Activation::tanh;
  Activation output_ = Activation::identity;
};

std::size_t gradient_size(const MlpGradient& g);
void flatten_gradient(const MlpGradient& g, std::span<double> out);
void accumulate(MlpGradient& into, const MlpGradient& g);

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& x);
/// Column-per-point batch evaluation.
Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& x);

/// Value plus first and second directional derivatives along one direction.
struct Jet2 {
  Eigen::VectorXd value;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
};

Jet2 mlp_jet2(const MlpParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& dir);

}  // namespace pip2::diffcore
