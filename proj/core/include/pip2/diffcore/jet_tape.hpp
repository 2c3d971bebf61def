#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pip2/diffcore/mlp.hpp"

namespace pip2::diffcore {

/// A direction along which first (and optionally second) derivatives are carried.
struct JetDirection {
  Eigen::VectorXd dir;
  bool second_order = false;
};

/// Value and directional derivative streams for a batch of points (column per point).
/// d2[k] is empty unless direction k is second order.
struct JetBlock {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> d1;
  std::vector<Eigen::MatrixXd> d2;

  /// Same stream layout as `like`, zero-filled.
  static JetBlock zeros_like(const JetBlock& like);
};

/// Forward-mode second-order jet propagation through an MLP, recording every layer so
/// that reverse-mode parameter gradients of any functional of the jets can be pulled back.
///
/// Points are processed in fixed chunks of `kChunk` columns; chunks may run on worker
/// threads and gradients are reduced in chunk order, so results are independent of the
/// thread count. The tape keeps a reference to `params`, which must outlive it.
class JetTape {
 public:
  static constexpr Eigen::Index kChunk = 256;

  JetTape(const MlpParams& params, const Eigen::MatrixXd& inputs,
          std::vector<JetDirection> directions);

  const JetBlock& output() const { return output_; }
  const std::vector<JetDirection>& directions() const { return directions_; }
  Eigen::Index points() const { return output_.value.cols(); }

  /// Parameter gradient of sum(seed .* stream) over all output streams.
  /// Missing (empty) seed matrices are treated as zero.
  MlpGradient backward(const JetBlock& seeds) const;

  /// Names the first non-finite intermediate ("layer 2 d1[0]"), if any.
  std::optional<std::string> first_non_finite() const;

 private:
  struct LayerRecord {
    Eigen::MatrixXd in_deriv;   // in x (streams-1)*n, blocks: d1[0..K), then d2 for second-order dirs
    Eigen::MatrixXd pre_deriv;
    Eigen::MatrixXd out;        // layer output value; the next layer's input value
  };
  struct Chunk {
    Eigen::Index begin = 0;
    Eigen::Index size = 0;
    Eigen::MatrixXd input;  // in x n
    std::vector<LayerRecord> layers;
    const Eigen::MatrixXd& in_value(std::size_t l) const { return l == 0 ? input : layers[l - 1].out; }
  };

  void forward_chunk(Chunk& chunk, const Eigen::MatrixXd& inputs);
  void backward_chunk(const Chunk& chunk, const JetBlock& seeds, MlpGradient& grad) const;

  const MlpParams& params_;
  std::vector<JetDirection> directions_;
  std::vector<Eigen::Index> second_slot_;  // derivative-block index of d2 for direction k, or -1
  Eigen::Index deriv_blocks_ = 0;
  std::vector<Chunk> chunks_;
  JetBlock output_;
};

}  // namespace pip2::diffcore
