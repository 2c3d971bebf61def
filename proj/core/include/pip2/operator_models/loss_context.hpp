#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pip2/diffcore/jet_tape.hpp"
#include "pip2/operator_models/model.hpp"

namespace pip2::operator_models {

/// Which derivative streams of G are carried at a point set.
enum class JetLevel {
  value,  // G
  dx,     // G, G_x
  full,   // G, G_x, G_xx, G_t
};

/// Maps a run of trunk columns to the input function (branch column) evaluated there.
struct Segment {
  Eigen::Index sample = 0;
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
};

/// Trunk jets at one point set and the model output at every (sample, point) pair.
///
/// Pairs are ordered segment by segment. Adjoint seeds accumulate in the *_bar members
/// and are pulled back by LossContext::backward.
struct PointBlock {
  Eigen::Matrix2Xd coords;
  std::vector<Segment> segments;
  JetLevel level = JetLevel::value;

  std::unique_ptr<diffcore::JetTape> tape;
  diffcore::JetBlock features;  // trunk features (normalized when the model requires it)

  Eigen::VectorXd u, ux, uxx, ut;  // per pair; derivative streams sized 0 when not carried
  Eigen::VectorXd u_bar, ux_bar, uxx_bar, ut_bar;
  Eigen::MatrixXd feature_bar;  // direct seeds on feature values (p x columns)
  bool seeded = false;

  Eigen::Index pairs() const { return u.size(); }
};

/// One forward pass of an operator model over a set of input functions and point sets,
/// with reverse-mode accumulation of parameter gradients from seeds placed by loss heads.
/// The model must outlive the context.
class LossContext {
 public:
  /// `kappas` holds one branch input per column.
  LossContext(const OperatorModel& model, const Eigen::MatrixXd& kappas);

  const OperatorModel& model() const { return model_; }
  const Eigen::MatrixXd& kappas() const { return kappas_; }
  const Eigen::MatrixXd& branch_out() const { return branch_out_; }
  Eigen::Index samples() const { return kappas_.cols(); }

  /// Adds a point set with explicit segments and evaluates model outputs.
  std::size_t add_block(Eigen::Matrix2Xd coords, std::vector<Segment> segments, JetLevel level);

  /// Adds per-sample point sets. When every sample uses identical coordinates the trunk is
  /// evaluated once and shared; pairs are ordered sample by sample either way.
  std::size_t add_per_sample(const std::vector<Eigen::Matrix2Xd>& coords, JetLevel level);

  PointBlock& block(std::size_t i) { return *blocks_[i]; }
  const PointBlock& block(std::size_t i) const { return *blocks_[i]; }
  std::size_t block_count() const { return blocks_.size(); }

  double& br0_bar() { return br0_bar_; }
  double& c_bar() { return c_bar_; }

  /// Gradient of sum(seed * quantity) over every seeded quantity.
  ModelGradient backward() const;

  /// Names the first non-finite intermediate in the branch or any trunk block.
  std::optional<std::string> first_non_finite() const;

 private:
  const OperatorModel& model_;
  Eigen::MatrixXd kappas_;
  std::unique_ptr<diffcore::JetTape> branch_tape_;
  Eigen::MatrixXd branch_out_;
  std::vector<std::unique_ptr<PointBlock>> blocks_;
  double br0_bar_ = 0.0;
  double c_bar_ = 0.0;
};

}  // namespace pip2::operator_models
