#include "pip2/operator_models/loss_context.hpp"

#include "pip2/common/errors.hpp"
#include "pip2/diffcore/normalized_exp.hpp"

namespace pip2::operator_models {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<diffcore::JetDirection> directions_for(JetLevel level) {
  const VectorXd ex = Eigen::Vector2d(1.0, 0.0);
  const VectorXd et = Eigen::Vector2d(0.0, 1.0);
  switch (level) {
    case JetLevel::value: return {};
    case JetLevel::dx: return {{ex, false}};
    case JetLevel::full: return {{ex, true}, {et, false}};
  }
  return {};
}

}  // namespace

LossContext::LossContext(const OperatorModel& model, const MatrixXd& kappas)
    : model_(model), kappas_(kappas) {
  model_.validate();
  if (kappas_.rows() != model_.branch.input_width())
    throw ConfigError("branch input has " + std::to_string(kappas_.rows()) + " entries, network expects " +
                      std::to_string(model_.branch.input_width()));
  branch_tape_ = std::make_unique<diffcore::JetTape>(model_.branch, kappas_,
                                                     std::vector<diffcore::JetDirection>{});
  branch_out_ = branch_tape_->output().value;
}

std::size_t LossContext::add_block(Eigen::Matrix2Xd coords, std::vector<Segment> segments,
                                   JetLevel level) {
  auto blk = std::make_unique<PointBlock>();
  blk->coords = std::move(coords);
  blk->segments = std::move(segments);
  blk->level = level;

  Index pairs = 0;
  for (const auto& s : blk->segments) {
    if (s.sample < 0 || s.sample >= samples() || s.begin < 0 || s.end < s.begin ||
        s.end > blk->coords.cols())
      throw ConfigError("point block segment out of range");
    pairs += s.end - s.begin;
  }

  const MatrixXd in = blk->coords;
  blk->tape = std::make_unique<diffcore::JetTape>(model_.trunk, in, directions_for(level));
  blk->features = model_.hard_normalize ? diffcore::normalized_exp(blk->tape->output())
                                        : blk->tape->output();

  const auto& F = blk->features;
  const bool has_dx = level != JetLevel::value;
  const bool has_full = level == JetLevel::full;
  blk->u.resize(pairs);
  blk->ux.resize(has_dx ? pairs : 0);
  blk->uxx.resize(has_full ? pairs : 0);
  blk->ut.resize(has_full ? pairs : 0);
  Index pos = 0;
  for (const auto& s : blk->segments) {
    const Index len = s.end - s.begin;
    const auto b = branch_out_.col(s.sample);
    blk->u.segment(pos, len).noalias() = F.value.middleCols(s.begin, len).transpose() * b;
    blk->u.segment(pos, len).array() += model_.br0;
    if (has_dx) blk->ux.segment(pos, len).noalias() = F.d1[0].middleCols(s.begin, len).transpose() * b;
    if (has_full) {
      blk->uxx.segment(pos, len).noalias() = F.d2[0].middleCols(s.begin, len).transpose() * b;
      blk->ut.segment(pos, len).noalias() = F.d1[1].middleCols(s.begin, len).transpose() * b;
    }
    pos += len;
  }
  blk->u_bar = VectorXd::Zero(blk->u.size());
  blk->ux_bar = VectorXd::Zero(blk->ux.size());
  blk->uxx_bar = VectorXd::Zero(blk->uxx.size());
  blk->ut_bar = VectorXd::Zero(blk->ut.size());
  blk->feature_bar = MatrixXd::Zero(F.value.rows(), F.value.cols());

  blocks_.push_back(std::move(blk));
  return blocks_.size() - 1;
}

std::size_t LossContext::add_per_sample(const std::vector<Eigen::Matrix2Xd>& coords, JetLevel level) {
  if (static_cast<Index>(coords.size()) != samples())
    throw ConfigError("add_per_sample: one coordinate set per sample required");
  bool shared = !coords.empty();
  for (std::size_t i = 1; i < coords.size() && shared; ++i)
    shared = coords[i].cols() == coords[0].cols() && coords[i] == coords[0];

  std::vector<Segment> segs;
  if (shared) {
    for (Index s = 0; s < samples(); ++s) segs.push_back({s, 0, coords[0].cols()});
    return add_block(coords[0], std::move(segs), level);
  }
  Index total = 0;
  for (const auto& c : coords) total += c.cols();
  Eigen::Matrix2Xd all(2, total);
  Index pos = 0;
  for (Index s = 0; s < samples(); ++s) {
    const auto& c = coords[static_cast<std::size_t>(s)];
    all.middleCols(pos, c.cols()) = c;
    segs.push_back({s, pos, pos + c.cols()});
    pos += c.cols();
  }
  return add_block(std::move(all), std::move(segs), level);
}

ModelGradient LossContext::backward() const {
  ModelGradient grad = ModelGradient::zeros(model_);
  MatrixXd branch_bar = MatrixXd::Zero(branch_out_.rows(), branch_out_.cols());
  bool branch_seeded = false;
  grad.br0 = br0_bar_;
  grad.c = c_bar_;

  for (const auto& blk : blocks_) {
    if (!blk->seeded) continue;
    const auto& F = blk->features;
    diffcore::JetBlock fbar = diffcore::JetBlock::zeros_like(F);
    fbar.value += blk->feature_bar;
    const bool has_dx = blk->level != JetLevel::value;
    const bool has_full = blk->level == JetLevel::full;

    Index pos = 0;
    for (const auto& s : blk->segments) {
      const Index len = s.end - s.begin;
      const auto b = branch_out_.col(s.sample);
      auto bbar = branch_bar.col(s.sample);
      const auto pull = [&](const MatrixXd& stream, MatrixXd& stream_bar, const VectorXd& ybar) {
        const auto yb = ybar.segment(pos, len);
        stream_bar.middleCols(s.begin, len).noalias() += b * yb.transpose();
        bbar.noalias() += stream.middleCols(s.begin, len) * yb;
      };
      pull(F.value, fbar.value, blk->u_bar);
      if (has_dx) pull(F.d1[0], fbar.d1[0], blk->ux_bar);
      if (has_full) {
        pull(F.d2[0], fbar.d2[0], blk->uxx_bar);
        pull(F.d1[1], fbar.d1[1], blk->ut_bar);
      }
      pos += len;
    }
    grad.br0 += blk->u_bar.sum();
    branch_seeded = true;

    const diffcore::JetBlock seeds =
        model_.hard_normalize
            ? diffcore::normalized_exp_backward(blk->tape->output(), blk->features, fbar)
            : fbar;
    diffcore::accumulate(grad.trunk, blk->tape->backward(seeds));
  }
  if (branch_seeded) {
    diffcore::JetBlock bseeds;
    bseeds.value = std::move(branch_bar);
    grad.branch = branch_tape_->backward(bseeds);
  }
  return grad;
}

std::optional<std::string> LossContext::first_non_finite() const {
  if (auto where = branch_tape_->first_non_finite()) return "branch " + *where;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (auto where = blocks_[i]->tape->first_non_finite())
      return "trunk (point set " + std::to_string(i) + ") " + *where;
    const auto& F = blocks_[i]->features;
    if (!F.value.allFinite()) return "normalized trunk features (point set " + std::to_string(i) + ")";
  }
  return std::nullopt;
}

}  // namespace pip2::operator_models
