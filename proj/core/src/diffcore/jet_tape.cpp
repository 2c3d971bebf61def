#include "pip2/diffcore/jet_tape.hpp"

#include <string>

#include "pip2/common/errors.hpp"
#include "pip2/common/parallel.hpp"
#include "pip2/diffcore/tanh.hpp"

namespace pip2::diffcore {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

bool all_finite(const MatrixXd& m) { return m.size() == 0 || m.allFinite(); }

}  // namespace

JetBlock JetBlock::zeros_like(const JetBlock& like) {
  JetBlock z;
  z.value = MatrixXd::Zero(like.value.rows(), like.value.cols());
  for (const auto& m : like.d1) z.d1.push_back(MatrixXd::Zero(m.rows(), m.cols()));
  for (const auto& m : like.d2) z.d2.push_back(MatrixXd::Zero(m.rows(), m.cols()));
  return z;
}

JetTape::JetTape(const MlpParams& params, const MatrixXd& inputs,
                 std::vector<JetDirection> directions)
    : params_(params), directions_(std::move(directions)) {
  params_.validate();
  if (inputs.rows() != params_.input_width())
    throw ConfigError("jet forward: input has " + std::to_string(inputs.rows()) +
                      " rows, network expects " + std::to_string(params_.input_width()));
  const auto K = static_cast<Index>(directions_.size());
  deriv_blocks_ = K;
  second_slot_.assign(directions_.size(), -1);
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    if (directions_[k].dir.size() != inputs.rows())
      throw ConfigError("jet forward: direction length does not match input width");
    if (directions_[k].second_order) second_slot_[k] = deriv_blocks_++;
  }

  const Index n = inputs.cols();
  const Index out_w = params_.output_width();
  output_.value.resize(out_w, n);
  output_.d1.assign(directions_.size(), MatrixXd(out_w, n));
  output_.d2.clear();
  for (std::size_t k = 0; k < directions_.size(); ++k)
    output_.d2.push_back(directions_[k].second_order ? MatrixXd(out_w, n) : MatrixXd());

  for (Index b = 0; b < n; b += kChunk) chunks_.push_back({b, std::min(kChunk, n - b), {}, {}});
  parallel_for(chunks_.size(), [&](std::size_t i) { forward_chunk(chunks_[i], inputs); });
}

void JetTape::forward_chunk(Chunk& chunk, const MatrixXd& inputs) {
  const Index n = chunk.size;
  const Index in_w = inputs.rows();
  chunk.input = inputs.middleCols(chunk.begin, n);
  MatrixXd a_der = MatrixXd::Zero(in_w, deriv_blocks_ * n);
  for (std::size_t k = 0; k < directions_.size(); ++k)
    a_der.middleCols(static_cast<Index>(k) * n, n).colwise() = directions_[k].dir;

  const auto& layers = params_.layers();
  chunk.layers.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& W = layers[l].weight;
    LayerRecord& rec = chunk.layers[l];
    rec.in_deriv = std::move(a_der);
    rec.out.noalias() = W * chunk.in_value(l);
    rec.out.colwise() += layers[l].bias;
    if (deriv_blocks_ > 0) {
      rec.pre_deriv.noalias() = W * rec.in_deriv;
    } else {
      rec.pre_deriv.resize(W.rows(), 0);
    }

    if (params_.activation(l) == Activation::identity) {
      a_der = rec.pre_deriv;
      continue;
    }
    tanh_into(rec.out, rec.out);
    const auto s = rec.out.array();
    const auto sp = (1.0 - s.square()).eval();
    const auto spp = (-2.0 * s * sp).eval();
    a_der.resize(W.rows(), deriv_blocks_ * n);
    for (std::size_t k = 0; k < directions_.size(); ++k) {
      const Index b1 = static_cast<Index>(k) * n;
      const auto z1 = rec.pre_deriv.middleCols(b1, n).array();
      a_der.middleCols(b1, n).array() = sp * z1;
      if (second_slot_[k] >= 0) {
        const Index b2 = second_slot_[k] * n;
        const auto z2 = rec.pre_deriv.middleCols(b2, n).array();
        a_der.middleCols(b2, n).array() = spp * z1.square() + sp * z2;
      }
    }
  }
  const MatrixXd& a_val = chunk.layers.back().out;

  auto& out = output_;
  out.value.middleCols(chunk.begin, n) = a_val;
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    out.d1[k].middleCols(chunk.begin, n) = a_der.middleCols(static_cast<Index>(k) * n, n);
    if (second_slot_[k] >= 0)
      out.d2[k].middleCols(chunk.begin, n) = a_der.middleCols(second_slot_[k] * n, n);
  }
}

MlpGradient JetTape::backward(const JetBlock& seeds) const {
  std::vector<MlpGradient> partial(chunks_.size());
  parallel_for(chunks_.size(), [&](std::size_t i) {
    partial[i] = params_.zero_gradient();
    backward_chunk(chunks_[i], seeds, partial[i]);
  });
  MlpGradient grad = params_.zero_gradient();
  for (const auto& g : partial) accumulate(grad, g);
  return grad;
}

void JetTape::backward_chunk(const Chunk& chunk, const JetBlock& seeds, MlpGradient& grad) const {
  const Index n = chunk.size;
  const Index out_w = params_.output_width();
  const auto take = [&](const MatrixXd& m) -> MatrixXd {
    if (m.size() == 0) return MatrixXd::Zero(out_w, n);
    if (m.rows() != out_w || m.cols() != points())
      throw ConfigError("jet backward: seed shape does not match tape output");
    return m.middleCols(chunk.begin, n);
  };

  MatrixXd g_val = take(seeds.value);
  MatrixXd g_der(out_w, deriv_blocks_ * n);
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    g_der.middleCols(static_cast<Index>(k) * n, n) =
        k < seeds.d1.size() ? take(seeds.d1[k]) : MatrixXd::Zero(out_w, n);
    if (second_slot_[k] >= 0)
      g_der.middleCols(second_slot_[k] * n, n) =
          k < seeds.d2.size() ? take(seeds.d2[k]) : MatrixXd::Zero(out_w, n);
  }

  const auto& layers = params_.layers();
  for (std::size_t li = layers.size(); li-- > 0;) {
    const LayerRecord& rec = chunk.layers[li];
    MatrixXd zbar_val;
    MatrixXd zbar_der;
    if (params_.activation(li) == Activation::identity) {
      zbar_val = std::move(g_val);
      zbar_der = std::move(g_der);
    } else {
      const auto s = rec.out.array();
      const auto sp = (1.0 - s.square()).eval();
      const auto spp = (-2.0 * s * sp).eval();
      const auto sppp = (-2.0 * sp.square() + 4.0 * s.square() * sp).eval();
      zbar_val = (g_val.array() * sp).matrix();
      zbar_der.resize(g_der.rows(), g_der.cols());
      for (std::size_t k = 0; k < directions_.size(); ++k) {
        const Index b1 = static_cast<Index>(k) * n;
        const auto z1 = rec.pre_deriv.middleCols(b1, n).array();
        const auto g1 = g_der.middleCols(b1, n).array();
        zbar_der.middleCols(b1, n).array() = g1 * sp;
        zbar_val.array() += g1 * spp * z1;
        if (second_slot_[k] >= 0) {
          const Index b2 = second_slot_[k] * n;
          const auto z2 = rec.pre_deriv.middleCols(b2, n).array();
          const auto g2 = g_der.middleCols(b2, n).array();
          zbar_der.middleCols(b2, n).array() = g2 * sp;
          zbar_der.middleCols(b1, n).array() += 2.0 * g2 * spp * z1;
          zbar_val.array() += g2 * (sppp * z1.square() + spp * z2);
        }
      }
    }

    const auto& W = layers[li].weight;
    grad[li].weight.noalias() += zbar_val * chunk.in_value(li).transpose();
    // One product per stream: Eigen's blocking is several times slower at inner sizes 2n, 3n.
    for (Index b = 0; b < deriv_blocks_; ++b)
      grad[li].weight.noalias() += zbar_der.middleCols(b * n, n) * rec.in_deriv.middleCols(b * n, n).transpose();
    grad[li].bias += zbar_val.rowwise().sum();
    if (li > 0) {
      g_val.noalias() = W.transpose() * zbar_val;
      if (deriv_blocks_ > 0) {
        g_der.noalias() = W.transpose() * zbar_der;
      } else {
        g_der.resize(W.cols(), 0);
      }
    }
  }
}

std::optional<std::string> JetTape::first_non_finite() const {
  for (const auto& chunk : chunks_) {
    for (std::size_t l = 0; l < chunk.layers.size(); ++l) {
      const auto& rec = chunk.layers[l];
      if (!all_finite(rec.out)) return "layer " + std::to_string(l) + " value";
      const Index n = chunk.size;
      for (std::size_t k = 0; k < directions_.size(); ++k) {
        if (!all_finite(rec.pre_deriv.middleCols(static_cast<Index>(k) * n, n)))
          return "layer " + std::to_string(l) + " d1[" + std::to_string(k) + "]";
        if (second_slot_[k] >= 0 && !all_finite(rec.pre_deriv.middleCols(second_slot_[k] * n, n)))
          return "layer " + std::to_string(l) + " d2[" + std::to_string(k) + "]";
      }
    }
  }
  return std::nullopt;
}

}  // namespace pip2::diffcore
