#include "pip2/diffcore/normalized_exp.hpp"

namespace pip2::diffcore {

namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;

// Column sums broadcast back to the full shape.
ArrayXXd colsum(const ArrayXXd& a) {
  return a.colwise().sum().replicate(a.rows(), 1);
}

const MatrixXd& seed_or(const std::vector<MatrixXd>& v, std::size_t k, const MatrixXd& zero) {
  return (k < v.size() && v[k].size() > 0) ? v[k] : zero;
}

}  // namespace

JetBlock normalized_exp(const JetBlock& logits) {
  JetBlock out;
  const ArrayXXd shifted =
      logits.value.array() - logits.value.colwise().maxCoeff().replicate(logits.value.rows(), 1).array();
  const ArrayXXd e = shifted.exp();
  const ArrayXXd s = e / colsum(e);
  out.value = s.matrix();
  for (std::size_t k = 0; k < logits.d1.size(); ++k) {
    const ArrayXXd z1 = logits.d1[k].array();
    const ArrayXXd e1 = z1 - colsum(s * z1);
    const ArrayXXd s1 = s * e1;
    out.d1.push_back(s1.matrix());
    if (k < logits.d2.size() && logits.d2[k].size() > 0) {
      const ArrayXXd z2 = logits.d2[k].array();
      const ArrayXXd e2 = z2 - colsum(s1 * z1 + s * z2);
      out.d2.push_back((s1 * e1 + s * e2).matrix());
    } else {
      out.d2.emplace_back();
    }
  }
  return out;
}

JetBlock normalized_exp_backward(const JetBlock& logits, const JetBlock& features,
                                 const JetBlock& seeds) {
  const MatrixXd zero = MatrixXd::Zero(features.value.rows(), features.value.cols());
  const ArrayXXd s = features.value.array();
  ArrayXXd sbar = (seeds.value.size() > 0 ? seeds.value : zero).array();

  JetBlock out;
  out.d1.resize(logits.d1.size());
  out.d2.resize(logits.d1.size());
  for (std::size_t k = 0; k < logits.d1.size(); ++k) {
    const ArrayXXd z1 = logits.d1[k].array();
    const ArrayXXd e1 = z1 - colsum(s * z1);
    const ArrayXXd s1 = features.d1[k].array();
    ArrayXXd s1bar = seed_or(seeds.d1, k, zero).array();
    ArrayXXd z1bar = ArrayXXd::Zero(s.rows(), s.cols());
    ArrayXXd e1bar = ArrayXXd::Zero(s.rows(), s.cols());

    const bool second = k < logits.d2.size() && logits.d2[k].size() > 0;
    if (second) {
      const ArrayXXd z2 = logits.d2[k].array();
      const ArrayXXd e2 = z2 - colsum(s1 * z1 + s * z2);
      const ArrayXXd s2bar = seed_or(seeds.d2, k, zero).array();
      // s2 = s1*e1 + s*e2
      s1bar += s2bar * e1;
      e1bar += s2bar * s1;
      sbar += s2bar * e2;
      const ArrayXXd e2bar = s2bar * s;
      // e2 = z2 - sum(s1*z1 + s*z2)
      ArrayXXd z2bar = e2bar;
      const ArrayXXd m2bar = -colsum(e2bar);
      s1bar += m2bar * z1;
      z1bar += m2bar * s1;
      sbar += m2bar * z2;
      z2bar += m2bar * s;
      out.d2[k] = z2bar.matrix();
    }
    // s1 = s*e1
    sbar += s1bar * e1;
    e1bar += s1bar * s;
    // e1 = z1 - sum(s*z1)
    z1bar += e1bar;
    const ArrayXXd m1bar = -colsum(e1bar);
    sbar += m1bar * z1;
    z1bar += m1bar * s;
    out.d1[k] = z1bar.matrix();
  }
  out.value = (s * (sbar - colsum(s * sbar))).matrix();
  return out;
}

}  // namespace pip2::diffcore
