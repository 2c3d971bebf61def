#include "pip2/operator_models/losses.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "pip2/common/errors.hpp"
#include "pip2/common/log.hpp"
#include "pip2/diffcore/jet_tape.hpp"
#include "pip2/diffcore/normalized_exp.hpp"
#include "pip2/operator_models/loss_context.hpp"

namespace pip2::operator_models {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::atomic<bool> g_clamp_warned{false};

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

MatrixXd kappa_matrix(const std::vector<SampleCollocation>& samples) {
  if (samples.empty()) throw ConfigError("collocation batch has no samples");
  MatrixXd k(samples.front().kappa.size(), static_cast<Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].kappa.size() != k.rows()) throw ConfigError("batch samples differ in branch input length");
    k.col(static_cast<Index>(i)) = samples[i].kappa;
  }
  return k;
}

struct Residual {
  double r = 0.0;
  double du = 0.0, dux = 0.0, duxx = 0.0;  // partials; d/du_t is 1 for every kind
};

Residual residual_terms(const PdeSpec& spec, const Eigen::Ref<const VectorXd>& kappa, double x, double u,
                        double ux, double uxx, double ut) {
  Residual out;
  switch (spec.kind) {
    case PdeKind::burgers: {
      const double nu2 = spec.nu * spec.nu;
      out.r = ut + u * ux - nu2 * uxx;
      out.du = ux;
      out.dux = u;
      out.duxx = -nu2;
      break;
    }
    case PdeKind::allen_cahn: {
      const double inv = 1.0 / kappa(kappa.size() - 1);
      out.r = ut - uxx + inv * (u * u * u - u);
      out.du = inv * (3.0 * u * u - 1.0);
      out.duxx = -1.0;
      break;
    }
    case PdeKind::diffusion_reaction: {
      out.r = ut - spec.D * uxx - spec.k * u * u - interpolate_source(kappa, spec, x);
      out.du = -2.0 * spec.k * u;
      out.duxx = -spec.D;
      break;
    }
  }
  return out;
}

// Seeds scaled by `scale`; nothing is seeded when scale == 0.

double head_data(PointBlock& blk, const VectorXd& labels, double scale) {
  const Index n = blk.pairs();
  if (n == 0) throw ConfigError("data loss over an empty point set");
  const VectorXd err = blk.u - labels;
  const double loss = err.squaredNorm() / static_cast<double>(n);
  if (scale != 0.0) {
    blk.u_bar += (2.0 * scale / static_cast<double>(n)) * err;
    blk.seeded = true;
  }
  return loss;
}

// Per segment: first half of the columns at x_lo, second half at x_hi, same times.
double head_bc_periodic(PointBlock& blk, double scale) {
  Index total = 0;
  for (const auto& s : blk.segments) total += (s.end - s.begin) / 2;
  if (total == 0) throw ConfigError("boundary loss over an empty time set");
  double value_sum = 0.0;
  double deriv_sum = 0.0;
  const double w = 2.0 * scale / static_cast<double>(total);
  Index pos = 0;
  for (const auto& s : blk.segments) {
    const Index half = (s.end - s.begin) / 2;
    for (Index j = 0; j < half; ++j) {
      const Index lo = pos + j;
      const Index hi = pos + half + j;
      const double dv = blk.u(lo) - blk.u(hi);
      const double dd = blk.ux(lo) - blk.ux(hi);
      value_sum += dv * dv;
      deriv_sum += dd * dd;
      if (scale != 0.0) {
        blk.u_bar(lo) += w * dv;
        blk.u_bar(hi) -= w * dv;
        blk.ux_bar(lo) += w * dd;
        blk.ux_bar(hi) -= w * dd;
      }
    }
    pos += s.end - s.begin;
  }
  if (scale != 0.0) blk.seeded = true;
  return value_sum / static_cast<double>(total) + deriv_sum / static_cast<double>(total);
}

double head_bc_dirichlet(PointBlock& blk, double scale) {
  Index total = 0;
  for (const auto& s : blk.segments) total += (s.end - s.begin) / 2;
  if (total == 0) throw ConfigError("boundary loss over an empty time set");
  const double loss = blk.u.squaredNorm() / static_cast<double>(total);
  if (scale != 0.0) {
    blk.u_bar += (2.0 * scale / static_cast<double>(total)) * blk.u;
    blk.seeded = true;
  }
  return loss;
}

double head_physics(PointBlock& blk, const LossContext& ctx, const PdeSpec& spec, double scale) {
  const Index n = blk.pairs();
  if (n == 0) throw ConfigError("physics loss over an empty residual set");
  const double w = 2.0 * scale / static_cast<double>(n);
  double sum = 0.0;
  Index pos = 0;
  for (const auto& s : blk.segments) {
    const auto kappa = ctx.kappas().col(s.sample);
    for (Index c = s.begin; c < s.end; ++c, ++pos) {
      const Residual res = residual_terms(spec, kappa, blk.coords(0, c), blk.u(pos), blk.ux(pos),
                                          blk.uxx(pos), blk.ut(pos));
      const double r = res.r;
      sum += r * r;
      if (scale != 0.0) {
        const double rb = w * r;
        blk.u_bar(pos) += rb * res.du;
        blk.ux_bar(pos) += rb * res.dux;
        blk.uxx_bar(pos) += rb * res.duxx;
        blk.ut_bar(pos) += rb;
      }
    }
  }
  if (scale != 0.0) blk.seeded = true;
  return sum / static_cast<double>(n);
}

double head_penalty(PointBlock& blk, LossContext& ctx, PenaltyMode mode, double c, bool learnable,
                    double scale) {
  const MatrixXd& F = blk.features.value;
  const Index n = F.cols();
  if (n == 0) throw ConfigError("partition penalty over an empty point set");
  const VectorXd S = mode == PenaltyMode::value_sum ? VectorXd(F.colwise().sum().transpose())
                                                    : VectorXd(F.cwiseAbs().colwise().sum().transpose());
  const VectorXd dev = S.array() - c;
  const double loss = dev.squaredNorm() / static_cast<double>(n);
  if (scale != 0.0) {
    const VectorXd g = (2.0 * scale / static_cast<double>(n)) * dev;
    if (mode == PenaltyMode::value_sum) {
      blk.feature_bar.rowwise() += g.transpose();
    } else {
      blk.feature_bar += (F.unaryExpr(&sign0).array().rowwise() * g.transpose().array()).matrix();
    }
    if (learnable) ctx.c_bar() -= g.sum();
    blk.seeded = true;
  }
  return loss;
}

Eigen::Matrix2Xd boundary_coords(const PdeSpec& spec, const VectorXd& times) {
  const Index P = times.size();
  Eigen::Matrix2Xd c(2, 2 * P);
  for (Index j = 0; j < P; ++j) {
    c.col(j) << spec.x_lo, times(j);
    c.col(P + j) << spec.x_hi, times(j);
  }
  return c;
}

LossBreakdown evaluate(const OperatorModel& model, const PdeSpec& spec, const CollocationBatch& batch,
                       const LossWeights& weights, ModelGradient* grad) {
  weights.validate_for(model.variant);
  LossContext ctx(model, kappa_matrix(batch.samples));
  const bool want = grad != nullptr;
  const auto scale = [&](double w) { return want ? w : 0.0; };

  std::vector<Eigen::Matrix2Xd> data_c, bc_c, res_c;
  Index n_data = 0, n_bc = 0, n_res = 0;
  for (const auto& s : batch.samples) {
    if (s.data_labels.size() != s.data_coords.cols())
      throw ConfigError("data labels and coordinates differ in length");
    data_c.push_back(s.data_coords);
    bc_c.push_back(boundary_coords(spec, s.bc_times));
    res_c.push_back(s.residual_coords);
    n_data += s.data_coords.cols();
    n_bc += s.bc_times.size();
    n_res += s.residual_coords.cols();
  }

  LossBreakdown out;
  if (n_data > 0) {
    VectorXd labels(n_data);
    Index pos = 0;
    for (const auto& s : batch.samples) {
      labels.segment(pos, s.data_labels.size()) = s.data_labels;
      pos += s.data_labels.size();
    }
    auto& blk = ctx.block(ctx.add_per_sample(data_c, JetLevel::value));
    out.data = head_data(blk, labels, scale(weights.w_data));
  } else if (weights.w_data != 0.0) {
    throw ConfigError("w_data > 0 but the batch has no data points");
  }

  if (n_bc > 0) {
    const bool periodic = spec.bc == BoundaryKind::periodic;
    auto& blk = ctx.block(ctx.add_per_sample(bc_c, periodic ? JetLevel::dx : JetLevel::value));
    out.bc = periodic ? head_bc_periodic(blk, scale(weights.w_bc)) : head_bc_dirichlet(blk, scale(weights.w_bc));
  } else if (weights.w_bc != 0.0) {
    throw ConfigError("w_bc > 0 but the batch has no boundary times");
  }

  if (n_res > 0) {
    auto& blk = ctx.block(ctx.add_per_sample(res_c, JetLevel::full));
    out.physics = head_physics(blk, ctx, spec, scale(weights.w_physics));
    out.penalty = head_penalty(blk, ctx, model.penalty_mode, model.c.value, model.c.learnable,
                               scale(weights.lambda_p2));
  } else if (weights.w_physics != 0.0 || weights.lambda_p2 != 0.0) {
    throw ConfigError("physics or penalty weight > 0 but the batch has no residual points");
  }

  out.total = weights.w_data * out.data + weights.w_physics * out.physics + weights.w_bc * out.bc +
              weights.lambda_p2 * out.penalty;

  if (!std::isfinite(out.total)) {
    std::ostringstream msg;
    msg << "loss is not finite (data=" << out.data << ", physics=" << out.physics << ", bc=" << out.bc
        << ", penalty=" << out.penalty << ")";
    if (auto where = ctx.first_non_finite()) msg << "; first non-finite intermediate: " << *where;
    throw NumericalError(msg.str());
  }
  if (want) *grad = ctx.backward();
  return out;
}

}  // namespace

double interpolate_source(const Eigen::Ref<const VectorXd>& kappa, const PdeSpec& spec, double x) {
  const Index m = kappa.size();
  if (m < 2) throw ConfigError("source interpolation needs at least two sensors");
  const double h = (spec.x_hi - spec.x_lo) / static_cast<double>(m - 1);
  double xi = (x - spec.x_lo) / h;
  if (xi < -1e-9 || xi > static_cast<double>(m - 1) + 1e-9) {
    if (!g_clamp_warned.exchange(true))
      log::warn("source interpolation outside sensor range; clamping (reported once)");
  }
  xi = std::clamp(xi, 0.0, static_cast<double>(m - 1));
  const Index i = std::min<Index>(static_cast<Index>(std::floor(xi)), m - 2);
  const double w = xi - static_cast<double>(i);
  if (w == 0.0) return kappa(i);
  return (1.0 - w) * kappa(i) + w * kappa(i + 1);
}

VectorXd trunk_features(const OperatorModel& model, const Coord& x) {
  model.validate();
  const MatrixXd in = x;
  diffcore::JetTape tape(model.trunk, in, {});
  if (!model.hard_normalize) return tape.output().value.col(0);
  return diffcore::normalized_exp(tape.output()).value.col(0);
}

double deeponet_eval(const OperatorModel& model, const VectorXd& kappa, const Coord& x) {
  const MatrixXd k = kappa;
  const Eigen::Matrix2Xd c = x;
  return predict(model, k, c)(0, 0);
}

MatrixXd predict(const OperatorModel& model, const MatrixXd& kappas, const Eigen::Matrix2Xd& coords) {
  LossContext ctx(model, kappas);
  std::vector<Segment> segs;
  for (Index s = 0; s < kappas.cols(); ++s) segs.push_back({s, 0, coords.cols()});
  const auto& blk = ctx.block(ctx.add_block(coords, std::move(segs), JetLevel::value));
  MatrixXd out(kappas.cols(), coords.cols());
  for (Index s = 0; s < kappas.cols(); ++s) out.row(s) = blk.u.segment(s * coords.cols(), coords.cols()).transpose();
  return out;
}

double data_loss(const OperatorModel& model, std::span<const SampleData> samples) {
  if (samples.empty()) throw ConfigError("data loss needs at least one sample");
  MatrixXd k(samples.front().kappa.size(), static_cast<Index>(samples.size()));
  std::vector<Eigen::Matrix2Xd> coords;
  Index n = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    k.col(static_cast<Index>(i)) = samples[i].kappa;
    coords.push_back(samples[i].coords);
    if (samples[i].labels.size() != samples[i].coords.cols())
      throw ConfigError("data labels and coordinates differ in length");
    n += samples[i].labels.size();
  }
  if (n == 0) throw ConfigError("data loss needs at least one point");
  VectorXd labels(n);
  Index pos = 0;
  for (const auto& s : samples) {
    labels.segment(pos, s.labels.size()) = s.labels;
    pos += s.labels.size();
  }
  LossContext ctx(model, k);
  auto& blk = ctx.block(ctx.add_per_sample(coords, JetLevel::value));
  return head_data(blk, labels, 0.0);
}

double bc_loss_periodic(const OperatorModel& model, const PdeSpec& spec, const VectorXd& kappa,
                        std::span<const double> times) {
  if (times.empty()) throw ConfigError("boundary loss needs at least one time");
  const MatrixXd k = kappa;
  LossContext ctx(model, k);
  const VectorXd t = Eigen::Map<const VectorXd>(times.data(), static_cast<Index>(times.size()));
  auto& blk = ctx.block(ctx.add_per_sample({boundary_coords(spec, t)}, JetLevel::dx));
  return head_bc_periodic(blk, 0.0);
}

double bc_loss_dirichlet(const OperatorModel& model, const PdeSpec& spec, const VectorXd& kappa,
                         std::span<const double> times) {
  if (times.empty()) throw ConfigError("boundary loss needs at least one time");
  const MatrixXd k = kappa;
  LossContext ctx(model, k);
  const VectorXd t = Eigen::Map<const VectorXd>(times.data(), static_cast<Index>(times.size()));
  auto& blk = ctx.block(ctx.add_per_sample({boundary_coords(spec, t)}, JetLevel::value));
  return head_bc_dirichlet(blk, 0.0);
}

double pde_residual(const OperatorModel& model, const PdeSpec& spec, const VectorXd& kappa, double x,
                    double t) {
  const MatrixXd k = kappa;
  LossContext ctx(model, k);
  const Eigen::Matrix2Xd c = Coord(x, t);
  const auto& blk = ctx.block(ctx.add_per_sample({c}, JetLevel::full));
  return residual_terms(spec, ctx.kappas().col(0), x, blk.u(0), blk.ux(0), blk.uxx(0), blk.ut(0)).r;
}

double physics_loss(const OperatorModel& model, const PdeSpec& spec, const CollocationBatch& batch) {
  LossContext ctx(model, kappa_matrix(batch.samples));
  std::vector<Eigen::Matrix2Xd> coords;
  for (const auto& s : batch.samples) coords.push_back(s.residual_coords);
  auto& blk = ctx.block(ctx.add_per_sample(coords, JetLevel::full));
  return head_physics(blk, ctx, spec, 0.0);
}

double partition_penalty(const OperatorModel& model, const Eigen::Matrix2Xd& points, PenaltyMode mode,
                         double c) {
  if (points.cols() == 0) throw ConfigError("partition penalty needs at least one point");
  if (!std::isfinite(c)) throw ConfigError("partition penalty: c must be finite");
  const MatrixXd k = MatrixXd::Zero(model.branch.input_width(), 1);
  LossContext ctx(model, k);
  auto& blk = ctx.block(ctx.add_block(points, {}, JetLevel::value));
  return head_penalty(blk, ctx, mode, c, false, 0.0);
}

LossBreakdown total_loss(const OperatorModel& model, const PdeSpec& spec, const CollocationBatch& batch,
                         const LossWeights& weights) {
  return evaluate(model, spec, batch, weights, nullptr);
}

LossBreakdown total_loss_and_grad(const OperatorModel& model, const PdeSpec& spec,
                                  const CollocationBatch& batch, const LossWeights& weights,
                                  ModelGradient& grad) {
  return evaluate(model, spec, batch, weights, &grad);
}

}  // namespace pip2::operator_models
