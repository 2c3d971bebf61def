#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pip2/operator_models/model.hpp"

namespace pip2::operator_models {

/// Space-time coordinate (x, t).
using Coord = Eigen::Vector2d;

/// Labeled observations of one input function.
struct SampleData {
  Eigen::VectorXd kappa;
  Eigen::Matrix2Xd coords;
  Eigen::VectorXd labels;
};

/// Everything one training iteration needs from one input function.
struct SampleCollocation {
  Eigen::VectorXd kappa;
  Eigen::Matrix2Xd data_coords;
  Eigen::VectorXd data_labels;
  Eigen::VectorXd bc_times;
  Eigen::Matrix2Xd residual_coords;
};

struct CollocationBatch {
  std::vector<SampleCollocation> samples;
};

/// Unweighted terms plus the weighted total.
struct LossBreakdown {
  double total = 0.0;
  double data = 0.0;
  double physics = 0.0;
  double bc = 0.0;
  double penalty = 0.0;
};

Eigen::VectorXd trunk_features(const OperatorModel& model, const Coord& x);
double deeponet_eval(const OperatorModel& model, const Eigen::VectorXd& kappa, const Coord& x);

/// Predictions for every (input function, point): result is samples x points.
Eigen::MatrixXd predict(const OperatorModel& model, const Eigen::MatrixXd& kappas,
                        const Eigen::Matrix2Xd& coords);

/// Mean squared error over every (sample, point) pair. Throws on an empty set.
double data_loss(const OperatorModel& model, std::span<const SampleData> samples);

/// mean_t |G(x_lo,t) - G(x_hi,t)|^2 + mean_t |G_x(x_lo,t) - G_x(x_hi,t)|^2
double bc_loss_periodic(const OperatorModel& model, const PdeSpec& spec,
                        const Eigen::VectorXd& kappa, std::span<const double> times);
/// mean_t |G(x_lo,t)|^2 + |G(x_hi,t)|^2
double bc_loss_dirichlet(const OperatorModel& model, const PdeSpec& spec,
                         const Eigen::VectorXd& kappa, std::span<const double> times);

/// Strong-form residual of the governing equation at (x, t).
///   burgers:            u_t + u u_x - nu^2 u_xx
///   allen_cahn:         u_t - u_xx + (u^3 - u) / eps^2, eps^2 = kappa(last)
///   diffusion_reaction: s_t - D s_xx - k s^2 - f(x), f interpolated from kappa
double pde_residual(const OperatorModel& model, const PdeSpec& spec, const Eigen::VectorXd& kappa,
                    double x, double t);

double physics_loss(const OperatorModel& model, const PdeSpec& spec, const CollocationBatch& batch);

/// mean over points of (S(x) - c)^2, S = sum of trunk features or of their magnitudes.
double partition_penalty(const OperatorModel& model, const Eigen::Matrix2Xd& points,
                         PenaltyMode mode, double c);

/// Weighted sum of all four terms; the penalty is evaluated at the residual points.
LossBreakdown total_loss(const OperatorModel& model, const PdeSpec& spec,
                         const CollocationBatch& batch, const LossWeights& weights);

/// As total_loss, also writing the exact gradient of the weighted total into `grad`.
/// Throws NumericalError naming the first non-finite intermediate when the loss is not finite.
LossBreakdown total_loss_and_grad(const OperatorModel& model, const PdeSpec& spec,
                                  const CollocationBatch& batch, const LossWeights& weights,
                                  ModelGradient& grad);

/// Source term of the diffusion-reaction problem: linear interpolation of kappa sampled at
/// equidistant sensors spanning [x_lo, x_hi]. Out-of-range x is clamped with a warning.
double interpolate_source(const Eigen::Ref<const Eigen::VectorXd>& kappa, const PdeSpec& spec, double x);

}  // namespace pip2::operator_models
