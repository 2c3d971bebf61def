#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "pip2/pde_lab/field.hpp"

namespace pip2::pde_lab {

enum class GrfKind { matern, rbf };

/// Zero-mean Gaussian random field: covariance sigma^2 (-Laplacian + tau^2)^(-gamma) for
/// matern, sigma^2 exp(-|x1 - x2|^2 / (2 l^2)) for rbf.
struct GrfSpec {
  GrfKind kind = GrfKind::matern;
  double sigma = 1.0;
  double tau = 1.0;
  double gamma = 1.0;
  double length_scale = 0.2;

  static GrfSpec matern(double sigma, double tau, double gamma) { return {GrfKind::matern, sigma, tau, gamma, 0.2}; }
  static GrfSpec rbf(double sigma, double length_scale) { return {GrfKind::rbf, sigma, 1.0, 1.0, length_scale}; }
  void validate() const;
};

/// One draw by real spectral synthesis on a periodic grid. The basis is L2-orthonormal on
/// the domain; mode k gets an independent N(0,1) coefficient times sigma (lambda_k + tau^2)^(-gamma/2).
/// Modes above n/2 - 1 are not used.
Eigen::VectorXd sample_grf_matern(const GrfSpec& spec, const Grid1D& grid, std::uint64_t seed);

/// Pointwise variance of sample_grf_matern on `grid` (the same at every node).
double matern_variance(const GrfSpec& spec, const Grid1D& grid);

/// Cholesky sampler for the rbf kernel; factor once, draw many.
class RbfSampler {
 public:
  RbfSampler(const GrfSpec& spec, const Grid1D& grid);

  Eigen::VectorXd sample(std::uint64_t seed) const;
  /// Kernel matrix before jitter.
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  /// Diagonal jitter that made the factorization succeed.
  double jitter() const { return jitter_; }

 private:
  Eigen::MatrixXd kernel_;
  Eigen::MatrixXd factor_;  // lower triangular
  double jitter_ = 0.0;
};

Eigen::VectorXd sample_grf_rbf(const GrfSpec& spec, const Grid1D& grid, std::uint64_t seed);

}  // namespace pip2::pde_lab
