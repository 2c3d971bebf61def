#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pip2/diffcore/mlp.hpp"

namespace pip2::operator_models {

/// The four model families compared in the experiments.
enum class Variant { deeponet, pi_deeponet, pou_deeponet, pip2net };

enum class PenaltyMode { value_sum, magnitude_sum };

/// Normalization target of the partition penalty: a fixed constant or a trained scalar.
struct CMode {
  bool learnable = false;
  double value = 1.0;
};

std::string to_string(Variant v);
Variant parse_variant(std::string_view s);
std::string to_string(PenaltyMode m);
PenaltyMode parse_penalty_mode(std::string_view s);

/// True for variants trained with residual and boundary losses.
bool physics_informed(Variant v);

/// Branch/trunk operator network: G(kappa)(x) = sum_k br_k(kappa) tr_k(x) + br0.
struct OperatorModel {
  diffcore::MlpParams branch;
  diffcore::MlpParams trunk;
  double br0 = 0.0;
  Variant variant = Variant::pip2net;
  PenaltyMode penalty_mode = PenaltyMode::magnitude_sum;
  CMode c;
  bool hard_normalize = false;

  /// Basis size p.
  int basis_size() const { return trunk.output_width(); }
  void validate() const;

  /// Flat order: branch, trunk, br0, then c when learnable.
  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  /// Glorot-uniform branch then trunk from one stream seeded with `seed`; br0 = 0.
  static OperatorModel initialize(std::span<const int> branch_widths,
                                  std::span<const int> trunk_widths, Variant variant,
                                  PenaltyMode penalty_mode, CMode c, bool hard_normalize,
                                  std::uint64_t seed);
};

struct ModelGradient {
  diffcore::MlpGradient branch;
  diffcore::MlpGradient trunk;
  double br0 = 0.0;
  double c = 0.0;

  static ModelGradient zeros(const OperatorModel& model);
  /// Same order as OperatorModel::flatten.
  std::vector<double> flatten(const OperatorModel& model) const;
};

/// Weights of the data, residual, boundary and partition-penalty terms.
struct LossWeights {
  double w_data = 1.0;
  double w_physics = 0.0;
  double w_bc = 0.0;
  double lambda_p2 = 0.0;

  /// Throws ConfigError when the weights contradict the variant's definition.
  void validate_for(Variant v) const;
  LossWeights scaled(double factor) const;
};

enum class PdeKind { burgers, allen_cahn, diffusion_reaction };
enum class BoundaryKind { periodic, dirichlet_zero };

std::string to_string(PdeKind k);
PdeKind parse_pde_kind(std::string_view s);

/// Governing equation, boundary type and space-time box.
///
/// Allen-Cahn carries the sampling range of eps^2; the per-sample value travels as the
/// last entry of the branch input.
struct PdeSpec {
  PdeKind kind = PdeKind::burgers;
  BoundaryKind bc = BoundaryKind::periodic;
  double nu = 0.01;
  double eps2_min = 0.1;
  double eps2_max = 0.5;
  double D = 0.01;
  double k = 0.01;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double T = 1.0;

  static PdeSpec burgers(double nu);
  static PdeSpec allen_cahn(double eps2_min, double eps2_max);
  static PdeSpec diffusion_reaction(double D, double k);
  void validate() const;
};

}  // namespace pip2::operator_models
