#include "pip2/operator_models/model.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "pip2/common/errors.hpp"

namespace pip2::operator_models {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::deeponet: return "DeepONet";
    case Variant::pi_deeponet: return "PI-DeepONet";
    case Variant::pou_deeponet: return "POU-DeepONet";
    case Variant::pip2net: return "PIP2Net";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  std::string key;
  for (char ch : s)
    if (ch != '-' && ch != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (key == "deeponet") return Variant::deeponet;
  if (key == "pideeponet") return Variant::pi_deeponet;
  if (key == "poudeeponet") return Variant::pou_deeponet;
  if (key == "pip2net") return Variant::pip2net;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

std::string to_string(PenaltyMode m) {
  return m == PenaltyMode::value_sum ? "value_sum" : "magnitude_sum";
}

PenaltyMode parse_penalty_mode(std::string_view s) {
  if (s == "value_sum") return PenaltyMode::value_sum;
  if (s == "magnitude_sum") return PenaltyMode::magnitude_sum;
  throw ConfigError("unknown penalty mode '" + std::string(s) + "'");
}

bool physics_informed(Variant v) { return v == Variant::pi_deeponet || v == Variant::pip2net; }

void OperatorModel::validate() const {
  branch.validate();
  trunk.validate();
  if (branch.output_width() != trunk.output_width())
    throw ConfigError("branch output width " + std::to_string(branch.output_width()) +
                      " != trunk output width " + std::to_string(trunk.output_width()));
  if (trunk.input_width() != 2) throw ConfigError("trunk input must be the (x, t) coordinate");
  if (!std::isfinite(br0) || !std::isfinite(c.value))
    throw NumericalError("model scalars are not finite");
}

std::size_t OperatorModel::parameter_count() const {
  return branch.parameter_count() + trunk.parameter_count() + 1 + (c.learnable ? 1 : 0);
}

std::vector<double> OperatorModel::flatten() const {
  std::vector<double> flat(parameter_count());
  std::span<double> s(flat);
  branch.flatten_into(s.subspan(0, branch.parameter_count()));
  trunk.flatten_into(s.subspan(branch.parameter_count(), trunk.parameter_count()));
  std::size_t k = branch.parameter_count() + trunk.parameter_count();
  flat[k++] = br0;
  if (c.learnable) flat[k] = c.value;
  return flat;
}

void OperatorModel::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw ConfigError("assign: wrong parameter count");
  branch.assign_from(flat.subspan(0, branch.parameter_count()));
  trunk.assign_from(flat.subspan(branch.parameter_count(), trunk.parameter_count()));
  std::size_t k = branch.parameter_count() + trunk.parameter_count();
  br0 = flat[k++];
  if (c.learnable) c.value = flat[k];
}

OperatorModel OperatorModel::initialize(std::span<const int> branch_widths,
                                        std::span<const int> trunk_widths, Variant variant,
                                        PenaltyMode penalty_mode, CMode c, bool hard_normalize,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OperatorModel m;
  m.branch = diffcore::MlpParams::glorot(branch_widths, rng);
  m.trunk = diffcore::MlpParams::glorot(trunk_widths, rng);
  m.variant = variant;
  m.penalty_mode = penalty_mode;
  m.c = c;
  m.hard_normalize = hard_normalize;
  m.validate();
  return m;
}

ModelGradient ModelGradient::zeros(const OperatorModel& model) {
  return {model.branch.zero_gradient(), model.trunk.zero_gradient(), 0.0, 0.0};
}

std::vector<double> ModelGradient::flatten(const OperatorModel& model) const {
  std::vector<double> flat(model.parameter_count());
  std::span<double> s(flat);
  const auto nb = diffcore::gradient_size(branch);
  const auto nt = diffcore::gradient_size(trunk);
  if (nb != model.branch.parameter_count() || nt != model.trunk.parameter_count())
    throw ConfigError("gradient shape does not match model");
  diffcore::flatten_gradient(branch, s.subspan(0, nb));
  diffcore::flatten_gradient(trunk, s.subspan(nb, nt));
  flat[nb + nt] = br0;
  if (model.c.learnable) flat[nb + nt + 1] = c;
  return flat;
}

void LossWeights::validate_for(Variant v) const {
  for (double w : {w_data, w_physics, w_bc, lambda_p2})
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("loss weights must be finite and >= 0");
  switch (v) {
    case Variant::deeponet:
      if (w_physics != 0.0 || w_bc != 0.0 || lambda_p2 != 0.0)
        throw ConfigError("DeepONet is trained on data only: w_physics, w_bc, lambda_p2 must be 0");
      break;
    case Variant::pou_deeponet:
      if (w_physics != 0.0 || w_bc != 0.0 || lambda_p2 != 0.0)
        throw ConfigError("POU-DeepONet is trained on data only: w_physics, w_bc, lambda_p2 must be 0");
      break;
    case Variant::pi_deeponet:
      if (lambda_p2 != 0.0) throw ConfigError("PI-DeepONet has no partition penalty: lambda_p2 must be 0");
      break;
    case Variant::pip2net:
      break;
  }
}

LossWeights LossWeights::scaled(double f) const {
  return {w_data * f, w_physics * f, w_bc * f, lambda_p2 * f};
}

std::string to_string(PdeKind k) {
  switch (k) {
    case PdeKind::burgers: return "burgers";
    case PdeKind::allen_cahn: return "allen_cahn";
    case PdeKind::diffusion_reaction: return "diffusion_reaction";
  }
  return "?";
}

PdeKind parse_pde_kind(std::string_view s) {
  if (s == "burgers") return PdeKind::burgers;
  if (s == "allen_cahn") return PdeKind::allen_cahn;
  if (s == "diffusion_reaction") return PdeKind::diffusion_reaction;
  throw ConfigError("unknown pde kind '" + std::string(s) + "'");
}

PdeSpec PdeSpec::burgers(double nu) {
  PdeSpec s;
  s.kind = PdeKind::burgers;
  s.bc = BoundaryKind::periodic;
  s.nu = nu;
  s.x_lo = 0.0;
  s.x_hi = 1.0;
  s.T = 1.0;
  return s;
}

PdeSpec PdeSpec::allen_cahn(double eps2_min, double eps2_max) {
  PdeSpec s;
  s.kind = PdeKind::allen_cahn;
  s.bc = BoundaryKind::dirichlet_zero;
  s.eps2_min = eps2_min;
  s.eps2_max = eps2_max;
  s.x_lo = -std::numbers::pi;
  s.x_hi = std::numbers::pi;
  s.T = 1.0;
  return s;
}

PdeSpec PdeSpec::diffusion_reaction(double D, double k) {
  PdeSpec s;
  s.kind = PdeKind::diffusion_reaction;
  s.bc = BoundaryKind::dirichlet_zero;
  s.D = D;
  s.k = k;
  s.x_lo = 0.0;
  s.x_hi = 1.0;
  s.T = 1.0;
  return s;
}

void PdeSpec::validate() const {
  if (!(x_hi > x_lo) || !(T > 0.0)) throw ConfigError("pde domain must have x_hi > x_lo and T > 0");
  switch (kind) {
    case PdeKind::burgers:
      if (!(nu > 0.0)) throw ConfigError("burgers: nu must be > 0");
      break;
    case PdeKind::allen_cahn:
      if (!(eps2_min > 0.0) || !(eps2_max >= eps2_min))
        throw ConfigError("allen_cahn: need 0 < eps2_min <= eps2_max");
      break;
    case PdeKind::diffusion_reaction:
      if (!(D > 0.0) || !std::isfinite(k)) throw ConfigError("diffusion_reaction: need D > 0 and finite k");
      break;
  }
}

}  // namespace pip2::operator_models
