#include "pip2/harness/collocation.hpp"

#include <algorithm>
#include <cmath>

namespace pip2::harness {

using operator_models::PdeKind;

std::vector<int> lattice_indices(int n, int count) {
  count = std::min(count, n);
  std::vector<int> idx(static_cast<std::size_t>(count));
  if (count == 1) {
    idx[0] = 0;
    return idx;
  }
  for (int i = 0; i < count; ++i)
    idx[static_cast<std::size_t>(i)] =
        static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (count - 1)));
  return idx;
}

operator_models::SampleCollocation sample_collocation(const ExperimentConfig& config,
                                                      const TrainingSample& sample,
                                                      std::mt19937_64& rng) {
  const auto& pde = config.pde;
  const auto& f = sample.field;
  operator_models::SampleCollocation out;
  out.kappa = sample.kappa;

  if (operator_models::physics_informed(config.variant)) {
    const int n = f.xgrid.n;
    out.data_coords.resize(2, n);
    out.data_labels.resize(n);
    for (int i = 0; i < n; ++i) {
      out.data_coords.col(i) << f.xgrid.point(i), f.tgrid.point(0);
      out.data_labels(i) = f.values(i, 0);
    }
  } else {
    const auto ix = lattice_indices(f.xgrid.n, config.data_lattice);
    const auto it = lattice_indices(f.tgrid.n, config.data_lattice);
    const int n = config.labels_per_iteration();
    std::uniform_int_distribution<std::size_t> pick_x(0, ix.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_t(0, it.size() - 1);
    out.data_coords.resize(2, n);
    out.data_labels.resize(n);
    for (int k = 0; k < n; ++k) {
      const int i = ix[pick_x(rng)];
      const int j = it[pick_t(rng)];
      out.data_coords.col(k) << f.xgrid.point(i), f.tgrid.point(j);
      out.data_labels(k) = f.values(i, j);
    }
  }

  std::uniform_real_distribution<double> ut(0.0, pde.T);
  std::uniform_real_distribution<double> ux(pde.x_lo, pde.x_hi);
  out.bc_times.resize(config.P);
  for (int k = 0; k < config.P; ++k) out.bc_times(k) = ut(rng);

  out.residual_coords.resize(2, config.Q);
  if (pde.kind == PdeKind::diffusion_reaction) {
    // x_{r,j} = x_j: grid nodes in order, spread evenly when Q != n.
    const long n = f.xgrid.n;
    for (int k = 0; k < config.Q; ++k) {
      const double x = f.xgrid.point(static_cast<int>(k * n / config.Q));
      out.residual_coords.col(k) << x, ut(rng);
    }
  } else {
    for (int k = 0; k < config.Q; ++k) {
      const double x = ux(rng);
      out.residual_coords.col(k) << x, ut(rng);
    }
  }
  return out;
}

}  // namespace pip2::harness
