#pragma once

#include <random>

#include "pip2/harness/config.hpp"
#include "pip2/operator_models/losses.hpp"
#include "pip2/pde_lab/field.hpp"

namespace pip2::harness {

/// One training input function with its reference solution.
struct TrainingSample {
  Eigen::VectorXd kappa;
  pde_lab::SpaceTimeField field;
};

/// Labels for the data term: the initial condition at the sensors for physics-informed
/// variants, `labels_per_iteration()` nodes of a `data_lattice`^2 sub-lattice of the solution
/// grid (drawn with replacement) for data-only variants.
///
/// Boundary times: P uniform draws on [0, T]. Residual points: Q uniform draws over the box;
/// for diffusion-reaction the x coordinate is a uniformly chosen spatial grid node.
operator_models::SampleCollocation sample_collocation(const ExperimentConfig& config,
                                                      const TrainingSample& sample,
                                                      std::mt19937_64& rng);

/// Node indices of an evenly spread sub-lattice of `count` points out of `n`.
std::vector<int> lattice_indices(int n, int count);

}  // namespace pip2::harness
