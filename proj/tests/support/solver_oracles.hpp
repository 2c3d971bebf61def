#pragma once

// Shared numerical oracles for the solver and sampler checks (unit and acceptance suites).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pip2/common/errors.hpp"
#include "pip2/pde_lab/allen_cahn.hpp"
#include "pip2/pde_lab/burgers.hpp"
#include "pip2/pde_lab/diffusion_reaction.hpp"
#include "pip2/pde_lab/grf.hpp"

namespace pip2::testing {

struct MaternMonteCarlo {
  std::vector<int> nodes;
  std::vector<double> means, stds, variances, variance_se;
  double analytic = 0.0;
};

// Empirical mean, variance and the variance's standard error at five nodes.
inline MaternMonteCarlo matern_monte_carlo(const pde_lab::GrfSpec& spec, const pde_lab::Grid1D& grid, int draws,
                                           std::uint64_t seed0) {
  MaternMonteCarlo r;
  r.nodes = {0, grid.n / 5, 2 * grid.n / 5, 3 * grid.n / 5, grid.n - 1};
  const std::size_t P = r.nodes.size();
  std::vector<double> s1(P, 0.0), s2(P, 0.0), s4(P, 0.0);
  for (int d = 0; d < draws; ++d) {
    const auto u = pde_lab::sample_grf_matern(spec, grid, seed0 + static_cast<std::uint64_t>(d));
    for (std::size_t p = 0; p < P; ++p) {
      const double v = u(r.nodes[p]);
      s1[p] += v;
      s2[p] += v * v;
      s4[p] += v * v * v * v;
    }
  }
  const double N = draws;
  for (std::size_t p = 0; p < P; ++p) {
    const double mean = s1[p] / N;
    const double m2 = s2[p] / N;  // zero-mean variance estimator
    const double var_of_sq = s4[p] / N - m2 * m2;
    r.means.push_back(mean);
    r.stds.push_back(std::sqrt(m2 - mean * mean));
    r.variances.push_back(m2);
    r.variance_se.push_back(std::sqrt(var_of_sq / N));
  }
  r.analytic = pde_lab::matern_variance(spec, grid);
  return r;
}

struct CovarianceMonteCarlo {
  double estimate = 0.0;
  double standard_error = 0.0;
  double expected = 0.0;
};

inline CovarianceMonteCarlo rbf_covariance_monte_carlo(const pde_lab::GrfSpec& spec, const pde_lab::Grid1D& grid,
                                                       int i, int j, int draws, std::uint64_t seed0) {
  const pde_lab::RbfSampler sampler(spec, grid);
  double s = 0.0, s2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto u = sampler.sample(seed0 + static_cast<std::uint64_t>(d));
    const double p = u(i) * u(j);
    s += p;
    s2 += p * p;
  }
  CovarianceMonteCarlo r;
  r.estimate = s / draws;
  r.standard_error = std::sqrt((s2 / draws - r.estimate * r.estimate) / draws);
  const double dist = (grid.point(j) - grid.point(i)) / spec.length_scale;
  r.expected = spec.sigma * spec.sigma * std::exp(-0.5 * dist * dist);
  return r;
}

struct BurgersChecks {
  double mass_drift = 0.0;        // max over output times, relative to 1 + |mass(0)|
  double self_convergence = 0.0;  // n = 128 vs n = 256, relative L2 over the space-time grid
};

inline BurgersChecks burgers_checks(const pde_lab::GrfSpec& spec, double nu, double T, std::uint64_t seed) {
  const auto g128 = pde_lab::Grid1D::periodic_grid(128, 0.0, 1.0);
  const auto u0 = pde_lab::sample_grf_matern(spec, g128, seed);
  const auto a = pde_lab::solve_burgers(u0, g128, nu, T, 101);
  const auto b = pde_lab::solve_burgers(pde_lab::spectral_resample(u0, 256),
                                        pde_lab::Grid1D::periodic_grid(256, 0.0, 1.0), nu, T, 101);
  BurgersChecks r;
  const double dx = g128.spacing();
  const double m0 = a.values.col(0).sum() * dx;
  for (Eigen::Index j = 0; j < a.values.cols(); ++j)
    r.mass_drift = std::max(r.mass_drift, std::abs(a.values.col(j).sum() * dx - m0) / (1.0 + std::abs(m0)));
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < a.values.cols(); ++j)
    for (Eigen::Index i = 0; i < 128; ++i) {
      const double d = a.values(i, j) - b.values(2 * i, j);
      num += d * d;
      den += b.values(2 * i, j) * b.values(2 * i, j);
    }
  r.self_convergence = std::sqrt(num / den);
  return r;
}

struct EnergySweep {
  int runs = 0;
  long steps_checked = 0;
  long violations = 0;
  double worst_relative_increase = -1.0;
};

// Solves the standard Allen-Cahn setup for `runs` random eps^2 in [0.1, 0.5] and checks
// E^{n+1} <= E^n + 1e-12 |E^n| at every step directly from the recorded energies.
inline EnergySweep allen_cahn_energy_sweep(int runs, std::uint64_t seed) {
  const auto grid = pde_lab::Grid1D::closed(100, -std::numbers::pi, std::numbers::pi);
  const auto u0 = pde_lab::allen_cahn_initial(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps2(0.1, 0.5);
  EnergySweep r;
  for (int k = 0; k < runs; ++k) {
    const double e2 = eps2(rng);
    std::vector<double> energy;
    try {
      energy = pde_lab::solve_allen_cahn(u0, e2, grid, 1.0, 101).energy;
    } catch (const NumericalError&) {
      ++r.violations;
      continue;
    }
    ++r.runs;
    for (std::size_t s = 1; s < energy.size(); ++s) {
      ++r.steps_checked;
      const double inc = (energy[s] - energy[s - 1]) / std::abs(energy[s - 1]);
      r.worst_relative_increase = std::max(r.worst_relative_increase, inc);
      if (energy[s] > energy[s - 1] + 1e-12 * std::abs(energy[s - 1])) ++r.violations;
    }
  }
  return r;
}

struct Manufactured {
  double error_coarse = 0.0;
  double error_fine = 0.0;
  double ratio = 0.0;
};

// s = t sin(pi x) with source s_t - D s_xx - k s^2, on n x n and (2n) x (2n) grids.
inline Manufactured diffusion_reaction_manufactured(double D, double k, int n = 100) {
  const double pi = std::numbers::pi;
  auto source = [=](double x, double t) {
    const double s = std::sin(pi * x);
    return s * (1.0 + D * pi * pi * t) - k * t * t * s * s;
  };
  auto error = [&](int m) {
    const auto grid = pde_lab::Grid1D::closed(m, 0.0, 1.0);
    const auto f = pde_lab::solve_diffusion_reaction(source, grid, D, k, 1.0, m);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double exact = f.tgrid.point(j) * std::sin(pi * grid.point(i));
        num += std::pow(f.values(i, j) - exact, 2);
        den += exact * exact;
      }
    return std::sqrt(num / den);
  };
  Manufactured r;
  r.error_coarse = error(n);
  r.error_fine = error(2 * n);
  r.ratio = r.error_coarse / r.error_fine;
  return r;
}

}  // namespace pip2::testing
