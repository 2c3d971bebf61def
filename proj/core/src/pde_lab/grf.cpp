#include "pip2/pde_lab/grf.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>


#include "pip2/common/errors.hpp"
#include "pde_lab/fft.hpp"

namespace pip2::pde_lab {

void GrfSpec::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("GRF sigma must be positive");
  if (kind == GrfKind::matern) {
    if (!(tau > 0.0)) throw ConfigError("Matern GRF tau must be positive");
    if (!(gamma > 0.5)) throw ConfigError("Matern GRF gamma must exceed 1/2");
  } else if (!(length_scale > 0.0)) {
    throw ConfigError("RBF GRF length scale must be positive");
  }
}

namespace {

void check_matern(const GrfSpec& spec, const Grid1D& grid) {
  spec.validate();
  grid.validate();
  if (spec.kind != GrfKind::matern) throw ConfigError("sample_grf_matern needs a Matern spec");
  if (!grid.periodic) throw ConfigError("Matern spectral synthesis needs a periodic grid");
}

double mode_scale(const GrfSpec& spec, double L, int k) {
  const double lam = std::pow(2.0 * std::numbers::pi * k / L, 2);
  return spec.sigma * std::pow(lam + spec.tau * spec.tau, -spec.gamma / 2.0);
}

int highest_mode(int n) { return (n - 1) / 2; }

}  // namespace

Eigen::VectorXd sample_grf_matern(const GrfSpec& spec, const Grid1D& grid, std::uint64_t seed) {
  check_matern(spec, grid);
  const int n = grid.n;
  const double L = grid.length();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  std::vector<std::complex<double>> spec_c(static_cast<std::size_t>(n / 2 + 1), {0.0, 0.0});
  spec_c[0] = {normal(rng) * mode_scale(spec, L, 0) / std::sqrt(L), 0.0};
  const double amp = std::sqrt(2.0 / L) / 2.0;
  for (int k = 1; k <= highest_mode(n); ++k) {
    const double a = normal(rng);
    const double b = normal(rng);
    const double s = mode_scale(spec, L, k) * amp;
    spec_c[static_cast<std::size_t>(k)] = {a * s, -b * s};
  }

  Eigen::VectorXd out(n);
  detail::RealFft(n).inverse(spec_c.data(), out.data());
  return out;
}

double matern_variance(const GrfSpec& spec, const Grid1D& grid) {
  check_matern(spec, grid);
  const double L = grid.length();
  double v = std::pow(mode_scale(spec, L, 0), 2) / L;
  for (int k = 1; k <= highest_mode(grid.n); ++k) v += std::pow(mode_scale(spec, L, k), 2) * 2.0 / L;
  return v;
}

RbfSampler::RbfSampler(const GrfSpec& spec, const Grid1D& grid) {
  spec.validate();
  grid.validate();
  if (spec.kind != GrfKind::rbf) throw ConfigError("RbfSampler needs an RBF spec");
  const Eigen::VectorXd x = grid.points();
  const int n = grid.n;
  const double s2 = spec.sigma * spec.sigma;
  kernel_.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = (x(i) - x(j)) / spec.length_scale;
      kernel_(i, j) = s2 * std::exp(-0.5 * r * r);
    }
  for (double jitter = 1e-10 * s2; jitter <= 1e-6 * s2 * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd k = kernel_;
    k.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  throw NumericalError("RBF kernel factorization failed with jitter up to 1e-6 sigma^2");
}

Eigen::VectorXd RbfSampler::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(factor_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return factor_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_grf_rbf(const GrfSpec& spec, const Grid1D& grid, std::uint64_t seed) {
  return RbfSampler(spec, grid).sample(seed);
}

}  // namespace pip2::pde_lab
