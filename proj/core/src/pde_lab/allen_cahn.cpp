#include "pip2/pde_lab/allen_cahn.hpp"

#include <cmath>
#include <string>

#include "pip2/common/errors.hpp"

namespace pip2::pde_lab {

void solve_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag, const Eigen::VectorXd& upper,
                       Eigen::VectorXd& d) {
  const Eigen::Index n = diag.size();
  if (d.size() != n || lower.size() != n || upper.size() != n)
    throw ConfigError("solve_tridiagonal: inconsistent sizes");
  Eigen::VectorXd c(n);
  double beta = diag(0);
  if (beta == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
  c(0) = upper(0) / beta;
  d(0) /= beta;
  for (Eigen::Index i = 1; i < n; ++i) {
    beta = diag(i) - lower(i) * c(i - 1);
    if (beta == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    c(i) = upper(i) / beta;
    d(i) = (d(i) - lower(i) * d(i - 1)) / beta;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
}

double allen_cahn_energy(const Eigen::VectorXd& u, const Grid1D& grid, double eps2) {
  const double dx = grid.spacing();
  const Eigen::Index n = u.size();
  double grad = 0.0, pot = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d = (u(i + 1) - u(i)) / dx;
    grad += 0.5 * d * d;
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double w = u(i) * u(i) - 1.0;
    pot += 0.25 * w * w;
  }
  return (grad + pot / eps2) * dx;
}

Eigen::VectorXd allen_cahn_initial(const Grid1D& grid) {
  Eigen::VectorXd u = 0.2 * grid.points().array().sin();
  u(0) = 0.0;
  u(grid.n - 1) = 0.0;
  return u;
}

AllenCahnSolution solve_allen_cahn(const Eigen::VectorXd& u0, double eps2, const Grid1D& grid, double T,
                                   int n_t, const AllenCahnOptions& options) {
  grid.validate();
  if (grid.periodic) throw ConfigError("Allen-Cahn solver needs a closed grid");
  if (grid.n < 3) throw ConfigError("Allen-Cahn grid needs an interior point");
  if (u0.size() != grid.n) throw ConfigError("Allen-Cahn initial condition does not match the grid");
  if (!(eps2 > 0.0) || !(T > 0.0) || n_t < 2 || options.steps < 1)
    throw ConfigError("Allen-Cahn: need eps2 > 0, T > 0, n_t >= 2, steps >= 1");
  if (options.steps % (n_t - 1) != 0)
    throw ConfigError("Allen-Cahn: steps must be a multiple of n_t - 1");

  const int n = grid.n;
  const int m = n - 2;
  const double dt = T / options.steps;
  const double dx = grid.spacing();
  const double S = 2.0 / eps2;
  const double off = -dt / (dx * dx);
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(m, off);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(m, off);
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(m, 1.0 + dt * S - 2.0 * off);

  AllenCahnSolution sol;
  sol.field.xgrid = grid;
  sol.field.tgrid = Grid1D::closed(n_t, 0.0, T);
  sol.field.values.resize(n, n_t);
  Eigen::VectorXd u = u0;
  u(0) = 0.0;
  u(n - 1) = 0.0;
  sol.field.values.col(0) = u;
  sol.energy.reserve(static_cast<std::size_t>(options.steps) + 1);
  sol.energy.push_back(allen_cahn_energy(u, grid, eps2));

  const int stride = options.steps / (n_t - 1);
  Eigen::VectorXd rhs(m);
  for (int step = 1; step <= options.steps; ++step) {
    for (int i = 0; i < m; ++i) {
      const double ui = u(i + 1);
      rhs(i) = ui + dt * (S * ui - double_well_derivative(ui) / eps2);
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    u.segment(1, m) = rhs;
    if (!u.allFinite()) throw NumericalError("Allen-Cahn solution is not finite at step " + std::to_string(step));
    const double e = allen_cahn_energy(u, grid, eps2);
    const double prev = sol.energy.back();
    if (e > prev + 1e-12 * std::abs(prev))
      throw NumericalError("Allen-Cahn energy increased at step " + std::to_string(step));
    sol.energy.push_back(e);
    if (step % stride == 0) sol.field.values.col(step / stride) = u;
  }
  return sol;
}

}  // namespace pip2::pde_lab
