#include "pip2/pde_lab/diffusion_reaction.hpp"

#include <cmath>
#include <string>

#include "pip2/common/errors.hpp"
#include "pip2/pde_lab/allen_cahn.hpp"

namespace pip2::pde_lab {

SpaceTimeField solve_diffusion_reaction(const std::function<double(double, double)>& source, const Grid1D& grid,
                                        double D, double k, double T, int n_t) {
  grid.validate();
  if (grid.periodic) throw ConfigError("diffusion-reaction solver needs a closed grid");
  if (grid.n < 3) throw ConfigError("diffusion-reaction grid needs an interior point");
  if (!(D > 0.0) || !(T > 0.0) || n_t < 2 || !std::isfinite(k))
    throw ConfigError("diffusion-reaction: need D > 0, finite k, T > 0, n_t >= 2");

  const int n = grid.n;
  const int m = n - 2;
  const double dt = T / (n_t - 1);
  const double dx = grid.spacing();
  const double r = 0.5 * dt * D / (dx * dx);
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(m, -r);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(m, -r);
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(m, 1.0 + 2.0 * r);
  const Eigen::VectorXd x = grid.points();

  SpaceTimeField out;
  out.xgrid = grid;
  out.tgrid = Grid1D::closed(n_t, 0.0, T);
  out.values = Eigen::MatrixXd::Zero(n, n_t);

  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd explicit_part(m), f(m), pred(m), corr(m);
  for (int j = 1; j < n_t; ++j) {
    const double t_half = (j - 0.5) * dt;
    for (int i = 0; i < m; ++i) {
      const double si = s(i + 1);
      explicit_part(i) = si + r * (s(i) - 2.0 * si + s(i + 2));
      f(i) = source(x(i + 1), t_half);
    }
    for (int i = 0; i < m; ++i) pred(i) = explicit_part(i) + dt * (k * s(i + 1) * s(i + 1) + f(i));
    solve_tridiagonal(lower, diag, upper, pred);
    for (int i = 0; i < m; ++i)
      corr(i) = explicit_part(i) + dt * (k * 0.5 * (s(i + 1) * s(i + 1) + pred(i) * pred(i)) + f(i));
    solve_tridiagonal(lower, diag, upper, corr);
    const double change = (corr - pred).norm();
    const double scale = corr.norm();
    if (!corr.allFinite() || (scale > 0.0 && change > 0.1 * scale))
      throw NumericalError("diffusion-reaction fixed-point correction diverged at step " + std::to_string(j));
    s.segment(1, m) = corr;
    out.values.col(j) = s;
  }
  return out;
}

SpaceTimeField solve_diffusion_reaction(const Eigen::VectorXd& u_src, const Grid1D& grid, double D, double k,
                                        double T, int n_t) {
  if (u_src.size() != grid.n) throw ConfigError("diffusion-reaction source does not match the grid");
  if (!u_src.allFinite()) throw ConfigError("diffusion-reaction source is not finite");
  const double lo = grid.x_lo;
  const double h = grid.spacing();
  // Grid nodes are the only evaluation points, so the lookup is exact.
  return solve_diffusion_reaction(
      [&](double x, double) {
        const auto i = static_cast<Eigen::Index>(std::lround((x - lo) / h));
        return u_src(i);
      },
      grid, D, k, T, n_t);
}

}  // namespace pip2::pde_lab
