#include "pip2/pde_lab/burgers.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "pde_lab/fft.hpp"
#include "pip2/common/errors.hpp"

namespace pip2::pde_lab {

namespace {

using cplx = std::complex<double>;

struct EtdCoefficients {
  std::vector<double> E, E2, Q, f1, f2, f3;
};

// Contour-integral evaluation of the ETDRK4 phi-functions for a diagonal real operator.
EtdCoefficients etd_coefficients(const std::vector<double>& L, double h, int M) {
  const std::size_t K = L.size();
  EtdCoefficients c;
  for (auto* v : {&c.E, &c.E2, &c.Q, &c.f1, &c.f2, &c.f3}) v->assign(K, 0.0);
  std::vector<cplx> roots(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) roots[static_cast<std::size_t>(j)] = std::exp(cplx(0.0, std::numbers::pi * (j + 0.5) / M));
  for (std::size_t k = 0; k < K; ++k) {
    const double hL = h * L[k];
    c.E[k] = std::exp(hL);
    c.E2[k] = std::exp(hL / 2.0);
    cplx q = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (const cplx& r : roots) {
      const cplx z = hL + r;
      const cplx ez = std::exp(z);
      const cplx z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (-2.0 + z)) / z3;
      d += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.Q[k] = h * (q / static_cast<double>(M)).real();
    c.f1[k] = h * (a / static_cast<double>(M)).real();
    c.f2[k] = h * (b / static_cast<double>(M)).real();
    c.f3[k] = h * (d / static_cast<double>(M)).real();
  }
  return c;
}

class BurgersRhs {
 public:
  BurgersRhs(const detail::RealFft& fft, const Grid1D& grid)
      : fft_(fft), n_(grid.n), K_(static_cast<std::size_t>(grid.n / 2 + 1)), ik_half_(K_), u_(n_), sq_(n_),
        work_(K_) {
    const double base = 2.0 * std::numbers::pi / grid.length();
    for (std::size_t k = 0; k < K_; ++k) {
      const bool kept = 3 * static_cast<int>(k) < n_ && 2 * static_cast<int>(k) != n_;
      ik_half_[k] = kept ? cplx(0.0, -0.5 * base * static_cast<double>(k)) : cplx(0.0, 0.0);
    }
  }

  // -(u^2/2)_x in unnormalized transform space, dealiased; returns max|u|.
  double operator()(const std::vector<cplx>& v, std::vector<cplx>& out) {
    work_ = v;
    fft_.inverse(work_.data(), u_.data());
    double umax = 0.0;
    for (int j = 0; j < n_; ++j) {
      u_[j] /= n_;
      sq_[j] = u_[j] * u_[j];
      umax = std::max(umax, std::abs(u_[j]));
    }
    fft_.forward(sq_.data(), out.data());
    for (std::size_t k = 0; k < K_; ++k) out[k] *= ik_half_[k];
    return umax;
  }

 private:
  const detail::RealFft& fft_;
  int n_;
  std::size_t K_;
  std::vector<cplx> ik_half_;
  std::vector<double> u_, sq_;
  std::vector<cplx> work_;
};

}  // namespace

SpaceTimeField solve_burgers(const Eigen::VectorXd& u0, const Grid1D& grid, double nu, double T, int n_t,
                             const BurgersOptions& options) {
  grid.validate();
  if (!grid.periodic) throw ConfigError("Burgers solver needs a periodic grid");
  if (u0.size() != grid.n) throw ConfigError("Burgers initial condition does not match the grid");
  if ((grid.n & (grid.n - 1)) != 0) throw ConfigError("Burgers grid size must be a power of two");
  if (!(nu > 0.0) || !(T > 0.0) || n_t < 2) throw ConfigError("Burgers: need nu > 0, T > 0, n_t >= 2");
  if (!u0.allFinite()) throw ConfigError("Burgers initial condition is not finite");

  const int n = grid.n;
  const std::size_t K = static_cast<std::size_t>(n / 2 + 1);
  const double dx = grid.spacing();
  const double base = 2.0 * std::numbers::pi / grid.length();
  std::vector<double> L(K);
  for (std::size_t k = 0; k < K; ++k) L[k] = -nu * nu * std::pow(base * static_cast<double>(k), 2);

  detail::RealFft fft(n);
  BurgersRhs rhs(fft, grid);
  std::vector<cplx> v(K), Nv(K), Na(K), Nb(K), Nc(K), a(K), b(K), c(K), tmp(K);
  fft.forward(u0.data(), v.data());

  SpaceTimeField out;
  out.xgrid = grid;
  out.tgrid = Grid1D::closed(n_t, 0.0, T);
  out.values.resize(n, n_t);
  out.values.col(0) = u0;

  const double u0max = u0.cwiseAbs().maxCoeff();
  const double limit = 1e3 * u0max;
  const double interval = T / (n_t - 1);
  std::map<int, EtdCoefficients> cache;
  double umax = u0max;
  long step = 0;
  Eigen::VectorXd phys(n);

  for (int j = 1; j < n_t; ++j) {
    const double dt_cfl = umax > 0.0 ? std::min(options.dt_max, options.cfl * dx / umax) : options.dt_max;
    const int sub = std::max(1, static_cast<int>(std::ceil(interval / dt_cfl - 1e-12)));
    auto it = cache.find(sub);
    if (it == cache.end()) it = cache.emplace(sub, etd_coefficients(L, interval / sub, options.contour_points)).first;
    const auto& C = it->second;
    for (int s = 0; s < sub; ++s, ++step) {
      umax = rhs(v, Nv);
      if (u0max > 0.0 && (!std::isfinite(umax) || umax > limit))
        throw NumericalError("Burgers solution blew up at step " + std::to_string(step));
      for (std::size_t k = 0; k < K; ++k) a[k] = C.E2[k] * v[k] + C.Q[k] * Nv[k];
      rhs(a, Na);
      for (std::size_t k = 0; k < K; ++k) b[k] = C.E2[k] * v[k] + C.Q[k] * Na[k];
      rhs(b, Nb);
      for (std::size_t k = 0; k < K; ++k) c[k] = C.E2[k] * a[k] + C.Q[k] * (2.0 * Nb[k] - Nv[k]);
      rhs(c, Nc);
      for (std::size_t k = 0; k < K; ++k)
        v[k] = C.E[k] * v[k] + Nv[k] * C.f1[k] + 2.0 * (Na[k] + Nb[k]) * C.f2[k] + Nc[k] * C.f3[k];
    }
    tmp = v;
    fft.inverse(tmp.data(), phys.data());
    phys /= n;
    umax = phys.cwiseAbs().maxCoeff();
    if (u0max > 0.0 && (!std::isfinite(umax) || umax > limit))
      throw NumericalError("Burgers solution blew up at step " + std::to_string(step));
    out.values.col(j) = phys;
  }
  return out;
}

Eigen::VectorXd spectral_resample(const Eigen::VectorXd& u, int n_new) {
  const int n = static_cast<int>(u.size());
  if (n < 2 || n_new < 2) throw ConfigError("spectral_resample: need at least two points");
  std::vector<cplx> src(static_cast<std::size_t>(n / 2 + 1)), dst(static_cast<std::size_t>(n_new / 2 + 1), 0.0);
  detail::RealFft(n).forward(u.data(), src.data());
  const int kmax = std::min((n - 1) / 2, (n_new - 1) / 2);
  const double scale = static_cast<double>(n_new) / n;
  for (int k = 0; k <= kmax; ++k) dst[static_cast<std::size_t>(k)] = src[static_cast<std::size_t>(k)] * scale;
  Eigen::VectorXd out(n_new);
  detail::RealFft(n_new).inverse(dst.data(), out.data());
  return out / n_new;
}

}  // namespace pip2::pde_lab
