#include "pip2/pde_lab/metrics.hpp"

#include <cmath>

#include "pip2/common/errors.hpp"

namespace pip2::pde_lab {

double relative_l2(const SpaceTimeField& pred, const SpaceTimeField& ref) {
  if (!(pred.xgrid == ref.xgrid) || !(pred.tgrid == ref.tgrid) || pred.values.rows() != ref.values.rows() ||
      pred.values.cols() != ref.values.cols())
    throw ConfigError("relative_l2: fields live on different grids");
  const Eigen::VectorXd wx = ref.xgrid.weights();
  const Eigen::VectorXd wt = ref.tgrid.weights();
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < ref.values.cols(); ++j)
    for (Eigen::Index i = 0; i < ref.values.rows(); ++i) {
      const double w = wx(i) * wt(j);
      const double d = ref.values(i, j) - pred.values(i, j);
      num += d * d * w;
      den += ref.values(i, j) * ref.values(i, j) * w;
    }
  if (den == 0.0) throw ConfigError("relative_l2: reference field is identically zero");
  return std::sqrt(num) / std::sqrt(den);
}

PointwiseErrors pointwise_abs_error(const SpaceTimeField& pred, const SpaceTimeField& ref,
                                    const std::vector<double>& xs, double t) {
  if (!(pred.xgrid == ref.xgrid) || !(pred.tgrid == ref.tgrid))
    throw ConfigError("pointwise_abs_error: fields live on different grids");
  PointwiseErrors out;
  out.xs = xs;
  const int j = ref.tgrid.nearest(t);
  double sum = 0.0;
  for (double x : xs) {
    const int i = ref.xgrid.nearest(x);
    const double e = std::abs(pred.values(i, j) - ref.values(i, j));
    out.errors.push_back(e);
    sum += e;
  }
  out.average = xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
  return out;
}

}  // namespace pip2::pde_lab
