#include "pip2/pde_lab/field.hpp"

#include <cmath>
#include <json.hpp>

#include "pip2/common/blob_io.hpp"
#include "pip2/common/errors.hpp"

namespace pip2::pde_lab {

using json = nlohmann::json;

Eigen::VectorXd Grid1D::points() const {
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = point(i);
  if (!periodic) p(n - 1) = x_hi;
  return p;
}

Eigen::VectorXd Grid1D::weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, spacing());
  if (!periodic) {
    w(0) *= 0.5;
    w(n - 1) *= 0.5;
  }
  return w;
}

int Grid1D::nearest(double x) const {
  const double r = (x - x_lo) / spacing();
  int i = static_cast<int>(std::floor(r));
  if (r - i > 0.5) ++i;
  if (periodic) {
    i %= n;
    if (i < 0) i += n;
    return i;
  }
  return std::clamp(i, 0, n - 1);
}

void Grid1D::validate() const {
  if (n < 2) throw ConfigError("grid needs at least two points");
  if (!(x_hi > x_lo) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
    throw ConfigError("grid endpoints must satisfy x_lo < x_hi");
}

void SpaceTimeField::validate() const {
  xgrid.validate();
  tgrid.validate();
  if (values.rows() != xgrid.n || values.cols() != tgrid.n)
    throw ConfigError("field shape does not match its axes");
  if (!values.allFinite()) throw NumericalError("field has non-finite entries");
}

namespace {

json grid_json(const Grid1D& g) {
  return {{"n", g.n}, {"lo", g.x_lo}, {"hi", g.x_hi}, {"periodic", g.periodic}};
}

Grid1D grid_from(const json& j) {
  Grid1D g{j.at("n").get<int>(), j.at("lo").get<double>(), j.at("hi").get<double>(),
           j.at("periodic").get<bool>()};
  g.validate();
  return g;
}

}  // namespace

void save_field(const std::filesystem::path& manifest_path, const SpaceTimeField& field,
                const std::string& metadata_json) {
  field.validate();
  auto blob_path = manifest_path;
  blob_path.replace_extension(".bin");
  std::vector<double> blob(static_cast<std::size_t>(field.values.size()));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < field.values.rows(); ++i)
    for (Eigen::Index j = 0; j < field.values.cols(); ++j) blob[k++] = field.values(i, j);
  json m;
  m["format"] = "pip2-field";
  m["format_version"] = 1;
  m["blob"] = blob_path.filename().string();
  m["byte_order"] = "little";
  m["dtype"] = "float64";
  m["layout"] = "row-major [n_x, n_t]";
  m["shape"] = {field.values.rows(), field.values.cols()};
  m["x"] = grid_json(field.xgrid);
  m["t"] = grid_json(field.tgrid);
  m["metadata"] = json::parse(metadata_json);
  io::write_f64_blob(blob_path, blob);
  io::write_text(manifest_path, m.dump(2) + "\n");
}

SpaceTimeField load_field(const std::filesystem::path& manifest_path) {
  json m;
  try {
    m = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw ConfigError("field manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  if (m.value("format", "") != "pip2-field") throw ConfigError("not a field manifest: " + manifest_path.string());
  SpaceTimeField f;
  try {
    f.xgrid = grid_from(m.at("x"));
    f.tgrid = grid_from(m.at("t"));
  } catch (const json::exception& e) {
    throw ConfigError("field manifest " + manifest_path.string() + ": " + e.what());
  }
  const auto blob = io::read_f64_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
  if (blob.size() != static_cast<std::size_t>(f.xgrid.n) * static_cast<std::size_t>(f.tgrid.n))
    throw ConfigError("field blob length does not match its manifest: " + manifest_path.string());
  f.values.resize(f.xgrid.n, f.tgrid.n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < f.values.rows(); ++i)
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) f.values(i, j) = blob[k++];
  return f;
}

}  // namespace pip2::pde_lab
