#include "pip2/harness/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

#include "pip2/common/errors.hpp"

namespace pip2::harness::svg {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string viridis(double s) {
  static constexpr std::array<std::array<double, 3>, 5> anchors{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(s), anchors.size() - 2);
  const double f = s - static_cast<double>(i);
  std::array<int, 3> rgb{};
  for (int k = 0; k < 3; ++k)
    rgb[static_cast<std::size_t>(k)] = static_cast<int>(std::lround(anchors[i][k] * (1 - f) + anchors[i + 1][k] * f));
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

std::string axes(double x0, double x1, double y0, double y1, const std::string& xlabel, const std::string& ylabel,
                 double plot_w) {
  std::string s;
  const double pw = plot_w;
  const double ph = kHeight - kTop - kBottom;
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000\"/>\n", kLeft, kTop,
                   pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double fx = kLeft + pw * k / 4.0;
    const double fy = kTop + ph * (1 - k / 4.0);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n", fx,
                     kTop + ph + 16, x0 + (x1 - x0) * k / 4.0);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6,
                     fy + 4, y0 + (y1 - y0) * k / 4.0);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                   kLeft + pw / 2, kHeight - 12, escape(xlabel));
  s += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
      kTop + ph / 2, kTop + ph / 2, escape(ylabel));
  return s;
}

std::string header(const std::string& title, const std::string& extra = "") {
  return fmt::format(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\"{}>\n", kWidth,
             kHeight, kWidth, kHeight, extra) +
         fmt::format("<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
                     "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
                     kWidth / 2, escape(title));
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ConfigError("plot series x/y length mismatch");
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  std::string out = header(title);
  out += axes(x0, x1, y0, y1, xlabel, ylabel, pw);
  int row = 0;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      pts += fmt::format("{:.2f},{:.2f} ", kLeft + pw * (s.x[i] - x0) / (x1 - x0), kTop + ph * (1 - (s.y[i] - y0) / (y1 - y0)));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{} points=\"{}\"/>\n", s.color,
                       s.dashed ? " stroke-dasharray=\"6 4\"" : "", pts);
    const double ly = kTop + 16 + 16 * row++;
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.8\"{}/>\n",
                       kLeft + pw - 120, ly - 4, kLeft + pw - 96, ly - 4, s.color,
                       s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n", kLeft + pw - 90, ly, escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::string& title, const Eigen::MatrixXd& values, double x_lo, double x_hi, double t_lo,
                    double t_hi, ColorLimits* limits) {
  if (values.size() == 0) throw ConfigError("heatmap of an empty field");
  const ColorLimits lim{values.minCoeff(), values.maxCoeff()};
  if (limits) *limits = lim;
  const double pw = kWidth - kLeft - kRight - 80;
  const double ph = kHeight - kTop - kBottom;
  std::string out = header(title, fmt::format(" data-vmin=\"{}\" data-vmax=\"{}\"", lim.vmin, lim.vmax));
  const auto nx = values.rows();
  const auto nt = values.cols();
  const double cw = pw / static_cast<double>(nt);
  const double ch = ph / static_cast<double>(nx);
  const double span = lim.vmax - lim.vmin;
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < nt; ++j) {
      const double s = span > 0 ? (values(i, j) - lim.vmin) / span : 0.5;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         kLeft + cw * static_cast<double>(j), kTop + ph - ch * static_cast<double>(i + 1), cw + 0.05,
                         ch + 0.05, viridis(s));
    }
  out += "</g>\n";
  out += axes(t_lo, t_hi, x_lo, x_hi, "t", "x", pw);
  const double bx = kLeft + pw + 20;
  for (int k = 0; k < 64; ++k)
    out += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n", bx,
                       kTop + ph * (1 - (k + 1) / 64.0), ph / 64.0 + 0.05, viridis((k + 0.5) / 64.0));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{:.3g}</text>\n", bx + 20, kTop + 8, lim.vmax);
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{:.3g}</text>\n", bx + 20, kTop + ph, lim.vmin);
  out += "</svg>\n";
  return out;
}

ColorLimits read_limits(const std::string& text) {
  const auto attr = [&](const std::string& name) {
    const auto key = name + "=\"";
    const auto p = text.find(key);
    if (p == std::string::npos) throw ConfigError("svg has no " + name + " attribute");
    const auto b = p + key.size();
    return std::stod(text.substr(b, text.find('"', b) - b));
  };
  return {attr("data-vmin"), attr("data-vmax")};
}

}  // namespace pip2::harness::svg
