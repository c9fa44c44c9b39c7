#include "svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace snapbeam::cli {

namespace {

constexpr double panel = 400.0;
constexpr double margin = 30.0;

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;

  void add(double x, double y) {
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  }
  // Uniform scale for shapes, independent axes for curves.
  double sx(double x, double left, bool uniform) const {
    return left + margin + (x - x0) * scale_x(uniform);
  }
  double sy(double y, bool uniform) const { return panel - margin - (y - y0) * scale_y(uniform); }
  double scale_x(bool uniform) const {
    const double w = std::max(x1 - x0, 1e-300), h = std::max(y1 - y0, 1e-300);
    return (panel - 2 * margin) / (uniform ? std::max(w, h) : w);
  }
  double scale_y(bool uniform) const {
    const double w = std::max(x1 - x0, 1e-300), h = std::max(y1 - y0, 1e-300);
    return (panel - 2 * margin) / (uniform ? std::max(w, h) : h);
  }
};

std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* style) {
  std::string d;
  for (const auto& [x, y] : pts) d += fmt::format("{:.2f},{:.2f} ", x, y);
  return fmt::format("<polyline fill=\"none\" {} points=\"{}\"/>\n", style, d);
}

double node_x(const NodeGeom& n, const Eigen::VectorXd& q) { return n.x + q[3 * n.id]; }
double node_y(const NodeGeom& n, const Eigen::VectorXd& q) { return n.y + q[3 * n.id + 1]; }

}  // namespace

std::string path_svg(const Model& model, const EquilibriumPath& path, std::optional<DofRef> control) {
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n<rect width=\"100%\" height=\"100%\" "
      "fill=\"white\"/>\n",
      2 * panel, panel);
  if (path.points.empty()) return out + "</svg>\n";

  const std::size_t n = path.points.size();
  const std::size_t every = std::max<std::size_t>(1, (n + 11) / 12);

  Box shapes;
  for (std::size_t i = 0; i < n; i += every)
    for (const NodeGeom& node : model.nodes) shapes.add(node_x(node, path.points[i].state.q), node_y(node, path.points[i].state.q));
  for (const NodeGeom& node : model.nodes) shapes.add(node.x, node.y);

  auto draw_shape = [&](const Eigen::VectorXd& q, const char* style) {
    for (const Element& e : model.elements) {
      const NodeGeom& a = model.nodes[static_cast<std::size_t>(e.node_a)];
      const NodeGeom& b = model.nodes[static_cast<std::size_t>(e.node_b)];
      out += polyline({{shapes.sx(node_x(a, q), 0, true), shapes.sy(node_y(a, q), true)},
                       {shapes.sx(node_x(b, q), 0, true), shapes.sy(node_y(b, q), true)}},
                      style);
    }
  };
  draw_shape(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count())),
             "stroke=\"#999\" stroke-dasharray=\"4,3\"");
  for (std::size_t i = 0; i < n; i += every) draw_shape(path.points[i].state.q, "stroke=\"#1f4e9c\"");

  // Right panel: lambda against the control displacement.
  std::size_t c = 0;
  if (control) {
    c = control->index();
  } else {
    double best = -1.0;
    for (std::size_t g = 0; g < model.dof_count(); ++g) {
      if (g % dofs_per_node == 2) continue;
      const double v = std::abs(path.points.back().state.q[static_cast<Eigen::Index>(g)]);
      if (v > best) best = v, c = g;
    }
  }
  Box curve;
  for (const PathPoint& p : path.points) curve.add(p.state.q[static_cast<Eigen::Index>(c)], p.state.lambda);
  curve.add(curve.x0, 0.0);
  std::vector<std::pair<double, double>> pts;
  for (const PathPoint& p : path.points)
    pts.emplace_back(curve.sx(p.state.q[static_cast<Eigen::Index>(c)], panel, false), curve.sy(p.state.lambda, false));
  out += polyline({{curve.sx(curve.x0, panel, false), curve.sy(0.0, false)},
                   {curve.sx(curve.x1, panel, false), curve.sy(0.0, false)}},
                  "stroke=\"#999\"");
  out += polyline(pts, "stroke=\"#c0392b\" stroke-width=\"1.5\"");
  out += fmt::format("<text x=\"{:.0f}\" y=\"20\" font-size=\"12\">lambda vs q_{}</text>\n", panel + margin, c);
  return out + "</svg>\n";
}

}  // namespace snapbeam::cli
