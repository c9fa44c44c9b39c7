#include "snapbeam/model.hpp"

#include "snapbeam/assembly.hpp"
#include "snapbeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace snapbeam {

const char* to_string(DofKind kind) {
  switch (kind) {
    case DofKind::u:
      return "u";
    case DofKind::w:
      return "w";
    case DofKind::theta:
      return "theta";
  }
  return "?";
}

std::optional<DofKind> parse_dof_kind(const std::string& text) {
  if (text == "u") return DofKind::u;
  if (text == "w") return DofKind::w;
  if (text == "theta") return DofKind::theta;
  return std::nullopt;
}

Material rectangular_section(double youngs_modulus, double width, double thickness, double mass_density,
                             std::string name) {
  return Material{std::move(name), youngs_modulus, width * thickness, width * thickness * thickness * thickness / 12.0,
                  mass_density};
}

double Model::characteristic_length() const {
  if (nodes.empty()) return 0.0;
  auto [xmin, xmax] = std::minmax_element(nodes.begin(), nodes.end(), [](auto& l, auto& r) { return l.x < r.x; });
  auto [ymin, ymax] = std::minmax_element(nodes.begin(), nodes.end(), [](auto& l, auto& r) { return l.y < r.y; });
  return std::max(xmax->x - xmin->x, ymax->y - ymin->y);
}

Element make_element(const std::vector<NodeGeom>& nodes, int node_a, int node_b, std::size_t material) {
  const NodeGeom& a = nodes.at(static_cast<std::size_t>(node_a));
  const NodeGeom& b = nodes.at(static_cast<std::size_t>(node_b));
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return Element{node_a, node_b, material, std::sqrt(dx * dx + dy * dy), std::atan2(dy, dx)};
}

DofMap::DofMap(const Model& model)
    : free_of_global_(model.dof_count(), 0),
      constrained_values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()))) {
  for (const DofRef& d : model.bcs.fixed) free_of_global_.at(d.index()) = -1;
  for (const PrescribedDof& p : model.bcs.prescribed) {
    free_of_global_.at(p.dof.index()) = -1;
    constrained_values_[static_cast<Eigen::Index>(p.dof.index())] = p.value;
  }
  long next = 0;
  for (std::size_t i = 0; i < free_of_global_.size(); ++i) {
    if (free_of_global_[i] < 0) continue;
    free_of_global_[i] = next++;
    free_dofs_.push_back(i);
  }
}

Eigen::VectorXd DofMap::gather(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(free_dofs_.size()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = full[static_cast<Eigen::Index>(free_dofs_[i])];
  return out;
}

void DofMap::scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const {
  for (std::size_t i = 0; i < free_dofs_.size(); ++i)
    full[static_cast<Eigen::Index>(free_dofs_[i])] = free[static_cast<Eigen::Index>(i)];
}

Eigen::VectorXd reference_load(const Model& model) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()));
  for (const NodalForce& force : model.load.reference_forces) f[static_cast<Eigen::Index>(force.dof.index())] += force.value;
  return f;
}

Eigen::VectorXd gravity_load(const Model& model) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()));
  if (!model.load.gravity_enabled) return f;
  for (const Element& e : model.elements) {
    const Material& m = model.materials[e.material];
    const double half_weight = 0.5 * m.mass_density * m.area * e.L0;
    for (int node : {e.node_a, e.node_b}) {
      f[dofs_per_node * node + 0] += half_weight * model.load.gravity[0];
      f[dofs_per_node * node + 1] += half_weight * model.load.gravity[1];
    }
  }
  return f;
}

namespace {

std::string node_name(int id) { return "node " + std::to_string(id); }
std::string element_name(std::size_t id) { return "element " + std::to_string(id); }

bool dof_in_range(const Model& model, const DofRef& d) {
  return d.node >= 0 && static_cast<std::size_t>(d.node) < model.nodes.size();
}

// Union-find over nodes; true when every node is reachable through elements.
bool connected(const Model& model) {
  std::vector<std::size_t> parent(model.nodes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const Element& e : model.elements)
    parent[find(static_cast<std::size_t>(e.node_a))] = find(static_cast<std::size_t>(e.node_b));
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < parent.size(); ++i) roots.insert(find(i));
  return roots.size() <= 1;
}

// Rest tangent is singular when the Jacobi-scaled constrained stiffness has a
// (numerically) zero eigenvalue; scaling keeps the test unit independent.
bool rest_stiffness_singular(const Model& model) {
  const DofMap dofs(model);
  if (dofs.free_count() == 0) return false;
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()));
  const Eigen::MatrixXd K = assemble(model, dofs, q, 0.0).tangent;
  const Eigen::VectorXd diag = K.diagonal();
  if ((diag.array() <= 0.0).any()) return true;
  const Eigen::VectorXd s = diag.array().rsqrt();
  const Eigen::MatrixXd scaled = s.asDiagonal() * K * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0] <= 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

std::vector<Diagnostic> validate(const Model& model) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string entity, std::string message) {
    out.push_back(Diagnostic{std::move(entity), std::move(message)});
  };

  if (model.nodes.empty()) report("model", "no nodes");
  if (model.elements.empty()) report("model", "no elements");

  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const NodeGeom& n = model.nodes[i];
    if (n.id != static_cast<int>(i)) report(node_name(n.id), "node ids must be unique and contiguous from 0");
    if (!std::isfinite(n.x) || !std::isfinite(n.y)) report(node_name(n.id), "non-finite coordinate");
  }

  for (std::size_t i = 0; i < model.materials.size(); ++i) {
    const Material& m = model.materials[i];
    const std::string who = "material " + m.name;
    if (!(m.youngs_modulus > 0.0)) report(who, "E must be positive");
    if (!(m.area > 0.0)) report(who, "A must be positive");
    if (!(m.second_moment > 0.0)) report(who, "I must be positive");
    if (!(m.mass_density >= 0.0)) report(who, "rho must be non-negative");
  }

  bool elements_ok = true;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const Element& e = model.elements[i];
    const auto n = static_cast<int>(model.nodes.size());
    if (e.node_a < 0 || e.node_a >= n || e.node_b < 0 || e.node_b >= n) {
      report(element_name(i), "references a missing node");
      elements_ok = false;
      continue;
    }
    if (e.material >= model.materials.size()) {
      report(element_name(i), "references a missing material");
      elements_ok = false;
    }
    if (e.node_a == e.node_b) {
      report(element_name(i), "zero-length element (node_a == node_b)");
      elements_ok = false;
      continue;
    }
    const Element fresh = make_element(model.nodes, e.node_a, e.node_b, e.material);
    if (!(fresh.L0 > 0.0)) {
      report(element_name(i), "zero-length element");
      elements_ok = false;
      continue;
    }
    if (std::abs(fresh.L0 - e.L0) > 1e-12 * fresh.L0 || std::abs(fresh.beta0 - e.beta0) > 1e-12) {
      report(element_name(i), "stored L0/beta0 disagree with node coordinates");
    }
  }

  std::set<std::size_t> fixed;
  bool dofs_ok = true;
  for (const DofRef& d : model.bcs.fixed) {
    if (!dof_in_range(model, d)) {
      report(node_name(d.node), "fixed dof on missing node");
      dofs_ok = false;
      continue;
    }
    if (!fixed.insert(d.index()).second) report(node_name(d.node), std::string("dof ") + to_string(d.kind) + " fixed twice");
  }
  std::set<std::size_t> prescribed;
  for (const PrescribedDof& p : model.bcs.prescribed) {
    if (!dof_in_range(model, p.dof)) {
      report(node_name(p.dof.node), "prescribed dof on missing node");
      dofs_ok = false;
      continue;
    }
    if (fixed.count(p.dof.index()))
      report(node_name(p.dof.node), std::string("dof ") + to_string(p.dof.kind) + " both fixed and prescribed");
    if (!prescribed.insert(p.dof.index()).second)
      report(node_name(p.dof.node), std::string("dof ") + to_string(p.dof.kind) + " prescribed twice");
    if (!std::isfinite(p.value)) report(node_name(p.dof.node), "non-finite prescribed value");
  }
  for (const NodalForce& f : model.load.reference_forces) {
    if (!dof_in_range(model, f.dof)) {
      report(node_name(f.dof.node), "force on missing node");
      dofs_ok = false;
    } else if (!std::isfinite(f.value)) {
      report(node_name(f.dof.node), "non-finite force");
    }
  }

  if (!elements_ok || !dofs_ok || model.nodes.empty() || model.elements.empty()) return out;

  if (!connected(model)) report("model", "disconnected mesh");
  if (out.empty() && rest_stiffness_singular(model)) report("model", "rest stiffness singular");
  return out;
}

}  // namespace snapbeam
