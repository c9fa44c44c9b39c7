#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace snapbeam {

/// Nodal degrees of freedom, in global ordering: u (x), w (y), theta (rotation).
enum class DofKind { u = 0, w = 1, theta = 2 };

inline constexpr int dofs_per_node = 3;

const char* to_string(DofKind kind);
std::optional<DofKind> parse_dof_kind(const std::string& text);

/// Reference to one degree of freedom of one node.
struct DofRef {
  int node = 0;
  DofKind kind = DofKind::u;

  /// Global index 3*node + k.
  std::size_t index() const { return static_cast<std::size_t>(dofs_per_node * node + static_cast<int>(kind)); }

  friend bool operator==(const DofRef&, const DofRef&) = default;
};

struct Material {
  std::string name = "default";
  double youngs_modulus = 0.0;  ///< E [Pa]
  double area = 0.0;            ///< A [m^2]
  double second_moment = 0.0;   ///< I [m^4]
  double mass_density = 0.0;    ///< rho [kg/m^3]

  double axial_stiffness() const { return youngs_modulus * area; }
  double bending_stiffness() const { return youngs_modulus * second_moment; }

  friend bool operator==(const Material&, const Material&) = default;
};

/// Rectangular solid section of the given width and thickness.
Material rectangular_section(double youngs_modulus, double width, double thickness, double mass_density = 0.0,
                             std::string name = "default");

struct NodeGeom {
  int id = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NodeGeom&, const NodeGeom&) = default;
};

/// Two-node beam element. L0 and beta0 are derived from the reference geometry.
struct Element {
  int node_a = 0;
  int node_b = 0;
  std::size_t material = 0;  ///< index into Model::materials
  double L0 = 0.0;
  double beta0 = 0.0;

  friend bool operator==(const Element&, const Element&) = default;
};

struct PrescribedDof {
  DofRef dof;
  double value = 0.0;

  friend bool operator==(const PrescribedDof&, const PrescribedDof&) = default;
};

struct BoundaryConditions {
  std::vector<DofRef> fixed;
  std::vector<PrescribedDof> prescribed;

  friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

struct NodalForce {
  DofRef dof;
  double value = 0.0;

  friend bool operator==(const NodalForce&, const NodalForce&) = default;
};

/// Applied load is lambda * reference_forces plus gravity at full value.
struct LoadCase {
  std::vector<NodalForce> reference_forces;
  bool gravity_enabled = false;
  std::array<double, 2> gravity{0.0, -9.81};

  friend bool operator==(const LoadCase&, const LoadCase&) = default;
};

struct Model {
  std::vector<NodeGeom> nodes;
  std::vector<Material> materials;
  std::vector<Element> elements;
  BoundaryConditions bcs;
  LoadCase load;

  std::size_t dof_count() const { return dofs_per_node * nodes.size(); }

  /// Largest extent of the reference geometry bounding box.
  double characteristic_length() const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// Builds an element between two existing nodes, computing L0 and beta0.
Element make_element(const std::vector<NodeGeom>& nodes, int node_a, int node_b, std::size_t material);

/// Split of the global dofs into free and constrained sets.
class DofMap {
 public:
  explicit DofMap(const Model& model);

  std::size_t total() const { return free_of_global_.size(); }
  std::size_t free_count() const { return free_dofs_.size(); }

  /// Free index of a global dof, or -1 when it is constrained.
  long free_index(std::size_t global) const { return free_of_global_[global]; }
  bool is_free(std::size_t global) const { return free_of_global_[global] >= 0; }
  const std::vector<std::size_t>& free_dofs() const { return free_dofs_; }

  Eigen::VectorXd gather(const Eigen::VectorXd& full) const;
  void scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const;

  /// Full displacement vector holding the prescribed values and zeros elsewhere.
  const Eigen::VectorXd& constrained_values() const { return constrained_values_; }

 private:
  std::vector<long> free_of_global_;
  std::vector<std::size_t> free_dofs_;
  Eigen::VectorXd constrained_values_;
};

/// Reference load vector F_ref over all global dofs.
Eigen::VectorXd reference_load(const Model& model);

/// Lumped gravity load over all global dofs (zero when gravity is disabled).
Eigen::VectorXd gravity_load(const Model& model);

struct Diagnostic {
  std::string entity;   ///< e.g. "element 3", "node 7", "model"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Checks every model invariant; empty result means the model is valid.
std::vector<Diagnostic> validate(const Model& model);

}  // namespace snapbeam
