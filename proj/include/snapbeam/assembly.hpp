#pragma once

#include "snapbeam/corotational.hpp"
#include "snapbeam/model.hpp"

#include <Eigen/Dense>

namespace snapbeam {

/// Nodal 6-vector of an element extracted from the global displacement vector.
corotational::Vector6 element_dofs(const Model& model, const Element& element, const Eigen::VectorXd& q);

/// Sum of element strain energies.
double total_strain_energy(const Model& model, const Eigen::VectorXd& q);

/// Total potential: strain energy minus the work of lambda * F_ref and gravity.
double total_potential(const Model& model, const Eigen::VectorXd& q, double lambda);

/// Global internal force vector over all dofs (constrained ones included).
Eigen::VectorXd internal_force(const Model& model, const Eigen::VectorXd& q);

/// Global internal force minus applied load over all dofs.
Eigen::VectorXd full_residual(const Model& model, const Eigen::VectorXd& q, double lambda);

/// Global tangent over all dofs.
Eigen::MatrixXd full_tangent(const Model& model, const Eigen::VectorXd& q);

struct Assembly {
  Eigen::VectorXd residual;  ///< free dofs only
  Eigen::MatrixXd tangent;   ///< free x free
  double energy = 0.0;       ///< total strain energy
};

/// Residual and tangent restricted to the free dofs of `dofs`.
/// Element failures are rethrown as KinematicsError carrying the element id.
Assembly assemble(const Model& model, const DofMap& dofs, const Eigen::VectorXd& q, double lambda);
Assembly assemble(const Model& model, const Eigen::VectorXd& q, double lambda);

/// Free-dof tangent with rotation rows and columns divided by the characteristic
/// length, so every entry is in N/m. A congruence: inertia (stability) is unchanged.
Eigen::MatrixXd length_scaled(const Model& model, const DofMap& dofs, Eigen::MatrixXd tangent);

}  // namespace snapbeam
