#pragma once

// Two-node co-rotational Euler-Bernoulli beam element in the plane.
//
// The element motion is split into a rigid translation/rotation of the chord
// and small deformations measured in the rotated chord frame: the axial
// stretch u_l and the end rotations theta1_l, theta2_l relative to the chord.
// Local forces follow linear elasticity; global internal forces and the
// tangent stiffness are the exact gradient and Hessian of the element strain
// energy with respect to the nodal dofs (u1, w1, theta1, u2, w2, theta2).
//
// Rotations are counterclockwise-positive.

#include "snapbeam/model.hpp"

#include <Eigen/Dense>

namespace snapbeam::corotational {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Current length below this fraction of L0 counts as a collapsed element.
inline constexpr double collapse_ratio = 1e-9;

struct LocalDeformation {
  double u_l = 0.0;       ///< axial stretch (L^2 - L0^2) / (L + L0)
  double theta1_l = 0.0;  ///< node-a rotation relative to the chord
  double theta2_l = 0.0;  ///< node-b rotation relative to the chord
  double beta = 0.0;      ///< current chord angle
  double L = 0.0;         ///< current chord length
};

struct LocalForces {
  double axial = 0.0;     ///< F_N
  double moment_a = 0.0;  ///< M1
  double moment_b = 0.0;  ///< M2
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Element kinematics for the nodal displacement 6-vector q.
/// Throws KinematicsError when the element collapses or a local rotation
/// reaches pi/2 (mesh too coarse for the deformation).
LocalDeformation local_kinematics(const Element& element, const NodeGeom& a, const NodeGeom& b, const Vector6& q,
                                  std::size_t element_id = 0);

LocalForces local_forces(const LocalDeformation& d, const Element& element, const Material& material);

double strain_energy(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                     const Vector6& q, std::size_t element_id = 0);

Vector6 internal_force(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                       const Vector6& q, std::size_t element_id = 0);

Matrix6 tangent_stiffness(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                          const Vector6& q, std::size_t element_id = 0);

/// Internal force and tangent evaluated together (shares the kinematics).
struct ElementResponse {
  double energy = 0.0;
  Vector6 force = Vector6::Zero();
  Matrix6 tangent = Matrix6::Zero();
};

ElementResponse evaluate(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                         const Vector6& q, std::size_t element_id = 0);

}  // namespace snapbeam::corotational
