#include "snapbeam/corotational.hpp"

#include "snapbeam/errors.hpp"

#include <cmath>
#include <numbers>

namespace snapbeam::corotational {

namespace {

// Chord geometry derivatives shared by force and tangent:
//   b = dL/dq       = (-c, -s, 0, c, s, 0)
//   z               = (-s, c, 0, s, -c, 0),  dbeta/dq = -z / L
struct ChordFrame {
  LocalDeformation d;
  Vector6 b;
  Vector6 z;
};

ChordFrame chord_frame(const Element& element, const NodeGeom& a, const NodeGeom& b, const Vector6& q,
                       std::size_t element_id) {
  const double dX = (b.x + q[3]) - (a.x + q[0]);
  const double dY = (b.y + q[4]) - (a.y + q[1]);
  const double L = std::hypot(dX, dY);
  if (!(L > collapse_ratio * element.L0)) {
    throw KinematicsError(element_id, "element collapsed");
  }
  const double c = dX / L;
  const double s = dY / L;

  ChordFrame f;
  f.d.L = L;
  f.d.u_l = (L * L - element.L0 * element.L0) / (L + element.L0);
  f.d.beta = std::atan2(dY, dX);
  f.d.theta1_l = wrap_angle(q[2] + element.beta0 - f.d.beta);
  f.d.theta2_l = wrap_angle(q[5] + element.beta0 - f.d.beta);
  constexpr double limit = std::numbers::pi / 2.0;
  if (std::abs(f.d.theta1_l) >= limit || std::abs(f.d.theta2_l) >= limit) {
    throw KinematicsError(element_id, "local rotation out of range");
  }
  f.b << -c, -s, 0.0, c, s, 0.0;
  f.z << -s, c, 0.0, s, -c, 0.0;
  return f;
}

double energy_of(const LocalDeformation& d, const Element& element, const Material& m) {
  const double axial = 0.5 * m.axial_stiffness() / element.L0 * d.u_l * d.u_l;
  const double k = 2.0 * m.bending_stiffness() / element.L0;
  const double t1 = d.theta1_l;
  const double t2 = d.theta2_l;
  const double bending = 0.5 * k * (2.0 * t1 * t1 + 2.0 * t1 * t2 + 2.0 * t2 * t2);
  return axial + bending;
}

}  // namespace

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);  // in [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

LocalDeformation local_kinematics(const Element& element, const NodeGeom& a, const NodeGeom& b, const Vector6& q,
                                  std::size_t element_id) {
  return chord_frame(element, a, b, q, element_id).d;
}

LocalForces local_forces(const LocalDeformation& d, const Element& element, const Material& m) {
  const double k = 2.0 * m.bending_stiffness() / element.L0;
  return LocalForces{m.axial_stiffness() * d.u_l / element.L0, k * (2.0 * d.theta1_l + d.theta2_l),
                     k * (d.theta1_l + 2.0 * d.theta2_l)};
}

double strain_energy(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                     const Vector6& q, std::size_t element_id) {
  return energy_of(local_kinematics(element, a, b, q, element_id), element, material);
}

Vector6 internal_force(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                       const Vector6& q, std::size_t element_id) {
  return evaluate(element, material, a, b, q, element_id).force;
}

Matrix6 tangent_stiffness(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                          const Vector6& q, std::size_t element_id) {
  return evaluate(element, material, a, b, q, element_id).tangent;
}

ElementResponse evaluate(const Element& element, const Material& material, const NodeGeom& a, const NodeGeom& b,
                         const Vector6& q, std::size_t element_id) {
  const ChordFrame f = chord_frame(element, a, b, q, element_id);
  const LocalForces local = local_forces(f.d, element, material);
  const double L = f.d.L;

  // d(theta_i_l)/dq = e_theta_i + z / L
  Vector6 g1 = f.z / L;
  Vector6 g2 = f.z / L;
  g1[2] += 1.0;
  g2[5] += 1.0;

  ElementResponse r;
  r.energy = energy_of(f.d, element, material);
  r.force = local.axial * f.b + local.moment_a * g1 + local.moment_b * g2;

  // Material part: B^T D B with B = [b; g1; g2].
  const double ka = material.axial_stiffness() / element.L0;
  const double kb = 2.0 * material.bending_stiffness() / element.L0;
  r.tangent = ka * f.b * f.b.transpose() +
              kb * (2.0 * g1 * g1.transpose() + g1 * g2.transpose() + g2 * g1.transpose() + 2.0 * g2 * g2.transpose());

  // Geometric part: F_N d2L/dq2 + (M1 + M2) d2(-beta)/dq2.
  const Matrix6 bz = f.b * f.z.transpose();
  r.tangent += (local.axial / L) * f.z * f.z.transpose();
  r.tangent -= ((local.moment_a + local.moment_b) / (L * L)) * (bz + bz.transpose());
  return r;
}

}  // namespace snapbeam::corotational
