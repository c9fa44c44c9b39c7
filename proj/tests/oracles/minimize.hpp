#pragma once

#include "snapbeam/model.hpp"

#include <Eigen/Dense>

namespace oracles {

struct Minimum {
  Eigen::VectorXd q;  // full dof vector
  double energy = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Minimizes the total potential over the free dofs with GSL's BFGS, using
/// central-difference gradients of the energy only (no element forces).
Minimum minimize_potential(const snapbeam::Model& model, const Eigen::VectorXd& q0, double lambda);

}  // namespace oracles
