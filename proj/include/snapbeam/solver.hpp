#pragma once

// Equilibrium solves and path following.
//
// Arc-length continuation uses a spherical constraint in scaled coordinates:
//
//   ds^2 = ( |dq|_W^2 + c^2 dlambda^2 ) / l^2
//
// where |.|_W weights rotations by the model characteristic length l, and
// c = |K0^-1 F_ref|_W is the displacement produced per unit load factor by the
// initial tangent. Both terms then carry length units, and scaling the
// reference load leaves the physical path unchanged.

#include "snapbeam/model.hpp"
#include "snapbeam/settings.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace snapbeam {

struct State {
  Eigen::VectorXd q;
  double lambda = 0.0;
};

struct NewtonOptions {
  double tol = 1e-9;
  int max_iters = 25;
  /// Fail as soon as an iterate crosses a limit point, detected as a sign change of
  /// the current stiffness parameter F_ref^T K^-1 F_ref. Keeps load control on the
  /// branch it started from instead of converging onto a distant one.
  bool limit_point_guard = false;
};

NewtonOptions newton_options(const ContinuationSettings& settings);

struct SolveResult {
  State state;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Convergence threshold tol * (|lambda F_ref| + 1) over the free dofs.
double residual_tolerance(const Model& model, const DofMap& dofs, double lambda, double tol);

/// Newton at fixed load factor from q0. Prescribed dofs are reset to their values.
/// Throws ConvergenceError ("no convergence at lambda = ...") on divergence.
SolveResult solve_at_load(const Model& model, double lambda, const Eigen::VectorXd& q0,
                          const NewtonOptions& options = {});

/// Newton with `control` held at `value` and the load factor as unknown.
SolveResult solve_displacement_controlled(const Model& model, DofRef control, double value, const State& guess,
                                          const NewtonOptions& options = {});

struct PathPoint {
  State state;
  double energy = 0.0;          ///< total strain energy
  double min_eigenvalue = 0.0;  ///< smallest eigenvalue of the constrained tangent
  int det_sign = 0;
  int newton_iters = 0;
};

enum class Termination { target_reached, max_steps, step_underflow, divergence };

const char* to_string(Termination termination);

struct EquilibriumPath {
  std::vector<PathPoint> points;
  Termination termination = Termination::max_steps;
  /// Index of the first point of the loading stage in a two-step run.
  std::optional<std::size_t> stage_boundary;
};

/// Stop early once the predicate holds for the path built so far.
using StopPredicate = std::function<bool(const EquilibriumPath&)>;

/// Stability annotations for a state: smallest eigenvalue and determinant sign of
/// the constrained tangent.
PathPoint annotate(const Model& model, const State& state, int newton_iters = 0);

/// Follows the equilibrium path from the lambda = 0 equilibrium of the model.
EquilibriumPath continue_path(const Model& model, const ContinuationSettings& settings,
                              const StopPredicate& stop = {});

/// Follows the equilibrium path from a given equilibrium state.
EquilibriumPath continue_path_from(const Model& model, const ContinuationSettings& settings, const State& start,
                                   const StopPredicate& stop = {});

/// Equilibrium under gravity alone at lambda = 0, ramping gravity in if a direct
/// Newton solve fails.
State gravity_equilibrium(const Model& model, const NewtonOptions& options);

/// Gravity first (lambda = 0), then the reference load is continued from that state.
EquilibriumPath two_step_protocol(const Model& model, const ContinuationSettings& settings);

/// Weighted arc-length metric used by the continuation.
class ArcMetric {
 public:
  ArcMetric(const Model& model, const DofMap& dofs, const State& start);

  double dot(const Eigen::VectorXd& dq1, double dl1, const Eigen::VectorXd& dq2, double dl2) const;
  double norm(const Eigen::VectorXd& dq, double dl) const { return std::sqrt(dot(dq, dl, dq, dl)); }
  double load_scale() const { return load_scale_; }

 private:
  Eigen::VectorXd weights_;  // per free dof, already divided by l^2
  double load_scale_ = 0.0;  // c^2 / l^2
};

}  // namespace snapbeam
