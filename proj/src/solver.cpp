#include "snapbeam/solver.hpp"

#include "snapbeam/assembly.hpp"
#include "snapbeam/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace snapbeam {

namespace {

using Eigen::VectorXd;

std::string at_lambda(double lambda) {
  std::ostringstream s;
  s.precision(17);
  s << "no convergence at lambda = " << lambda;
  return s.str();
}

void impose_constraints(const DofMap& dofs, VectorXd& q) {
  const VectorXd& values = dofs.constrained_values();
  for (Eigen::Index i = 0; i < q.size(); ++i)
    if (!dofs.is_free(static_cast<std::size_t>(i))) q[i] = values[i];
}

void add_free(const DofMap& dofs, const VectorXd& dq_free, VectorXd& q) {
  const auto& free = dofs.free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i)
    q[static_cast<Eigen::Index>(free[i])] += dq_free[static_cast<Eigen::Index>(i)];
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Tracks the "residual grew three iterations in a row" divergence signal.
class GrowthMonitor {
 public:
  bool diverging(double residual) {
    growth_ = residual > previous_ ? growth_ + 1 : 0;
    previous_ = residual;
    return growth_ >= 3;
  }

 private:
  double previous_ = std::numeric_limits<double>::infinity();
  int growth_ = 0;
};

// Newton at fixed lambda. expected_sign != 0 enables the limit-point guard.
SolveResult newton_at_load(const Model& model, const DofMap& dofs, double lambda, VectorXd q,
                           const NewtonOptions& opt, int expected_sign) {
  impose_constraints(dofs, q);
  const VectorXd F = dofs.gather(reference_load(model));
  const double tol = residual_tolerance(model, dofs, lambda, opt.tol);
  const bool guard = opt.limit_point_guard && F.squaredNorm() > 0.0;
  GrowthMonitor growth;

  for (int it = 0;; ++it) {
    Assembly a;
    try {
      a = assemble(model, dofs, q, lambda);
    } catch (const KinematicsError& e) {
      throw ConvergenceError(at_lambda(lambda) + " (" + e.what() + ")", lambda);
    }
    const double rn = a.residual.norm();
    if (!std::isfinite(rn)) throw ConvergenceError(at_lambda(lambda) + " (non-finite residual)", lambda);
    if (rn <= tol) return SolveResult{State{q, lambda}, it, rn};
    if (it >= opt.max_iters) throw ConvergenceError(at_lambda(lambda) + " (iteration limit)", lambda);
    if (growth.diverging(rn)) throw ConvergenceError(at_lambda(lambda) + " (residual growing)", lambda);

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.tangent);
    const VectorXd dq = lu.solve(-a.residual);
    if (!dq.allFinite()) throw ConvergenceError(at_lambda(lambda) + " (singular tangent)", lambda);
    if (guard) {
      const int s = sign_of(F.dot(lu.solve(F)));
      if (expected_sign == 0) expected_sign = s;
      if (s != expected_sign) throw ConvergenceError(at_lambda(lambda) + " (limit point passed)", lambda);
    }
    add_free(dofs, dq, q);
  }
}

// Newton with one free dof held fixed and lambda as unknown (bordered system).
SolveResult newton_displacement(const Model& model, const DofMap& dofs, std::size_t control_global, double value,
                                State s, const NewtonOptions& opt) {
  const long c = dofs.free_index(control_global);
  if (c < 0) throw ConvergenceError("displacement control on a constrained dof", s.lambda);
  impose_constraints(dofs, s.q);
  s.q[static_cast<Eigen::Index>(control_global)] = value;
  const VectorXd F = dofs.gather(reference_load(model));
  GrowthMonitor growth;

  for (int it = 0;; ++it) {
    Assembly a;
    try {
      a = assemble(model, dofs, s.q, s.lambda);
    } catch (const KinematicsError& e) {
      throw ConvergenceError(at_lambda(s.lambda) + " (" + e.what() + ")", s.lambda);
    }
    const double rn = a.residual.norm();
    if (!std::isfinite(rn)) throw ConvergenceError(at_lambda(s.lambda) + " (non-finite residual)", s.lambda);
    if (rn <= residual_tolerance(model, dofs, s.lambda, opt.tol)) return SolveResult{s, it, rn};
    if (it >= opt.max_iters) throw ConvergenceError(at_lambda(s.lambda) + " (iteration limit)", s.lambda);
    if (growth.diverging(rn)) throw ConvergenceError(at_lambda(s.lambda) + " (residual growing)", s.lambda);

    Eigen::MatrixXd J = a.tangent;
    J.col(c) = -F;
    const VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-a.residual);
    if (!x.allFinite()) throw ConvergenceError(at_lambda(s.lambda) + " (singular bordered system)", s.lambda);
    VectorXd dq = x;
    dq[c] = 0.0;
    add_free(dofs, dq, s.q);
    s.lambda += x[c];
  }
}

struct Increment {
  VectorXd dq;  // free dofs
  double dl = 0.0;
};

struct StepResult {
  State state;
  int iterations = 0;
  Increment increment;
};

class PathFollower {
 public:
  PathFollower(const Model& model, const ContinuationSettings& settings, const State& start)
      : model_(model),
        settings_(settings),
        dofs_(model),
        metric_(model, dofs_, start),
        F_(dofs_.gather(reference_load(model))),
        options_(newton_options(settings)),
        length_(model.characteristic_length()) {}

  EquilibriumPath run(const State& start, const StopPredicate& stop) {
    EquilibriumPath path;
    path.points.push_back(annotate(model_, start, 0));
    if (F_.squaredNorm() == 0.0) {
      path.termination = Termination::target_reached;
      return path;
    }

    double step = settings_.initial_step;
    std::optional<Increment> previous;
    for (int n = 0; n < settings_.max_steps; ++n) {
      const State& current = path.points.back().state;
      std::optional<StepResult> trial;
      while (!(trial = attempt(current, step, previous))) {
        step *= 0.5;
        if (step < settings_.min_step) {
          if (path.points.size() == 1)
            throw ConvergenceError("divergence at first step: " + at_lambda(current.lambda), current.lambda);
          path.termination = Termination::step_underflow;
          return path;
        }
      }

      path.points.push_back(annotate(model_, trial->state, trial->iterations));
      previous = trial->increment;

      if (land_on_target(path)) {
        path.termination = Termination::target_reached;
        return path;
      }
      if (stop && stop(path)) {
        path.termination = Termination::target_reached;
        return path;
      }
      if (trial->iterations <= 4) step = std::min(step * 1.5, settings_.max_step);
      step = std::clamp(step, settings_.min_step, settings_.max_step);
    }
    path.termination = Termination::max_steps;
    return path;
  }

 private:
  std::optional<StepResult> attempt(const State& current, double step, const std::optional<Increment>& previous) {
    try {
      switch (settings_.method) {
        case ContinuationMethod::load_control:
          return load_step(current, step);
        case ContinuationMethod::displacement_control:
          return displacement_step(current, step);
        case ContinuationMethod::arc_length:
          return arc_length_step(current, step, previous);
      }
    } catch (const ConvergenceError&) {
      return std::nullopt;
    } catch (const KinematicsError&) {
      return std::nullopt;
    }
    return std::nullopt;
  }

  double control_value(const State& s) const {
    return s.q[static_cast<Eigen::Index>(settings_.control_dof->index())];
  }

  std::optional<StepResult> load_step(const State& current, double step) {
    const double target = *settings_.target_lambda;
    const double direction = target >= current.lambda ? 1.0 : -1.0;
    double lambda = current.lambda + direction * step;
    if ((lambda - target) * direction > 0.0) lambda = target;

    const int expected = stiffness_sign(current);
    NewtonOptions opt = options_;
    opt.limit_point_guard = true;
    SolveResult r = newton_at_load(model_, dofs_, lambda, current.q, opt, expected);
    return finish(current, std::move(r));
  }

  std::optional<StepResult> displacement_step(const State& current, double step) {
    const double target = *settings_.target_displacement;
    const double now = control_value(current);
    const double direction = target >= now ? 1.0 : -1.0;
    double value = now + direction * step * length_;
    if ((value - target) * direction > 0.0) value = target;

    // Tangent predictor scaled to the requested control increment.
    State guess = current;
    const Assembly a = assemble(model_, dofs_, current.q, current.lambda);
    const VectorXd dqF = Eigen::PartialPivLU<Eigen::MatrixXd>(a.tangent).solve(F_);
    const long c = dofs_.free_index(settings_.control_dof->index());
    if (dqF.allFinite() && std::abs(dqF[c]) > 0.0) {
      const double dl = (value - now) / dqF[c];
      add_free(dofs_, dl * dqF, guess.q);
      guess.lambda += dl;
    }
    SolveResult r = newton_displacement(model_, dofs_, settings_.control_dof->index(), value, guess, options_);
    return finish(current, std::move(r));
  }

  std::optional<StepResult> arc_length_step(const State& current, double step,
                                            const std::optional<Increment>& previous) {
    const double tol_scale = options_.tol;
    Assembly a = assemble(model_, dofs_, current.q, current.lambda);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.tangent);
    VectorXd dqF = lu.solve(F_);
    if (!dqF.allFinite()) return std::nullopt;

    // Predictor along the tangent; orientation follows the previous increment.
    double orientation = 1.0;
    if (previous) {
      orientation = metric_.dot(dqF, 1.0, previous->dq, previous->dl) >= 0.0 ? 1.0 : -1.0;
    } else if (settings_.target_lambda && *settings_.target_lambda < current.lambda) {
      orientation = -1.0;
    }
    const double dl0 = orientation * step / metric_.norm(dqF, 1.0);
    Increment inc{dl0 * dqF, dl0};

    State s = current;
    add_free(dofs_, inc.dq, s.q);
    s.lambda += inc.dl;

    GrowthMonitor growth;
    for (int it = 0;; ++it) {
      a = assemble(model_, dofs_, s.q, s.lambda);
      const double rn = a.residual.norm();
      if (!std::isfinite(rn)) return std::nullopt;
      if (rn <= residual_tolerance(model_, dofs_, s.lambda, tol_scale)) {
        if (previous && metric_.dot(inc.dq, inc.dl, previous->dq, previous->dl) <= 0.0) return std::nullopt;
        return StepResult{s, it, inc};
      }
      if (it >= options_.max_iters || growth.diverging(rn)) return std::nullopt;

      lu.compute(a.tangent);
      const VectorXd dqR = lu.solve(-a.residual);
      dqF = lu.solve(F_);
      if (!dqR.allFinite() || !dqF.allFinite()) return std::nullopt;

      // Spherical constraint |inc + dqR + dl dqF, inc.dl + dl| = step.
      const VectorXd base = inc.dq + dqR;
      const double qa = metric_.dot(dqF, 1.0, dqF, 1.0);
      const double qb = 2.0 * metric_.dot(base, inc.dl, dqF, 1.0);
      const double qc = metric_.dot(base, inc.dl, base, inc.dl) - step * step;
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc < 0.0) return std::nullopt;
      const double root = std::sqrt(disc);
      const double q_ = -0.5 * (qb + (qb >= 0.0 ? root : -root));
      const double r1 = q_ / qa;
      const double r2 = q_ != 0.0 ? qc / q_ : r1;

      // Root closest in direction to the current increment.
      auto cosine = [&](double dl) {
        return metric_.dot(base + dl * dqF, inc.dl + dl, inc.dq, inc.dl);
      };
      const double dl = cosine(r1) >= cosine(r2) ? r1 : r2;
      const VectorXd dq = dqR + dl * dqF;
      add_free(dofs_, dq, s.q);
      s.lambda += dl;
      inc.dq += dq;
      inc.dl += dl;
    }
  }

  std::optional<StepResult> finish(const State& current, SolveResult r) {
    StepResult out;
    out.iterations = r.iterations;
    out.increment.dq = dofs_.gather(r.state.q - current.q);
    out.increment.dl = r.state.lambda - current.lambda;
    out.state = std::move(r.state);
    return out;
  }

  int stiffness_sign(const State& s) const {
    const Assembly a = assemble(model_, dofs_, s.q, s.lambda);
    return sign_of(F_.dot(Eigen::PartialPivLU<Eigen::MatrixXd>(a.tangent).solve(F_)));
  }

  // Replaces the last point by an exact solve at the target once the last step
  // crossed it. Returns true when a target was reached.
  bool land_on_target(EquilibriumPath& path) {
    const std::size_t n = path.points.size();
    const State& before = path.points[n - 2].state;
    const State& after = path.points[n - 1].state;

    if (settings_.target_lambda) {
      const double t = *settings_.target_lambda;
      if (after.lambda == t) return true;
      if (before.lambda != t && (before.lambda - t) * (after.lambda - t) < 0.0) {
        const double f = (t - before.lambda) / (after.lambda - before.lambda);
        const VectorXd guess = before.q + f * (after.q - before.q);
        try {
          const SolveResult r = newton_at_load(model_, dofs_, t, guess, options_, 0);
          path.points.back() = annotate(model_, r.state, r.iterations);
        } catch (const ConvergenceError&) {
        }
        return true;
      }
    }
    if (settings_.target_displacement && settings_.control_dof) {
      const double t = *settings_.target_displacement;
      const double vb = control_value(before);
      const double va = control_value(after);
      if (va == t) return true;
      if (vb != t && (vb - t) * (va - t) < 0.0) {
        const double f = (t - vb) / (va - vb);
        State guess{before.q + f * (after.q - before.q), before.lambda + f * (after.lambda - before.lambda)};
        try {
          const SolveResult r =
              newton_displacement(model_, dofs_, settings_.control_dof->index(), t, guess, options_);
          path.points.back() = annotate(model_, r.state, r.iterations);
        } catch (const ConvergenceError&) {
        }
        return true;
      }
    }
    return false;
  }

  const Model& model_;
  const ContinuationSettings& settings_;
  DofMap dofs_;
  ArcMetric metric_;
  VectorXd F_;
  NewtonOptions options_;
  double length_;
};

}  // namespace

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::target_reached:
      return "target reached";
    case Termination::max_steps:
      return "max steps";
    case Termination::step_underflow:
      return "step underflow";
    case Termination::divergence:
      return "divergence";
  }
  return "?";
}

NewtonOptions newton_options(const ContinuationSettings& settings) {
  return NewtonOptions{settings.newton_tol, settings.max_newton_iters, false};
}

double residual_tolerance(const Model& model, const DofMap& dofs, double lambda, double tol) {
  return tol * ((lambda * dofs.gather(reference_load(model))).norm() + 1.0);
}

SolveResult solve_at_load(const Model& model, double lambda, const VectorXd& q0, const NewtonOptions& options) {
  return newton_at_load(model, DofMap(model), lambda, q0, options, 0);
}

SolveResult solve_displacement_controlled(const Model& model, DofRef control, double value, const State& guess,
                                          const NewtonOptions& options) {
  return newton_displacement(model, DofMap(model), control.index(), value, guess, options);
}

PathPoint annotate(const Model& model, const State& state, int newton_iters) {
  const DofMap dofs(model);
  const Assembly a = assemble(model, dofs, state.q, state.lambda);
  PathPoint p;
  p.state = state;
  p.energy = a.energy;
  p.newton_iters = newton_iters;
  if (a.tangent.rows() == 0) {
    p.det_sign = 1;
    return p;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(length_scaled(model, dofs, a.tangent), Eigen::EigenvaluesOnly);
  const VectorXd& values = eig.eigenvalues();
  p.min_eigenvalue = values[0];
  const double scale = values.cwiseAbs().maxCoeff();
  int negatives = 0;
  bool zero = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) <= 1e-14 * scale) zero = true;
    if (values[i] < 0.0) ++negatives;
  }
  p.det_sign = zero ? 0 : (negatives % 2 == 0 ? 1 : -1);
  return p;
}

ArcMetric::ArcMetric(const Model& model, const DofMap& dofs, const State& start) {
  const double l = model.characteristic_length() > 0.0 ? model.characteristic_length() : 1.0;
  weights_.resize(static_cast<Eigen::Index>(dofs.free_count()));
  for (std::size_t i = 0; i < dofs.free_count(); ++i) {
    const bool rotation = dofs.free_dofs()[i] % dofs_per_node == static_cast<std::size_t>(DofKind::theta);
    weights_[static_cast<Eigen::Index>(i)] = rotation ? 1.0 : 1.0 / (l * l);
  }
  const VectorXd F = dofs.gather(reference_load(model));
  double c2 = 0.0;
  if (F.squaredNorm() > 0.0) {
    const Assembly a = assemble(model, dofs, start.q, start.lambda);
    const VectorXd q1 = Eigen::PartialPivLU<Eigen::MatrixXd>(a.tangent).solve(F);
    if (q1.allFinite()) c2 = (q1.array().square() * weights_.array()).sum();
  }
  load_scale_ = c2 > 0.0 ? c2 : 1.0;
}

double ArcMetric::dot(const VectorXd& dq1, double dl1, const VectorXd& dq2, double dl2) const {
  return (dq1.array() * dq2.array() * weights_.array()).sum() + load_scale_ * dl1 * dl2;
}

EquilibriumPath continue_path_from(const Model& model, const ContinuationSettings& settings, const State& start,
                                   const StopPredicate& stop) {
  if (const std::string bad = check_settings(settings, model); !bad.empty()) throw Error("invalid settings: " + bad);
  PathFollower follower(model, settings, start);
  return follower.run(start, stop);
}

State gravity_equilibrium(const Model& model, const NewtonOptions& options) {
  const DofMap dofs(model);
  VectorXd q = dofs.constrained_values();
  try {
    return solve_at_load(model, 0.0, q, options).state;
  } catch (const ConvergenceError&) {
    if (!model.load.gravity_enabled) throw;
  }
  // Ramp gravity in from zero.
  Model ramped = model;
  double reached = 0.0;
  double increment = 0.25;
  while (reached < 1.0) {
    const double next = std::min(1.0, reached + increment);
    ramped.load.gravity = {next * model.load.gravity[0], next * model.load.gravity[1]};
    try {
      q = solve_at_load(ramped, 0.0, q, options).state.q;
      reached = next;
    } catch (const ConvergenceError&) {
      increment *= 0.5;
      if (increment < 1e-6) throw ConvergenceError("gravity equilibrium not found", 0.0);
    }
  }
  return State{q, 0.0};
}

EquilibriumPath continue_path(const Model& model, const ContinuationSettings& settings, const StopPredicate& stop) {
  const State start = gravity_equilibrium(model, newton_options(settings));
  return continue_path_from(model, settings, start, stop);
}

EquilibriumPath two_step_protocol(const Model& model, const ContinuationSettings& settings) {
  const State settled = gravity_equilibrium(model, newton_options(settings));
  EquilibriumPath path = continue_path_from(model, settings, settled);
  if (model.load.gravity_enabled) path.stage_boundary = 1;
  return path;
}

}  // namespace snapbeam
