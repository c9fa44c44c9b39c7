#include "snapbeam/bistability.hpp"

#include "snapbeam/assembly.hpp"
#include "snapbeam/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>

namespace snapbeam::bistability {

using Eigen::VectorXd;

const char* to_string(LimitKind kind) { return kind == LimitKind::maximum ? "maximum" : "minimum"; }

std::vector<LimitPoint> find_limit_points(const EquilibriumPath& path) {
  std::vector<LimitPoint> out;
  const auto& pts = path.points;
  if (pts.size() < 3) return out;

  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i].state.q - pts[i - 1].state.q).norm();

  int last_sign = 0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double d = pts[k + 1].state.lambda - pts[k].state.lambda;
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const std::size_t i = k;  // extremal sample
      const double h1 = s[i] - s[i - 1];
      const double h2 = s[i + 1] - s[i];
      const double l0 = pts[i - 1].state.lambda;
      const double l1 = pts[i].state.lambda;
      const double l2 = pts[i + 1].state.lambda;
      LimitPoint lp;
      lp.index = i;
      lp.kind = last_sign > 0 ? LimitKind::maximum : LimitKind::minimum;
      lp.lambda_star = l1;
      lp.interval = {i - 1, i};
      if (h1 > 0.0 && h2 > 0.0) {
        const double d1 = (l1 - l0) / h1;
        const double d2 = (l2 - l1) / h2;
        const double a = (d2 - d1) / (h1 + h2);
        const double b = (d1 * h2 + d2 * h1) / (h1 + h2);
        if (a != 0.0) {
          lp.lambda_star = l1 - b * b / (4.0 * a);
          if (-b / (2.0 * a) > 0.0) lp.interval = {i, i + 1};
        }
      }
      out.push_back(lp);
    }
    last_sign = sign;
  }
  return out;
}

namespace {

double stability_threshold(const Model& model) {
  const DofMap dofs(model);
  const Assembly rest = assemble(model, dofs, VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count())), 0.0);
  return rest.tangent.rows() > 0 ? 1e-8 * length_scaled(model, dofs, rest.tangent).diagonal().maxCoeff() : 0.0;
}

double potential_at_rest_load(const Model& model, const VectorXd& q) { return total_potential(model, q, 0.0); }

StableState make_stable_state(const Model& model, const State& s) {
  const Stability st = classify_stability(model, s, 1e-6);
  return StableState{s, potential_at_rest_load(model, s.q), st.stable, st.min_eigenvalue};
}

// Largest-magnitude free translation of the chord through the limit point.
DofRef trigger_dof_of(const Model& model, const EquilibriumPath& path, const LimitPoint& lp) {
  const DofMap dofs(model);
  const VectorXd mode = path.points[lp.index + 1].state.q - path.points[lp.index - 1].state.q;
  std::size_t best = dofs.free_dofs().front();
  double best_abs = -1.0;
  for (std::size_t g : dofs.free_dofs()) {
    if (g % dofs_per_node == static_cast<std::size_t>(DofKind::theta)) continue;
    const double v = std::abs(mode[static_cast<Eigen::Index>(g)]);
    if (v > best_abs) {
      best_abs = v;
      best = g;
    }
  }
  return DofRef{static_cast<int>(best / dofs_per_node), static_cast<DofKind>(best % dofs_per_node)};
}

// Equilibrium at lambda = 0 between two path samples that bracket it.
State polish_at_zero(const Model& model, const PathPoint& a, const PathPoint& b, const NewtonOptions& newton) {
  const double f = a.state.lambda / (a.state.lambda - b.state.lambda);
  const VectorXd guess = a.state.q + f * (b.state.q - a.state.q);
  return solve_at_load(model, 0.0, guess, newton).state;
}

}  // namespace

Stability classify_stability(const Model& model, const State& state, double equilibrium_tol) {
  const DofMap dofs(model);
  const Assembly a = assemble(model, dofs, state.q, state.lambda);
  if (a.residual.norm() > residual_tolerance(model, dofs, state.lambda, equilibrium_tol))
    throw AnalysisError("not an equilibrium");
  Stability out;
  out.threshold = stability_threshold(model);
  if (a.tangent.rows() == 0) {
    out.stable = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(length_scaled(model, dofs, a.tangent), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues()[0];
  out.stable = out.min_eigenvalue > out.threshold;
  return out;
}

Options default_options() {
  Options o;
  o.path.method = ContinuationMethod::arc_length;
  o.path.initial_step = 0.005;
  o.path.min_step = 1e-7;
  o.path.max_step = 0.02;
  o.path.max_steps = 3000;
  o.path.newton_tol = 1e-10;
  o.path.max_newton_iters = 30;
  return o;
}

double refine_limit_lambda(const Model& model, const EquilibriumPath& path, const LimitPoint& lp, DofRef control,
                           const NewtonOptions& newton) {
  const auto c = static_cast<Eigen::Index>(control.index());
  const State& lo = path.points[lp.index - 1].state;
  const State& hi = path.points[lp.index + 1].state;
  const double w_lo = lo.q[c];
  const double w_hi = hi.q[c];
  const double sign = lp.kind == LimitKind::maximum ? -1.0 : 1.0;

  auto objective = [&](double w) {
    const double f = (w - w_lo) / (w_hi - w_lo);
    State guess{lo.q + f * (hi.q - lo.q), lo.lambda + f * (hi.lambda - lo.lambda)};
    try {
      return sign * solve_displacement_controlled(model, control, w, guess, newton).state.lambda;
    } catch (const ConvergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto [w_star, value] =
      boost::math::tools::brent_find_minima(objective, std::min(w_lo, w_hi), std::max(w_lo, w_hi), 40);
  (void)w_star;
  if (!std::isfinite(value)) return lp.lambda_star;
  return sign * value;
}

Analysis analyze(const Model& model, const Options& options) {
  Analysis out;
  const NewtonOptions newton = newton_options(options.path);
  const State start = gravity_equilibrium(model, newton);
  out.first = make_stable_state(model, start);

  const double cap = options.displacement_cap * model.characteristic_length();
  const DofMap dofs(model);
  auto stop = [&](const EquilibriumPath& path) {
    const State& last = path.points.back().state;
    for (std::size_t g : dofs.free_dofs()) {
      if (g % dofs_per_node == static_cast<std::size_t>(DofKind::theta)) continue;
      if (std::abs(last.q[static_cast<Eigen::Index>(g)] - start.q[static_cast<Eigen::Index>(g)]) > cap) return true;
    }
    const auto limits = find_limit_points(path);
    if (limits.size() < 2) return false;
    // Past the second fold: done once the far branch is back at lambda >= 0,
    // or immediately when the second fold never reached negative loads.
    if (limits[1].lambda_star > 0.0) return true;
    const std::size_t n = path.points.size();
    return path.points[n - 1].state.lambda >= 0.0 && path.points[n - 2].state.lambda < 0.0 &&
           n - 1 > limits[1].index;
  };
  out.path = continue_path_from(model, options.path, start, stop);
  out.limits = find_limit_points(out.path);
  if (out.limits.empty()) return out;

  const LimitPoint& first_limit = out.limits.front();
  out.trigger_dof = trigger_dof_of(model, out.path, first_limit);
  if (first_limit.kind == LimitKind::maximum && first_limit.lambda_star > 0.0) {
    out.trigger_lambda = refine_limit_lambda(model, out.path, first_limit, *out.trigger_dof, newton);
    out.trigger_force = *out.trigger_lambda * reference_load(model).norm();
  }
  if (out.limits.size() < 2) return out;

  const auto& pts = out.path.points;
  // Saddle: lambda crosses zero between the two folds.
  for (std::size_t i = out.limits[0].index; i < out.limits[1].index && i + 1 < pts.size(); ++i) {
    if (pts[i].state.lambda > 0.0 && pts[i + 1].state.lambda <= 0.0) {
      try {
        out.saddle = polish_at_zero(model, pts[i], pts[i + 1], newton);
        out.barrier = potential_at_rest_load(model, out.saddle->q) - out.first.energy;
      } catch (const ConvergenceError&) {
      }
      break;
    }
  }

  // Far branch back at lambda = 0.
  const std::size_t n = pts.size();
  if (n < 2 || !(pts[n - 2].state.lambda < 0.0 && pts[n - 1].state.lambda >= 0.0)) return out;
  const State far = polish_at_zero(model, pts[n - 2], pts[n - 1], newton);
  const double scale = model.characteristic_length();
  if ((far.q - start.q).norm() < 1e-6 * scale) return out;
  out.second = make_stable_state(model, far);
  return out;
}

std::optional<StableState> find_second_stable_state(const Model& model, const Options& options) {
  return analyze(model, options).second;
}

double trigger_force(const Model& model, const Options& options) {
  const Analysis a = analyze(model, options);
  if (!a.trigger_force) throw AnalysisError("monostable - no trigger");
  return *a.trigger_force;
}

std::vector<LandscapeSample> energy_landscape(const Model& model, DofRef control, double from, double to,
                                              int samples, const NewtonOptions& newton) {
  if (samples < 2) throw AnalysisError("energy_landscape needs at least 2 samples");
  Model constrained = model;
  constrained.bcs.prescribed.push_back(PrescribedDof{control, from});
  const std::size_t slot = constrained.bcs.prescribed.size() - 1;
  const auto c = static_cast<Eigen::Index>(control.index());

  std::vector<LandscapeSample> out;
  VectorXd q = VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()));
  double last_value = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double value = from + (to - from) * static_cast<double>(k) / (samples - 1);
    LandscapeSample sample;
    sample.displacement = value;

    // Direct solve, then progressively finer sub-increments from the last converged sample.
    bool ok = false;
    for (int pieces = 1; pieces <= 64 && !ok; pieces *= 2) {
      VectorXd trial = q;
      try {
        for (int p = 1; p <= pieces; ++p) {
          constrained.bcs.prescribed[slot].value = last_value + (value - last_value) * p / pieces;
          trial = solve_at_load(constrained, 0.0, trial, newton).state.q;
        }
        q = trial;
        last_value = value;
        ok = true;
      } catch (const ConvergenceError&) {
      }
    }
    if (ok) {
      sample.energy = total_potential(model, q, 0.0);
      sample.reaction = full_residual(model, q, 0.0)[c];
    } else {
      sample.converged = false;
      sample.energy = std::numeric_limits<double>::quiet_NaN();
      sample.reaction = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(sample);
  }
  return out;
}

std::vector<std::size_t> landscape_minima(const std::vector<LandscapeSample>& l) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < l.size(); ++i) {
    if (!l[i - 1].converged || !l[i].converged || !l[i + 1].converged) continue;
    if (l[i].energy < l[i - 1].energy && l[i].energy < l[i + 1].energy) out.push_back(i);
  }
  return out;
}

}  // namespace snapbeam::bistability
