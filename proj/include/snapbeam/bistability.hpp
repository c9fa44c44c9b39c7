#pragma once

#include "snapbeam/model.hpp"
#include "snapbeam/solver.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace snapbeam::bistability {

enum class LimitKind { maximum, minimum };

const char* to_string(LimitKind kind);

struct LimitPoint {
  std::size_t index = 0;                          ///< extremal path sample
  std::pair<std::size_t, std::size_t> interval;   ///< samples bracketing the interpolated extremum
  double lambda_star = 0.0;                       ///< vertex of the parabola through index-1..index+1
  LimitKind kind = LimitKind::maximum;
};

/// One limit point per sign change of the discrete d(lambda) sequence. Samples
/// are parameterized by cumulative |dq| for the quadratic fit.
std::vector<LimitPoint> find_limit_points(const EquilibriumPath& path);

struct Stability {
  bool stable = false;
  double min_eigenvalue = 0.0;
  double threshold = 0.0;  ///< 1e-8 x largest diagonal of the rest tangent
};

/// Stable iff the smallest constrained-tangent eigenvalue exceeds the threshold.
/// Throws AnalysisError("not an equilibrium") when the residual exceeds
/// equilibrium_tol * (|lambda F_ref| + 1).
Stability classify_stability(const Model& model, const State& state, double equilibrium_tol = 1e-8);

struct StableState {
  State state;
  double energy = 0.0;  ///< total potential at lambda = 0 (strain energy when gravity is off)
  bool stable = false;
  double min_eigenvalue = 0.0;
};

struct Options {
  ContinuationSettings path;
  /// Stop following the path once any translation exceeds this multiple of the
  /// model characteristic length.
  double displacement_cap = 0.5;
};

/// Arc-length settings suited to snap-through searches.
Options default_options();

struct Analysis {
  EquilibriumPath path;
  std::vector<LimitPoint> limits;
  std::optional<DofRef> trigger_dof;  ///< largest translation of the first limit-point mode
  StableState first;
  std::optional<StableState> second;  ///< empty when monostable
  std::optional<State> saddle;        ///< lambda = 0 equilibrium on the unstable branch
  double barrier = 0.0;               ///< saddle potential minus first-well potential
  std::optional<double> trigger_lambda;
  std::optional<double> trigger_force;

  bool monostable() const { return !second.has_value(); }
};

/// Runs the full snap-through analysis: path past both limit points, the far
/// branch back to lambda = 0, Newton polish, stability, barrier and trigger force.
Analysis analyze(const Model& model, const Options& options = default_options());

/// Second stable state, or std::nullopt when the model is monostable.
std::optional<StableState> find_second_stable_state(const Model& model, const Options& options = default_options());

/// Load factor of the first limit point refined by maximizing lambda over the
/// trigger-dof displacement (displacement-controlled solves).
double refine_limit_lambda(const Model& model, const EquilibriumPath& path, const LimitPoint& limit, DofRef control,
                           const NewtonOptions& newton);

/// First limit-point load factor times |F_ref|: the smallest quasi-static push that
/// commits the structure to snap. Throws AnalysisError("monostable - no trigger").
double trigger_force(const Model& model, const Options& options = default_options());

struct LandscapeSample {
  double displacement = 0.0;
  double energy = 0.0;    ///< total potential at lambda = 0
  double reaction = 0.0;  ///< conjugate force at the control dof
  bool converged = true;
};

/// Prescribes `control` at evenly spaced values in [from, to] (lambda = 0) and
/// relaxes every other dof. Non-converged samples are flagged, not fatal.
std::vector<LandscapeSample> energy_landscape(const Model& model, DofRef control, double from, double to,
                                              int samples, const NewtonOptions& newton = {1e-10, 30, false});

/// Indices of interior local minima of the sampled energy.
std::vector<std::size_t> landscape_minima(const std::vector<LandscapeSample>& landscape);

}  // namespace snapbeam::bistability
