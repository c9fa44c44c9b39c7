#pragma once

#include "snapbeam/bistability.hpp"
#include "snapbeam/scenario_io.hpp"
#include "snapbeam/scenarios.hpp"
#include "snapbeam/sensing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace snapbeam::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;      // analysis could not run
inline constexpr int exit_bad_input = 2;    // invalid parameter or unreadable input
inline constexpr int exit_incomplete = 3;   // partial path written, termination flagged

struct GlobalOptions {
  std::string out_dir = ".";
  bool svg = false;
  int jobs = 1;
  std::optional<unsigned> seed;  // reserved: nothing is randomized
};

struct GenerateOptions {
  std::string kind;  // arch, vertical-beam, von-mises
  std::string file;  // default <out>/<kind>.json
  // arch
  double span = 0.1;
  double rise = 0.008;
  int n = 32;
  std::string profile = "half_sine";
  std::string ends = "pinned";
  // vertical beam
  double length = 0.05;
  double tip_force = 0.01;
  // von Mises truss
  double half_span = 0.05;
  double truss_rise = 0.005;
  // section and material
  double thickness = scenarios::demo_thickness;
  double width = scenarios::demo_width;
  double youngs = scenarios::demo_youngs_modulus;
  double density = scenarios::demo_mass_density;
};

/// Solver flags; unset fields keep the scenario-file values.
struct SolverOverrides {
  std::optional<std::string> method;
  std::optional<std::string> control;  // "node:dof"
  std::optional<double> initial_step, min_step, max_step, newton_tol, target_lambda, target_displacement;
  std::optional<int> max_steps, max_newton_iters;
};

struct BistableOptions {
  int samples = 201;
  std::optional<double> from, to;
};

struct SenseOptions {
  std::string mode = "active";
  double threshold = 10.0;
  double hysteresis = 0.0;
  int debounce = 1;
  double trigger_force = 0.0;
  double prominence = 1.0;
};

/// Applies overrides; throws ScenarioError naming the flag on bad values.
ContinuationSettings effective_settings(const Scenario& scenario, const SolverOverrides& overrides);

int cmd_generate(const GlobalOptions& global, const GenerateOptions& options);
int cmd_trace(const GlobalOptions& global, const std::string& scenario_file, const SolverOverrides& overrides);
int cmd_bistable(const GlobalOptions& global, const std::string& scenario_file, const SolverOverrides& overrides,
                 const BistableOptions& options);
int cmd_sense(const GlobalOptions& global, const std::string& trace_file, const SenseOptions& options);

/// Path CSV: `step,lambda,energy,min_eig,det_sign,q_0,...` then a `# termination:` line.
std::string path_csv(const EquilibriumPath& path);

/// Landscape CSV: `control_displacement,energy,reaction` (+ `converged` comment for flagged rows).
std::string landscape_csv(const std::vector<bistability::LandscapeSample>& landscape);

}  // namespace snapbeam::cli
