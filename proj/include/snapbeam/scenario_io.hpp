#pragma once

// Scenario documents: JSON with top-level keys
//   name       (optional string)
//   nodes      [{id, x, y}]
//   materials  {name: {E, A, I, rho}}
//   elements   [{a, b, material}]
//   bcs        {fixed: [{node, dof}], prescribed: [{node, dof, value}]}
//   load       {forces: [{node, dof, value}], gravity: bool, gravity_vector: [gx, gy]}
//   solver     {method, control_dof: {node, dof}, initial_step, min_step, max_step,
//               max_steps, newton_tol, max_newton_iters, target_lambda, target_displacement}
// Unknown keys are rejected at every level. dof is one of "u", "w", "theta".

#include "snapbeam/model.hpp"
#include "snapbeam/settings.hpp"

#include <string>

namespace snapbeam {

struct Scenario {
  std::string name;
  Model model;
  ContinuationSettings solver;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates a scenario document. Throws ScenarioError naming the
/// offending entity on schema or validation failure.
Scenario parse_scenario(const std::string& document);

/// Model part of parse_scenario.
Model load_scenario(const std::string& document);

std::string serialize(const Scenario& scenario);
std::string serialize(const Model& model);

Scenario read_scenario_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace snapbeam
