#pragma once

#include "snapbeam/model.hpp"

#include <optional>
#include <string>

namespace snapbeam {

enum class ContinuationMethod { load_control, displacement_control, arc_length };

const char* to_string(ContinuationMethod method);
std::optional<ContinuationMethod> parse_method(const std::string& text);

/// Path-following controls.
///
/// Step sizes are dimensionless: a load increment for load control, a control
/// displacement in units of the model characteristic length for displacement
/// control, and a scaled arc length for arc-length continuation (see solver.hpp).
struct ContinuationSettings {
  ContinuationMethod method = ContinuationMethod::arc_length;
  std::optional<DofRef> control_dof;
  double initial_step = 0.01;
  double min_step = 1e-6;
  double max_step = 0.05;
  int max_steps = 500;
  double newton_tol = 1e-9;
  int max_newton_iters = 25;
  std::optional<double> target_lambda;
  std::optional<double> target_displacement;

  friend bool operator==(const ContinuationSettings&, const ContinuationSettings&) = default;
};

/// Empty string when the settings are consistent, otherwise a message naming the field.
std::string check_settings(const ContinuationSettings& settings, const Model& model);

}  // namespace snapbeam
