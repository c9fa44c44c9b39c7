#include "snapbeam/settings.hpp"

namespace snapbeam {

const char* to_string(ContinuationMethod method) {
  switch (method) {
    case ContinuationMethod::load_control:
      return "load_control";
    case ContinuationMethod::displacement_control:
      return "displacement_control";
    case ContinuationMethod::arc_length:
      return "arc_length";
  }
  return "?";
}

std::optional<ContinuationMethod> parse_method(const std::string& text) {
  if (text == "load_control") return ContinuationMethod::load_control;
  if (text == "displacement_control") return ContinuationMethod::displacement_control;
  if (text == "arc_length") return ContinuationMethod::arc_length;
  return std::nullopt;
}

std::string check_settings(const ContinuationSettings& s, const Model& model) {
  if (!(s.min_step > 0.0)) return "min_step must be positive";
  if (!(s.min_step <= s.initial_step)) return "initial_step must be >= min_step";
  if (!(s.initial_step <= s.max_step)) return "max_step must be >= initial_step";
  if (s.max_steps < 1) return "max_steps must be >= 1";
  if (!(s.newton_tol > 0.0 && s.newton_tol <= 1e-2)) return "newton_tol must be in (0, 1e-2]";
  if (s.max_newton_iters < 1) return "max_newton_iters must be >= 1";
  if (s.control_dof) {
    if (s.control_dof->node < 0 || static_cast<std::size_t>(s.control_dof->node) >= model.nodes.size())
      return "control_dof references a missing node";
    const DofMap dofs(model);
    if (!dofs.is_free(s.control_dof->index())) return "control_dof must be a free dof";
  }
  if (s.method == ContinuationMethod::displacement_control) {
    if (!s.control_dof) return "control_dof is required for displacement_control";
    if (!s.target_displacement) return "target_displacement is required for displacement_control";
  }
  if (s.target_displacement && !s.control_dof) return "target_displacement requires control_dof";
  if (s.method == ContinuationMethod::load_control && !s.target_lambda)
    return "target_lambda is required for load_control";
  return {};
}

}  // namespace snapbeam
