#pragma once

#include "snapbeam/model.hpp"
#include "snapbeam/solver.hpp"

#include <optional>
#include <string>

namespace snapbeam::cli {

/// Two panels: every k-th deformed shape (undeformed dashed) and lambda against
/// the control displacement. Without a control dof the right panel plots lambda
/// against the largest translation.
std::string path_svg(const Model& model, const EquilibriumPath& path, std::optional<DofRef> control);

}  // namespace snapbeam::cli
