#pragma once

#include "snapbeam/model.hpp"
#include "snapbeam/scenario_io.hpp"

namespace snapbeam::scenarios {

/// half_sine: h sin(pi x/L). cosine: h (1 - cos(2 pi x/L)) / 2, zero slope at
/// both ends. circular: arc through the ends and the apex.
enum class ArchProfile { half_sine, cosine, circular };
enum class EndCondition { clamped, pinned };

/// Soft-silicone demo values. Implementer-chosen, not measured.
inline constexpr double demo_youngs_modulus = 1.3e6;  // Pa
inline constexpr double demo_mass_density = 1070.0;   // kg/m^3
inline constexpr double demo_width = 0.01;            // m
inline constexpr double demo_thickness = 0.005;       // m

Material demo_material(double thickness = demo_thickness, double width = demo_width);

struct ArchSpec {
  double span = 0.1;
  double rise = 0.008;
  ArchProfile profile = ArchProfile::half_sine;
  int n_elements = 32;
  Material material = demo_material();
  EndCondition ends = EndCondition::pinned;
};

/// Throws ScenarioError naming the offending parameter.
void check(const ArchSpec& spec);

/// Arch on the given profile with a unit downward reference force at the apex
/// node (index n/2). The reference geometry is stress free.
Model make_shallow_arch(const ArchSpec& spec);

/// Arch model plus arc-length settings that run past both limit points.
Scenario arch_scenario(const ArchSpec& spec);

/// Apex node of a model built by make_shallow_arch.
inline int arch_apex(const ArchSpec& spec) { return spec.n_elements / 2; }

/// Curve length of the profile, by adaptive quadrature.
double profile_arc_length(const ArchSpec& spec);

/// Vertical cantilever along +y, base clamped, gravity enabled, transverse
/// reference force tip_force along +x at the tip.
Model make_vertical_beam(double length, int n_elements, const Material& material, double tip_force);
Scenario vertical_beam_scenario(double length, int n_elements, const Material& material, double tip_force);

/// Two-bar truss with pinned supports at (0,0) and (2a,0), apex at (a,h), unit
/// downward reference force at the apex. I is replaced by 1e-8 * A * a^2.
Model make_von_mises_truss(double half_span, double rise, Material material);
Scenario von_mises_scenario(double half_span, double rise, const Material& material);

/// Horizontal cantilever of n elements along +x with a downward tip force.
Model make_cantilever(double length, int n_elements, const Material& material, double tip_force);

/// Pinned / roller beam with a downward midspan force (n even).
Model make_simply_supported(double length, int n_elements, const Material& material, double midspan_force);

}  // namespace snapbeam::scenarios
