#include "snapbeam/scenarios.hpp"

#include "snapbeam/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace snapbeam::scenarios {

namespace {

void require(bool ok, const char* parameter, const char* what) {
  if (!ok) throw ScenarioError(std::string("invalid parameter ") + parameter + ": " + what);
}

void check_material(const Material& m) {
  require(m.youngs_modulus > 0.0, "E", "must be positive");
  require(m.area > 0.0, "A", "must be positive");
  require(m.second_moment > 0.0, "I", "must be positive");
  require(m.mass_density >= 0.0, "rho", "must be non-negative");
}

// Profile height and slope at abscissa x in [0, span].
double profile_y(const ArchSpec& s, double x) {
  if (s.rise == 0.0) return 0.0;
  if (s.profile == ArchProfile::half_sine) return s.rise * std::sin(std::numbers::pi * x / s.span);
  if (s.profile == ArchProfile::cosine) return 0.5 * s.rise * (1.0 - std::cos(2.0 * std::numbers::pi * x / s.span));
  const double R = (0.25 * s.span * s.span + s.rise * s.rise) / (2.0 * s.rise);
  const double dx = x - 0.5 * s.span;
  return std::sqrt(R * R - dx * dx) - (R - s.rise);
}

double profile_slope(const ArchSpec& s, double x) {
  if (s.rise == 0.0) return 0.0;
  if (s.profile == ArchProfile::half_sine)
    return s.rise * std::numbers::pi / s.span * std::cos(std::numbers::pi * x / s.span);
  if (s.profile == ArchProfile::cosine)
    return s.rise * std::numbers::pi / s.span * std::sin(2.0 * std::numbers::pi * x / s.span);
  const double R = (0.25 * s.span * s.span + s.rise * s.rise) / (2.0 * s.rise);
  const double dx = x - 0.5 * s.span;
  return -dx / std::sqrt(R * R - dx * dx);
}

void chain(Model& m, std::size_t material) {
  for (std::size_t i = 0; i + 1 < m.nodes.size(); ++i)
    m.elements.push_back(make_element(m.nodes, static_cast<int>(i), static_cast<int>(i + 1), material));
}

void fix(Model& m, int node, std::initializer_list<DofKind> kinds) {
  for (DofKind k : kinds) m.bcs.fixed.push_back(DofRef{node, k});
}

}  // namespace

Material demo_material(double thickness, double width) {
  return rectangular_section(demo_youngs_modulus, width, thickness, demo_mass_density);
}

void check(const ArchSpec& s) {
  require(s.span > 0.0, "span", "must be positive");
  require(s.rise >= 0.0, "rise", "must be non-negative");
  require(s.n_elements >= 4, "n", "must be at least 4");
  require(s.n_elements % 2 == 0, "n", "must be even so that an apex node exists");
  if (s.profile == ArchProfile::circular) require(s.rise <= 0.5 * s.span, "rise", "circular profile needs rise <= span/2");
  check_material(s.material);
}

Model make_shallow_arch(const ArchSpec& s) {
  check(s);
  Model m;
  m.materials.push_back(s.material);
  const int n = s.n_elements;
  m.nodes.resize(static_cast<std::size_t>(n + 1));
  // Left half computed, right half mirrored so the mesh is exactly symmetric.
  for (int i = 0; i <= n / 2; ++i) {
    const double x = s.span * static_cast<double>(i) / n;
    const double y = profile_y(s, x);
    m.nodes[static_cast<std::size_t>(i)] = NodeGeom{i, x, y};
    m.nodes[static_cast<std::size_t>(n - i)] = NodeGeom{n - i, s.span - x, y};
  }
  m.nodes[static_cast<std::size_t>(n / 2)].y = s.rise;
  chain(m, 0);

  if (s.ends == EndCondition::clamped) {
    fix(m, 0, {DofKind::u, DofKind::w, DofKind::theta});
    fix(m, n, {DofKind::u, DofKind::w, DofKind::theta});
  } else {
    fix(m, 0, {DofKind::u, DofKind::w});
    fix(m, n, {DofKind::u, DofKind::w});
  }
  m.load.reference_forces.push_back(NodalForce{DofRef{n / 2, DofKind::w}, -1.0});
  return m;
}

Scenario arch_scenario(const ArchSpec& spec) {
  Scenario sc;
  sc.name = "arch";
  sc.model = make_shallow_arch(spec);
  sc.solver.method = ContinuationMethod::arc_length;
  sc.solver.control_dof = DofRef{arch_apex(spec), DofKind::w};
  sc.solver.initial_step = 0.005;
  sc.solver.min_step = 1e-7;
  sc.solver.max_step = 0.02;
  sc.solver.max_steps = 2000;
  sc.solver.newton_tol = 1e-10;
  sc.solver.max_newton_iters = 30;
  sc.solver.target_displacement = spec.rise > 0.0 ? -2.5 * spec.rise : -0.1 * spec.span;
  return sc;
}

double profile_arc_length(const ArchSpec& spec) {
  auto integrand = [&](double x) {
    const double slope = profile_slope(spec, x);
    return std::sqrt(1.0 + slope * slope);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, spec.span, 15, 1e-14);
}

Model make_vertical_beam(double length, int n, const Material& material, double tip_force) {
  require(length > 0.0, "length", "must be positive");
  require(n >= 4, "n", "must be at least 4");
  check_material(material);
  Model m;
  m.materials.push_back(material);
  for (int i = 0; i <= n; ++i) m.nodes.push_back(NodeGeom{i, 0.0, length * static_cast<double>(i) / n});
  chain(m, 0);
  fix(m, 0, {DofKind::u, DofKind::w, DofKind::theta});
  m.load.gravity_enabled = true;
  m.load.reference_forces.push_back(NodalForce{DofRef{n, DofKind::u}, tip_force});
  return m;
}

Scenario vertical_beam_scenario(double length, int n, const Material& material, double tip_force) {
  Scenario sc;
  sc.name = "vertical-beam";
  sc.model = make_vertical_beam(length, n, material, tip_force);
  sc.solver.method = ContinuationMethod::load_control;
  sc.solver.control_dof = DofRef{n, DofKind::u};
  sc.solver.initial_step = 0.05;
  sc.solver.min_step = 1e-6;
  sc.solver.max_step = 0.05;
  sc.solver.max_steps = 1000;
  sc.solver.newton_tol = 1e-10;
  sc.solver.target_lambda = 1.0;
  return sc;
}

Model make_von_mises_truss(double half_span, double rise, Material material) {
  require(half_span > 0.0, "half_span", "must be positive");
  require(rise > 0.0, "rise", "must be positive");
  material.second_moment = 1e-8 * material.area * half_span * half_span;
  check_material(material);
  Model m;
  m.materials.push_back(material);
  m.nodes = {NodeGeom{0, 0.0, 0.0}, NodeGeom{1, half_span, rise}, NodeGeom{2, 2.0 * half_span, 0.0}};
  chain(m, 0);
  fix(m, 0, {DofKind::u, DofKind::w});
  fix(m, 2, {DofKind::u, DofKind::w});
  m.load.reference_forces.push_back(NodalForce{DofRef{1, DofKind::w}, -1.0});
  return m;
}

Scenario von_mises_scenario(double half_span, double rise, const Material& material) {
  Scenario sc;
  sc.name = "von-mises";
  sc.model = make_von_mises_truss(half_span, rise, material);
  sc.solver.method = ContinuationMethod::arc_length;
  sc.solver.control_dof = DofRef{1, DofKind::w};
  sc.solver.initial_step = 0.005;
  sc.solver.min_step = 1e-8;
  sc.solver.max_step = 0.02;
  sc.solver.max_steps = 2000;
  sc.solver.newton_tol = 1e-10;
  sc.solver.max_newton_iters = 30;
  sc.solver.target_displacement = -2.5 * rise;
  return sc;
}

Model make_cantilever(double length, int n, const Material& material, double tip_force) {
  require(length > 0.0, "length", "must be positive");
  require(n >= 1, "n", "must be at least 1");
  Model m;
  m.materials.push_back(material);
  for (int i = 0; i <= n; ++i) m.nodes.push_back(NodeGeom{i, length * static_cast<double>(i) / n, 0.0});
  chain(m, 0);
  fix(m, 0, {DofKind::u, DofKind::w, DofKind::theta});
  m.load.reference_forces.push_back(NodalForce{DofRef{n, DofKind::w}, -tip_force});
  return m;
}

Model make_simply_supported(double length, int n, const Material& material, double midspan_force) {
  require(length > 0.0, "length", "must be positive");
  require(n >= 2 && n % 2 == 0, "n", "must be even");
  Model m;
  m.materials.push_back(material);
  for (int i = 0; i <= n; ++i) m.nodes.push_back(NodeGeom{i, length * static_cast<double>(i) / n, 0.0});
  chain(m, 0);
  fix(m, 0, {DofKind::u, DofKind::w});
  fix(m, n, {DofKind::w});
  m.load.reference_forces.push_back(NodalForce{DofRef{n / 2, DofKind::w}, -midspan_force});
  return m;
}

}  // namespace snapbeam::scenarios
