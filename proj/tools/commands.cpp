#include "commands.hpp"

#include "svg.hpp"

#include "snapbeam/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace snapbeam::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

void require(bool ok, const std::string& flag, const std::string& what) {
  if (!ok) throw ScenarioError("invalid parameter " + flag + ": " + what);
}

fs::path output_path(const GlobalOptions& g, const std::string& input, const std::string& suffix) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / (fs::path(input).stem().string() + suffix);
}

DofRef parse_control(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, "control", "expected node:dof");
  int node = 0;
  try {
    std::size_t used = 0;
    node = std::stoi(text.substr(0, colon), &used);
    require(used == colon, "control", "bad node id");
  } catch (const std::logic_error&) {
    require(false, "control", "bad node id");
  }
  const auto kind = parse_dof_kind(text.substr(colon + 1));
  require(kind.has_value(), "control", "dof must be u, w or theta");
  return DofRef{node, *kind};
}

json dof_json(const DofRef& d) { return json{{"node", d.node}, {"dof", to_string(d.kind)}}; }

json settings_json(const ContinuationSettings& s) {
  json j;
  j["method"] = to_string(s.method);
  j["control_dof"] = s.control_dof ? dof_json(*s.control_dof) : json(nullptr);
  j["initial_step"] = s.initial_step;
  j["min_step"] = s.min_step;
  j["max_step"] = s.max_step;
  j["max_steps"] = s.max_steps;
  j["newton_tol"] = s.newton_tol;
  j["max_newton_iters"] = s.max_newton_iters;
  j["target_lambda"] = s.target_lambda ? json(*s.target_lambda) : json(nullptr);
  j["target_displacement"] = s.target_displacement ? json(*s.target_displacement) : json(nullptr);
  return j;
}

json limits_json(const std::vector<bistability::LimitPoint>& limits) {
  json out = json::array();
  for (const auto& l : limits)
    out.push_back({{"step", l.index}, {"lambda_star", l.lambda_star}, {"kind", bistability::to_string(l.kind)}});
  return out;
}

json seed_json(const GlobalOptions& g) { return g.seed ? json(*g.seed) : json(nullptr); }

void write(const fs::path& p, const std::string& text) { write_text_file(p.string(), text); }

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Largest free translation of the last point, for scenarios without a control dof.
DofRef dominant_translation(const Model& model, const Eigen::VectorXd& q) {
  const DofMap dofs(model);
  std::size_t best = dofs.free_dofs().empty() ? 0 : dofs.free_dofs().front();
  double value = -1.0;
  for (std::size_t g : dofs.free_dofs()) {
    if (g % dofs_per_node == static_cast<std::size_t>(DofKind::theta)) continue;
    if (std::abs(q[static_cast<Eigen::Index>(g)]) > value) value = std::abs(q[static_cast<Eigen::Index>(g)]), best = g;
  }
  return DofRef{static_cast<int>(best / dofs_per_node), static_cast<DofKind>(best % dofs_per_node)};
}

}  // namespace

ContinuationSettings effective_settings(const Scenario& scenario, const SolverOverrides& o) {
  ContinuationSettings s = scenario.solver;
  if (o.method) {
    const auto m = parse_method(*o.method);
    require(m.has_value(), "method", "expected load_control, displacement_control or arc_length");
    s.method = *m;
  }
  if (o.control) s.control_dof = parse_control(*o.control);
  if (o.initial_step) s.initial_step = *o.initial_step;
  if (o.min_step) s.min_step = *o.min_step;
  if (o.max_step) s.max_step = *o.max_step;
  if (o.newton_tol) s.newton_tol = *o.newton_tol;
  if (o.target_lambda) s.target_lambda = *o.target_lambda;
  if (o.target_displacement) s.target_displacement = *o.target_displacement;
  if (o.max_steps) s.max_steps = *o.max_steps;
  if (o.max_newton_iters) s.max_newton_iters = *o.max_newton_iters;
  const std::string problem = check_settings(s, scenario.model);
  if (!problem.empty()) throw ScenarioError("invalid solver settings: " + problem);
  return s;
}

std::string path_csv(const EquilibriumPath& path) {
  std::string out = "step,lambda,energy,min_eig,det_sign";
  const Eigen::Index dofs = path.points.empty() ? 0 : path.points.front().state.q.size();
  for (Eigen::Index i = 0; i < dofs; ++i) out += fmt::format(",q_{}", i);
  out += '\n';
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    out += fmt::format("{},{},{},{},{}", k, num(p.state.lambda), num(p.energy), num(p.min_eigenvalue), p.det_sign);
    for (Eigen::Index i = 0; i < dofs; ++i) out += "," + num(p.state.q[i]);
    out += '\n';
  }
  out += fmt::format("# termination: {}\n", to_string(path.termination));
  return out;
}

std::string landscape_csv(const std::vector<bistability::LandscapeSample>& landscape) {
  std::string out = "control_displacement,energy,reaction\n";
  std::string flagged;
  for (std::size_t k = 0; k < landscape.size(); ++k) {
    const auto& s = landscape[k];
    out += fmt::format("{},{},{}\n", num(s.displacement), num(s.energy), num(s.reaction));
    if (!s.converged) flagged += fmt::format("{}{}", flagged.empty() ? "" : " ", k);
  }
  if (!flagged.empty()) out += "# not converged (row index): " + flagged + "\n";
  return out;
}

int cmd_generate(const GlobalOptions& g, const GenerateOptions& o) {
  require(o.thickness > 0.0, "thickness", "must be positive");
  require(o.width > 0.0, "width", "must be positive");
  require(o.youngs > 0.0, "youngs", "must be positive");
  require(o.density >= 0.0, "density", "must be non-negative");
  const Material material =
      rectangular_section(o.youngs, o.width, o.thickness, o.density, "demo");

  Scenario sc;
  if (o.kind == "arch") {
    scenarios::ArchSpec spec;
    spec.span = o.span;
    spec.rise = o.rise;
    spec.n_elements = o.n;
    spec.material = material;
    if (o.profile == "half_sine") spec.profile = scenarios::ArchProfile::half_sine;
    else if (o.profile == "cosine") spec.profile = scenarios::ArchProfile::cosine;
    else if (o.profile == "circular") spec.profile = scenarios::ArchProfile::circular;
    else require(false, "profile", "expected half_sine, cosine or circular");
    if (o.ends == "clamped") spec.ends = scenarios::EndCondition::clamped;
    else if (o.ends == "pinned") spec.ends = scenarios::EndCondition::pinned;
    else require(false, "ends", "expected clamped or pinned");
    sc = scenarios::arch_scenario(spec);
  } else if (o.kind == "vertical-beam") {
    sc = scenarios::vertical_beam_scenario(o.length, o.n, material, o.tip_force);
  } else if (o.kind == "von-mises") {
    sc = scenarios::von_mises_scenario(o.half_span, o.truss_rise, material);
  } else {
    require(false, "kind", "expected arch, vertical-beam or von-mises");
  }

  fs::path file = o.file;
  if (file.empty()) {
    fs::create_directories(g.out_dir);
    file = fs::path(g.out_dir) / (o.kind + ".json");
  }
  write(file, serialize(sc));
  std::cout << "wrote " << file.string() << "\n";
  return exit_ok;
}

int cmd_trace(const GlobalOptions& g, const std::string& scenario_file, const SolverOverrides& overrides) {
  const Timer timer;
  const Scenario sc = read_scenario_file(scenario_file);
  const ContinuationSettings settings = effective_settings(sc, overrides);

  const EquilibriumPath path = sc.model.load.gravity_enabled ? two_step_protocol(sc.model, settings)
                                                             : continue_path(sc.model, settings);
  const auto limits = bistability::find_limit_points(path);
  const std::optional<DofRef> control = settings.control_dof;
  const DofRef shown = control ? *control : dominant_translation(sc.model, path.points.back().state.q);
  const auto c = static_cast<Eigen::Index>(shown.index());

  json report;
  report["scenario"] = sc.name;
  report["settings"] = settings_json(settings);
  report["seed"] = seed_json(g);
  report["path"] = {{"points", path.points.size()},
                    {"termination", to_string(path.termination)},
                    {"stage_boundary", path.stage_boundary ? json(*path.stage_boundary) : json(nullptr)},
                    {"limit_points", limits_json(limits)}};
  // Path samples nearest to lambda = 0: the start and every zero crossing.
  json zero = json::array();
  auto add_zero = [&](std::size_t k) {
    const PathPoint& p = path.points[k];
    zero.push_back({{"step", k},
                    {"lambda", p.state.lambda},
                    {"energy", p.energy},
                    {"displacement_dof", dof_json(shown)},
                    {"displacement", p.state.q[c]},
                    {"stable", p.min_eigenvalue > 0.0}});
  };
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const double l = path.points[k].state.lambda;
    if (l == 0.0) {
      add_zero(k);
    } else if (k + 1 < path.points.size()) {
      const double next = path.points[k + 1].state.lambda;
      if (next != 0.0 && (l < 0.0) != (next < 0.0)) add_zero(std::abs(l) <= std::abs(next) ? k : k + 1);
    }
  }
  report["zero_load_states"] = zero;

  write(output_path(g, scenario_file, "_path.csv"), path_csv(path));
  write(output_path(g, scenario_file, "_report.json"), report.dump(2) + "\n");
  if (g.svg) write(output_path(g, scenario_file, ".svg"), path_svg(sc.model, path, control));

  std::cout << fmt::format("{}: {} points, {} limit points, {} (wall time {:.3f} s)\n", scenario_file,
                           path.points.size(), limits.size(), to_string(path.termination), timer.seconds());
  return path.termination == Termination::target_reached ? exit_ok : exit_incomplete;
}

int cmd_bistable(const GlobalOptions& g, const std::string& scenario_file, const SolverOverrides& overrides,
                 const BistableOptions& o) {
  const Timer timer;
  require(o.samples >= 3, "samples", "must be at least 3");
  const Scenario sc = read_scenario_file(scenario_file);
  bistability::Options options = bistability::default_options();
  options.path = effective_settings(sc, overrides);
  options.path.method = ContinuationMethod::arc_length;

  const bistability::Analysis a = bistability::analyze(sc.model, options);

  std::optional<DofRef> control = options.path.control_dof ? options.path.control_dof : a.trigger_dof;
  if (!control) control = dominant_translation(sc.model, a.path.points.back().state.q);
  const auto c = static_cast<Eigen::Index>(control->index());

  // Landscape range: both wells plus a quarter of their separation on each side,
  // or the explored part of the path when monostable.
  const double w1 = a.first.state.q[c];
  double w2 = w1;
  if (a.second) {
    w2 = a.second->state.q[c];
  } else {
    for (const PathPoint& p : a.path.points)
      if (std::abs(p.state.q[c] - w1) > std::abs(w2 - w1)) w2 = p.state.q[c];
    if (w2 == w1) w2 = w1 - 0.05 * sc.model.characteristic_length();
  }
  const double pad = 0.25 * (w2 - w1);
  const double from = o.from.value_or(a.second ? w1 - pad : w1);
  const double to = o.to.value_or(w2 + pad);
  const auto landscape = bistability::energy_landscape(sc.model, *control, from, to, o.samples);
  const auto minima = bistability::landscape_minima(landscape);

  json report;
  report["scenario"] = sc.name;
  report["settings"] = settings_json(options.path);
  report["seed"] = seed_json(g);
  report["monostable"] = a.monostable();
  report["path"] = {{"points", a.path.points.size()},
                    {"termination", to_string(a.path.termination)},
                    {"limit_points", limits_json(a.limits)}};
  report["control_dof"] = dof_json(*control);
  json states = json::array();
  auto add_state = [&](const char* label, const bistability::StableState& s) {
    states.push_back({{"label", label},
                      {"energy", s.energy},
                      {"control_displacement", s.state.q[c]},
                      {"stable", s.stable},
                      {"min_eigenvalue", s.min_eigenvalue}});
  };
  add_state("first", a.first);
  if (a.second) add_state("second", *a.second);
  report["stable_states"] = states;
  if (a.second) report["barrier"] = a.barrier;
  report["trigger_dof"] = a.trigger_dof ? dof_json(*a.trigger_dof) : json(nullptr);
  report["trigger_lambda"] = a.trigger_lambda ? json(*a.trigger_lambda) : json(nullptr);
  report["trigger_force"] = a.trigger_force ? json(*a.trigger_force) : json(nullptr);
  json mins = json::array();
  for (std::size_t i : minima) mins.push_back(landscape[i].displacement);
  std::size_t failed = 0;
  for (const auto& s : landscape) failed += s.converged ? 0 : 1;
  report["landscape"] = {{"samples", landscape.size()}, {"from", from}, {"to", to}, {"minima", mins},
                         {"not_converged", failed}};

  write(output_path(g, scenario_file, "_bistable.json"), report.dump(2) + "\n");
  write(output_path(g, scenario_file, "_landscape.csv"), landscape_csv(landscape));
  if (g.svg) write(output_path(g, scenario_file, "_bistable.svg"), path_svg(sc.model, a.path, control));

  std::cout << fmt::format("{}: {}{} (wall time {:.3f} s)\n", scenario_file,
                           a.monostable() ? "monostable" : "bistable",
                           a.trigger_force ? fmt::format(", trigger force {:.6g} N", *a.trigger_force) : "",
                           timer.seconds());
  return exit_ok;
}

int cmd_sense(const GlobalOptions& g, const std::string& trace_file, const SenseOptions& o) {
  sensing::ControllerConfig config;
  require(o.mode == "active" || o.mode == "passive", "mode", "expected active or passive");
  config.mode = o.mode == "active" ? sensing::GraspMode::active : sensing::GraspMode::passive;
  config.vacuum_threshold = o.threshold;
  config.hysteresis_band = o.hysteresis;
  config.debounce = o.debounce;
  config.trigger_force_threshold = o.trigger_force;
  const std::string problem = sensing::check(config);
  if (!problem.empty()) throw ScenarioError("invalid parameter " + problem);
  require(o.prominence >= 0.0, "prominence", "must be non-negative");

  std::ifstream in(trace_file);
  if (!in) throw Error("cannot read " + trace_file);
  std::vector<sensing::Sample> trace;
  try {
    trace = sensing::read_trace_csv(in);
  } catch (const Error& e) {
    throw ScenarioError(trace_file + ": " + e.what());
  }

  const sensing::GraspState state = sensing::run_controller(trace, config);
  const auto peaks = sensing::detect_peaks(trace, o.prominence);

  std::ostringstream events;
  sensing::write_events_csv(events, state.events);
  json report;
  report["trace"] = fs::path(trace_file).filename().string();
  report["config"] = {{"mode", o.mode},
                      {"vacuum_threshold", config.vacuum_threshold},
                      {"hysteresis_band", config.hysteresis_band},
                      {"debounce", config.debounce},
                      {"trigger_force_threshold", config.trigger_force_threshold}};
  report["min_prominence"] = o.prominence;
  json list = json::array();
  for (const auto& p : peaks) list.push_back({{"t", p.t}, {"value", p.value}, {"prominence", p.prominence}});
  report["peaks"] = list;
  report["final_phase"] = sensing::to_string(state.phase);

  write(output_path(g, trace_file, "_events.csv"), events.str());
  write(output_path(g, trace_file, "_peaks.json"), report.dump(2) + "\n");
  std::cout << fmt::format("{}: {} samples, {} events, {} peaks\n", trace_file, trace.size(), state.events.size(),
                           peaks.size());
  return exit_ok;
}

}  // namespace snapbeam::cli
