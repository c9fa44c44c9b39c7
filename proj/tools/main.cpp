// snapbeam: generate scenarios, follow equilibrium paths, analyze bistability
// and emulate the grasp controller.

#include "commands.hpp"

#include "snapbeam/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <iostream>
#include <thread>

namespace {

using namespace snapbeam;
using namespace snapbeam::cli;

int guarded(const std::function<int()>& run) {
  try {
    return run();
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

// Runs one job per input file on up to `jobs` threads; returns the worst exit code.
int for_each_file(const std::vector<std::string>& files, int jobs, const std::function<int(const std::string&)>& run) {
  std::vector<int> codes(files.size(), exit_ok);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) codes[i] = guarded([&] { return run(files[i]); });
  };
  const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(files.size(), 1))));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return codes.empty() ? exit_ok : *std::max_element(codes.begin(), codes.end());
}

void add_solver_flags(CLI::App* cmd, SolverOverrides& o) {
  cmd->add_option("--method", o.method, "load_control, displacement_control or arc_length");
  cmd->add_option("--control", o.control, "control dof as node:dof, e.g. 16:w");
  cmd->add_option("--initial-step", o.initial_step);
  cmd->add_option("--min-step", o.min_step);
  cmd->add_option("--max-step", o.max_step);
  cmd->add_option("--max-steps", o.max_steps);
  cmd->add_option("--newton-tol", o.newton_tol);
  cmd->add_option("--max-newton-iters", o.max_newton_iters);
  cmd->add_option("--target-lambda", o.target_lambda);
  cmd->add_option("--target-displacement", o.target_displacement);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-rotational beam snap-through analysis and grasp-controller emulation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  unsigned seed = 0;
  app.add_option("--out", global.out_dir, "output directory")->capture_default_str();
  app.add_flag("--svg", global.svg, "also write SVG plots");
  app.add_option("--jobs", global.jobs, "parallel scenario files")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "reserved; nothing is randomized");

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "write a scenario file");
  generate->add_option("kind", gen.kind, "arch, vertical-beam or von-mises")->required();
  generate->add_option("-o,--file", gen.file, "output file (default <out>/<kind>.json)");
  generate->add_option("--span", gen.span)->capture_default_str();
  generate->add_option("--rise", gen.rise, "arch rise")->capture_default_str();
  generate->add_option("--n", gen.n, "element count")->capture_default_str();
  generate->add_option("--profile", gen.profile, "half_sine, cosine or circular")->capture_default_str();
  generate->add_option("--ends", gen.ends, "pinned or clamped")->capture_default_str();
  generate->add_option("--length", gen.length, "vertical beam length")->capture_default_str();
  generate->add_option("--tip-force", gen.tip_force, "vertical beam tip force [N]")->capture_default_str();
  generate->add_option("--half-span", gen.half_span, "truss half span")->capture_default_str();
  generate->add_option("--truss-rise", gen.truss_rise, "truss apex height")->capture_default_str();
  generate->add_option("--thickness", gen.thickness)->capture_default_str();
  generate->add_option("--width", gen.width)->capture_default_str();
  generate->add_option("--youngs", gen.youngs, "Young's modulus [Pa]")->capture_default_str();
  generate->add_option("--density", gen.density, "mass density [kg/m^3]")->capture_default_str();

  std::vector<std::string> trace_files;
  SolverOverrides trace_overrides;
  auto* trace = app.add_subcommand("trace", "follow the equilibrium path");
  trace->add_option("scenario", trace_files, "scenario file(s)")->required()->check(CLI::ExistingFile);
  add_solver_flags(trace, trace_overrides);

  std::vector<std::string> bistable_files;
  SolverOverrides bistable_overrides;
  BistableOptions bist;
  auto* bistable = app.add_subcommand("bistable", "stable states, barrier, trigger force and energy landscape");
  bistable->add_option("scenario", bistable_files, "scenario file(s)")->required()->check(CLI::ExistingFile);
  add_solver_flags(bistable, bistable_overrides);
  bistable->add_option("--samples", bist.samples, "landscape samples")->capture_default_str();
  bistable->add_option("--from", bist.from, "landscape start displacement");
  bistable->add_option("--to", bist.to, "landscape end displacement");

  std::string trace_csv;
  SenseOptions sense_opts;
  auto* sense = app.add_subcommand("sense", "run the grasp controller and peak detection on a t,p trace");
  sense->add_option("trace", trace_csv, "trace CSV")->required()->check(CLI::ExistingFile);
  sense->add_option("--mode", sense_opts.mode, "active or passive")->capture_default_str();
  sense->add_option("--threshold", sense_opts.threshold, "vacuum threshold")->capture_default_str();
  sense->add_option("--hysteresis", sense_opts.hysteresis, "hysteresis band")->capture_default_str();
  sense->add_option("--debounce", sense_opts.debounce, "consecutive samples")->capture_default_str();
  sense->add_option("--trigger-force", sense_opts.trigger_force, "passive trigger force [N]")->capture_default_str();
  sense->add_option("--prominence", sense_opts.prominence, "minimum peak prominence")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_bad_input;
  }
  if (*seed_opt) global.seed = seed;

  if (*generate) return guarded([&] { return cmd_generate(global, gen); });
  if (*trace)
    return for_each_file(trace_files, global.jobs,
                         [&](const std::string& f) { return cmd_trace(global, f, trace_overrides); });
  if (*bistable)
    return for_each_file(bistable_files, global.jobs,
                         [&](const std::string& f) { return cmd_bistable(global, f, bistable_overrides, bist); });
  return guarded([&] { return cmd_sense(global, trace_csv, sense_opts); });
}
