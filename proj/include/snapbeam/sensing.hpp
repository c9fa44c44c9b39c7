#pragma once

// Grasp-mode controller emulation and pressure-trace peak analysis.
//
// Readings use the "vacuum magnitude positive" convention and are treated as
// dimensionless sensor units.

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace snapbeam::sensing {

/// One reading: pressure in active mode, contact force [N] in passive mode.
struct Sample {
  double t = 0.0;
  double value = 0.0;
};

enum class GraspMode { passive, active };
enum class Phase { open, closing, closed, opening };

const char* to_string(Phase phase);

struct ControllerConfig {
  GraspMode mode = GraspMode::active;
  double vacuum_threshold = 10.0;
  double hysteresis_band = 0.0;
  int debounce = 1;
  double trigger_force_threshold = 0.0;
};

/// Empty when valid, otherwise a message naming the field.
std::string check(const ControllerConfig& config);

struct Event {
  double t = 0.0;
  std::string name;  ///< close_triggered, closed, release_triggered, opened
  Phase phase = Phase::open;

  friend bool operator==(const Event&, const Event&) = default;
};

struct GraspState {
  Phase phase = Phase::open;
  int above_count = 0;  ///< consecutive samples satisfying the pending transition
  std::vector<Event> events;
};

/// One controller update. Phases cycle OPEN -> CLOSING -> CLOSED -> OPENING -> OPEN.
///
/// Active mode: OPEN -> CLOSING once the reading has exceeded vacuum_threshold for
/// `debounce` consecutive samples; CLOSED -> OPENING once it has stayed below
/// vacuum_threshold - hysteresis_band for `debounce` consecutive samples.
/// Passive mode: OPEN -> CLOSING on the first contact force >= trigger_force_threshold.
/// The snapped palm is bistable, so passive CLOSED only reopens through release().
/// CLOSING -> CLOSED and OPENING -> OPEN complete on the following sample.
GraspState controller_step(GraspState state, const Sample& input, const ControllerConfig& config);

/// Commanded opening of a CLOSED gripper (positive chamber pressure).
GraspState release(GraspState state, double t);

GraspState run_controller(const std::vector<Sample>& trace, const ControllerConfig& config);

/// Sample time of the first close_triggered event, or -1 when none.
double first_close_time(const GraspState& state);

struct Peak {
  double t = 0.0;
  double value = 0.0;
  double prominence = 0.0;
};

/// Local maxima whose topographic prominence is at least min_prominence, in time
/// order. Flat tops count once, at their middle sample; end samples are never peaks.
std::vector<Peak> detect_peaks(const std::vector<Sample>& trace, double min_prominence);

/// Parses a `t,p` CSV (header required). Throws snapbeam::Error naming the line.
std::vector<Sample> read_trace_csv(std::istream& in);
void write_trace_csv(std::ostream& out, const std::vector<Sample>& trace);

/// Event log as `t,event,phase`.
void write_events_csv(std::ostream& out, const std::vector<Event>& events);

}  // namespace snapbeam::sensing
