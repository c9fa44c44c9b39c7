#include "snapbeam/sensing.hpp"

#include "snapbeam/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace snapbeam::sensing {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::open:
      return "OPEN";
    case Phase::closing:
      return "CLOSING";
    case Phase::closed:
      return "CLOSED";
    case Phase::opening:
      return "OPENING";
  }
  return "?";
}

std::string check(const ControllerConfig& c) {
  if (!(c.hysteresis_band >= 0.0)) return "hysteresis_band must be >= 0";
  if (c.debounce < 1) return "debounce must be >= 1";
  if (!std::isfinite(c.vacuum_threshold)) return "vacuum_threshold must be finite";
  if (!std::isfinite(c.trigger_force_threshold)) return "trigger_force_threshold must be finite";
  return {};
}

namespace {

void enter(GraspState& s, Phase phase, const char* event, double t) {
  s.phase = phase;
  s.above_count = 0;
  s.events.push_back(Event{t, event, phase});
}

}  // namespace

GraspState controller_step(GraspState s, const Sample& in, const ControllerConfig& c) {
  switch (s.phase) {
    case Phase::open:
      if (c.mode == GraspMode::passive) {
        if (in.value >= c.trigger_force_threshold) enter(s, Phase::closing, "close_triggered", in.t);
      } else {
        s.above_count = in.value > c.vacuum_threshold ? s.above_count + 1 : 0;
        if (s.above_count >= c.debounce) enter(s, Phase::closing, "close_triggered", in.t);
      }
      break;
    case Phase::closing:
      enter(s, Phase::closed, "closed", in.t);
      break;
    case Phase::closed:
      if (c.mode == GraspMode::active) {
        s.above_count = in.value < c.vacuum_threshold - c.hysteresis_band ? s.above_count + 1 : 0;
        if (s.above_count >= c.debounce) enter(s, Phase::opening, "release_triggered", in.t);
      }
      break;
    case Phase::opening:
      enter(s, Phase::open, "opened", in.t);
      break;
  }
  return s;
}

GraspState release(GraspState s, double t) {
  if (s.phase == Phase::closed) enter(s, Phase::opening, "release_triggered", t);
  return s;
}

GraspState run_controller(const std::vector<Sample>& trace, const ControllerConfig& config) {
  GraspState s;
  for (const Sample& sample : trace) s = controller_step(std::move(s), sample, config);
  return s;
}

double first_close_time(const GraspState& state) {
  for (const Event& e : state.events)
    if (e.phase == Phase::closing) return e.t;
  return -1.0;
}

std::vector<Peak> detect_peaks(const std::vector<Sample>& trace, double min_prominence) {
  std::vector<Peak> peaks;
  const std::size_t n = trace.size();
  auto v = [&](std::size_t i) { return trace[i].value; };

  std::size_t i = 1;
  while (n >= 3 && i + 1 < n) {
    if (!(v(i - 1) < v(i))) {
      ++i;
      continue;
    }
    std::size_t ahead = i + 1;
    while (ahead + 1 < n && v(ahead) == v(i)) ++ahead;
    if (v(ahead) < v(i)) {
      const std::size_t peak = (i + ahead - 1) / 2;
      const double height = v(peak);

      double left_min = height;
      for (std::size_t j = peak + 1; j-- > 0;) {
        if (v(j) > height) break;
        left_min = std::min(left_min, v(j));
      }
      double right_min = height;
      for (std::size_t j = peak; j < n; ++j) {
        if (v(j) > height) break;
        right_min = std::min(right_min, v(j));
      }
      const double prominence = height - std::max(left_min, right_min);
      if (prominence >= min_prominence) peaks.push_back(Peak{trace[peak].t, height, prominence});
      i = ahead;
    } else {
      i = ahead;
    }
  }
  return peaks;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<Sample> read_trace_csv(std::istream& in) {
  std::vector<Sample> trace;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header) {
      if (row != "t,p") throw Error(fmt::format("line {}: expected header 't,p'", number));
      header = true;
      continue;
    }
    const auto comma = row.find(',');
    Sample s;
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos ||
        !parse_double(row.substr(0, comma), s.t) || !parse_double(row.substr(comma + 1), s.value)) {
      throw Error(fmt::format("line {}: malformed row '{}'", number, row));
    }
    if (!trace.empty() && !(s.t > trace.back().t))
      throw Error(fmt::format("line {}: t must be strictly increasing", number));
    trace.push_back(s);
  }
  if (!header) throw Error("line 1: expected header 't,p'");
  return trace;
}

void write_trace_csv(std::ostream& out, const std::vector<Sample>& trace) {
  out << "t,p\n";
  for (const Sample& s : trace) out << fmt::format("{:.17g},{:.17g}\n", s.t, s.value);
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events) {
  out << "t,event,phase\n";
  for (const Event& e : events) out << fmt::format("{:.17g},{},{}\n", e.t, e.name, to_string(e.phase));
}

}  // namespace snapbeam::sensing
