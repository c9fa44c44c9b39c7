#include "snapbeam/bistability.hpp"
#include "snapbeam/errors.hpp"
#include "snapbeam/scenarios.hpp"
#include "snapbeam/sensing.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace snapbeam;
using namespace snapbeam::sensing;

namespace {

std::vector<Sample> trace_of(const std::vector<double>& values) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({static_cast<double>(i), values[i]});
  return out;
}

ControllerConfig active(double threshold, int debounce, double band = 0.0) {
  ControllerConfig c;
  c.mode = GraspMode::active;
  c.vacuum_threshold = threshold;
  c.debounce = debounce;
  c.hysteresis_band = band;
  return c;
}

int count(const GraspState& s, const std::string& name) {
  int n = 0;
  for (const Event& e : s.events) n += e.name == name;
  return n;
}

// Random walk with occasional jumps, the kind of signal a chamber sensor gives.
std::vector<Sample> random_trace(std::mt19937& rng, std::size_t n) {
  std::normal_distribution<double> step(0.0, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  double p = 0.0;
  for (auto& x : v) {
    p += step(rng);
    if (unit(rng) < 0.05) p += 8.0 * (unit(rng) - 0.5);
    p = std::clamp(p, -5.0, 25.0);
    x = p;
  }
  return trace_of(v);
}

std::vector<Sample> bundled_trace() {
  std::ifstream in(std::string(SNAPBEAM_DATA) + "/opening_trace.csv");
  REQUIRE(in);
  return read_trace_csv(in);
}

}  // namespace

TEST_CASE("constant zero trace stays open") {
  const GraspState s = run_controller(trace_of(std::vector<double>(200, 0.0)), active(10, 1));
  CHECK(s.phase == Phase::open);
  CHECK(s.events.empty());
  CHECK(first_close_time(s) == -1.0);
}

TEST_CASE("debounced closing on a hand-simulated trace") {
  const GraspState s = run_controller(trace_of({0, 0, 11, 11, 11, 11, 11, 11}), active(10, 3));
  CHECK(count(s, "close_triggered") == 1);
  CHECK(first_close_time(s) == 4.0);
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0] == Event{4.0, "close_triggered", Phase::closing});
  CHECK(s.events[1] == Event{5.0, "closed", Phase::closed});
  CHECK(s.phase == Phase::closed);

  // Two above-threshold samples are not enough.
  CHECK(run_controller(trace_of({0, 11, 11, 0, 11, 11, 0}), active(10, 3)).events.empty());
  // Exactly at the threshold does not exceed it.
  CHECK(run_controller(trace_of({10, 10, 10, 10}), active(10, 1)).events.empty());
}

TEST_CASE("full active cycle") {
  const GraspState s = run_controller(trace_of({0, 12, 12, 12, 9, 7, 4, 3, 3, 0}), active(10, 2, 5));
  std::vector<std::string> names;
  for (const Event& e : s.events) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"close_triggered", "closed", "release_triggered", "opened"});
  CHECK(s.events[2].t == 7.0);  // second consecutive reading below 10 - 5
  CHECK(s.phase == Phase::open);
}

TEST_CASE("passive mode closes at the mechanical trigger force") {
  const double trigger = bistability::trigger_force(scenarios::make_shallow_arch({}));
  ControllerConfig c;
  c.mode = GraspMode::passive;
  c.trigger_force_threshold = trigger;
  std::vector<double> ramp;
  for (int i = 0; i <= 100; ++i) ramp.push_back(2.0 * trigger * i / 100.0);
  const std::vector<Sample> trace = trace_of(ramp);
  GraspState s = run_controller(trace, c);
  std::size_t first = 0;
  while (trace[first].value < trigger) ++first;
  CHECK(first_close_time(s) == trace[first].t);
  CHECK(count(s, "close_triggered") == 1);
  CHECK(s.phase == Phase::closed);

  // A snapped palm stays closed when the force goes away, until released.
  s = controller_step(s, {101, 0.0}, c);
  CHECK(s.phase == Phase::closed);
  s = release(s, 102);
  CHECK(s.phase == Phase::opening);
  s = controller_step(s, {103, 0.0}, c);
  CHECK(s.phase == Phase::open);
}

TEST_CASE("configuration checks") {
  CHECK(check(active(10, 1)).empty());
  CHECK(check(active(10, 0)).find("debounce") != std::string::npos);
  CHECK(check(active(10, 1, -1)).find("hysteresis") != std::string::npos);
}

TEST_CASE("controller properties over randomized traces") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> thr(2.0, 20.0), delta(0.0, 5.0);
  std::uniform_int_distribution<int> debounce(1, 5);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<Sample> trace = random_trace(rng, 150);
    const double t1 = thr(rng), t2 = t1 + delta(rng);
    const int d = debounce(rng);

    const GraspState a = run_controller(trace, active(t1, d, 1.0));
    const GraspState b = run_controller(trace, active(t1, d, 1.0));
    CHECK(a.events == b.events);

    const double c1 = first_close_time(run_controller(trace, active(t1, d)));
    const double c2 = first_close_time(run_controller(trace, active(t2, d)));
    if (c2 >= 0.0) {
      CHECK(c1 >= 0.0);
      CHECK(c2 >= c1);
    }

    // The first close fires on the d-th consecutive reading above the threshold
    // and not before.
    if (c1 >= 0.0) {
      const auto i = static_cast<std::size_t>(c1);
      for (std::size_t j = i + 1 - static_cast<std::size_t>(d); j <= i; ++j) CHECK(trace[j].value > t1);
      int run = 0;
      for (std::size_t j = 0; j < i; ++j) {
        run = trace[j].value > t1 ? run + 1 : 0;
        CHECK(run < d);
      }
    }
  }
}

TEST_CASE("hysteresis wider than the noise gives one close/open pair") {
  std::mt19937 rng(7);
  for (int k = 0; k < 1000; ++k) {
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    std::vector<double> v(20, 0.0);
    for (int i = 0; i < 100; ++i) v.push_back(10.0 + 0.9 * noise(rng));
    v.insert(v.end(), 20, 0.0);
    const GraspState s = run_controller(trace_of(v), active(10.0, 1 + k % 3, 1.0));
    CHECK(count(s, "close_triggered") <= 1);
    CHECK(count(s, "release_triggered") <= 1);
  }
}

TEST_CASE("peak detection") {
  SUBCASE("bundled opening trace has the two chamber peaks") {
    const auto peaks = detect_peaks(bundled_trace(), 1.0);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].value == 13.0);
    CHECK(peaks[1].value == 11.0);
    CHECK(peaks[0].t < peaks[1].t);
  }
  SUBCASE("constant trace") { CHECK(detect_peaks(trace_of(std::vector<double>(50, 3.0)), 0.1).empty()); }
  SUBCASE("triangular pulse below the prominence") {
    const auto pulse = trace_of({0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0});
    CHECK(detect_peaks(pulse, 6.0).empty());
    const auto p = detect_peaks(pulse, 5.0);
    REQUIRE(p.size() == 1);
    CHECK(p[0].t == 5.0);
    CHECK(p[0].prominence == 5.0);
  }
  SUBCASE("prominence is measured from the higher saddle") {
    const auto p = detect_peaks(trace_of({0, 13, 6, 11, 0}), 1.0);
    REQUIRE(p.size() == 2);
    CHECK(p[0].prominence == 13.0);
    CHECK(p[1].prominence == 5.0);
    CHECK(detect_peaks(trace_of({0, 13, 6, 11, 0}), 5.5).size() == 1);
  }
  SUBCASE("flat tops count once") {
    const auto p = detect_peaks(trace_of({0, 4, 4, 4, 0}), 1.0);
    REQUIRE(p.size() == 1);
    CHECK(p[0].t == 2.0);
  }
  SUBCASE("time re-indexing does not change the peaks") {
    const auto base = bundled_trace();
    std::vector<Sample> moved = base;
    for (Sample& s : moved) s.t = 2.5 * s.t - 40.0;
    const auto a = detect_peaks(base, 1.0), b = detect_peaks(moved, 1.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].value == b[i].value);
      CHECK(b[i].t == 2.5 * a[i].t - 40.0);
    }
  }
}

TEST_CASE("trace csv") {
  std::istringstream good("t,p\n0,1.5\n1,2\n2,-0.25\n");
  const auto trace = read_trace_csv(good);
  REQUIRE(trace.size() == 3);
  CHECK(trace[2].value == -0.25);

  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream back(out.str());
  const auto again = read_trace_csv(back);
  REQUIRE(again.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].value == trace[i].value);

  std::istringstream bad_row("t,p\n0,1\n1,abc\n");
  CHECK_THROWS_WITH_AS(read_trace_csv(bad_row), doctest::Contains("line 3"), Error);
  std::istringstream no_header("0,1\n");
  CHECK_THROWS_WITH_AS(read_trace_csv(no_header), doctest::Contains("header"), Error);
  std::istringstream backwards("t,p\n0,1\n0,2\n");
  CHECK_THROWS_WITH_AS(read_trace_csv(backwards), doctest::Contains("strictly increasing"), Error);

  std::ostringstream events;
  write_events_csv(events, {{4, "close_triggered", Phase::closing}});
  CHECK(events.str() == "t,event,phase\n4,close_triggered,CLOSING\n");
}
