#include "snapbeam/assembly.hpp"
#include "snapbeam/bistability.hpp"
#include "snapbeam/errors.hpp"
#include "snapbeam/scenarios.hpp"

#include "../oracles/bisection.hpp"
#include "../oracles/minimize.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace snapbeam;
namespace bi = snapbeam::bistability;

namespace {

EquilibriumPath synthetic(const std::vector<double>& s, double (*f)(double)) {
  EquilibriumPath path;
  for (double v : s) {
    PathPoint p;
    p.state.q = Eigen::VectorXd::Constant(1, v);
    p.state.lambda = f(v);
    path.points.push_back(p);
  }
  return path;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

// One analysis of the default arch shared by the test cases.
const bi::Analysis& default_analysis() {
  static const bi::Analysis a = bi::analyze(scenarios::make_shallow_arch({}));
  return a;
}

const DofRef apex{scenarios::arch_apex({}), DofKind::w};

double at(const Eigen::VectorXd& q, DofRef d) { return q[static_cast<Eigen::Index>(d.index())]; }

Model straight_beam() {
  scenarios::ArchSpec spec;
  spec.rise = 0.0;
  return scenarios::make_shallow_arch(spec);
}

// Rest configuration mirrored through the chord: y -> -y, slope -> -slope.
Eigen::VectorXd mirrored(const Model& m) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dof_count()));
  for (std::size_t i = 0; i < m.nodes.size(); ++i) q[static_cast<Eigen::Index>(3 * i + 1)] = -2.0 * m.nodes[i].y;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const std::size_t l = i == 0 ? 0 : i - 1, r = std::min(i + 1, m.nodes.size() - 1);
    const double slope = std::atan2(m.nodes[r].y - m.nodes[l].y, m.nodes[r].x - m.nodes[l].x);
    q[static_cast<Eigen::Index>(3 * i + 2)] = -2.0 * slope;
  }
  return q;
}

}  // namespace

TEST_CASE("limit points of synthetic paths") {
  const auto s = linspace(0.0, 2 * std::numbers::pi, 200);
  const EquilibriumPath path = synthetic(s, [](double v) { return std::sin(v); });
  const auto limits = bi::find_limit_points(path);
  REQUIRE(limits.size() == 2);
  CHECK(limits[0].kind == bi::LimitKind::maximum);
  CHECK(limits[1].kind == bi::LimitKind::minimum);
  CHECK(std::abs(limits[0].lambda_star - 1.0) < 1e-3);
  CHECK(std::abs(limits[1].lambda_star + 1.0) < 1e-3);
  CHECK(std::abs(s[limits[0].index] - std::numbers::pi / 2) < 2 * (s[1] - s[0]));
  CHECK(std::abs(s[limits[1].index] - 3 * std::numbers::pi / 2) < 2 * (s[1] - s[0]));
  for (const auto& lp : limits) {
    const double a = path.points[lp.interval.first].state.lambda, b = path.points[lp.interval.second].state.lambda;
    CHECK(lp.interval.second == lp.interval.first + 1);
    CHECK(std::abs(lp.lambda_star) >= std::min(std::abs(a), std::abs(b)));
  }

  CHECK(bi::find_limit_points(synthetic(s, [](double v) { return v * v * v + v; })).empty());
  CHECK(bi::find_limit_points(synthetic({0.0, 1.0}, [](double v) { return v; })).empty());
}

TEST_CASE("reversing a path keeps the limit load factors") {
  const auto s = linspace(0.0, 2 * std::numbers::pi, 200);
  EquilibriumPath path = synthetic(s, [](double v) { return std::sin(v); });
  const auto forward = bi::find_limit_points(path);
  std::reverse(path.points.begin(), path.points.end());
  const auto backward = bi::find_limit_points(path);
  REQUIRE(backward.size() == forward.size());
  for (std::size_t i = 0; i < forward.size(); ++i) {
    const auto& f = forward[i];
    const auto& b = backward[forward.size() - 1 - i];
    CHECK(b.lambda_star == doctest::Approx(f.lambda_star).epsilon(1e-12));
    // An extremum of lambda stays the same extremum whichever way it is traversed.
    CHECK(b.kind == f.kind);
    CHECK(b.index == path.points.size() - 1 - f.index);
  }
}

TEST_CASE("default arch analysis") {
  const bi::Analysis& a = default_analysis();
  const Model m = scenarios::make_shallow_arch({});
  const scenarios::ArchSpec spec;

  REQUIRE(a.limits.size() == 2);
  CHECK(a.limits[0].kind == bi::LimitKind::maximum);
  CHECK(a.limits[0].lambda_star > 0.0);
  CHECK(a.limits[1].kind == bi::LimitKind::minimum);
  REQUIRE_FALSE(a.monostable());

  SUBCASE("both wells are stable equilibria") {
    for (const bi::StableState* s : {&a.first, &*a.second}) {
      CHECK(s->stable);
      CHECK(s->state.lambda == 0.0);
      const bi::Stability st = bi::classify_stability(m, s->state);
      CHECK(st.stable);
      CHECK(st.min_eigenvalue > st.threshold);
      CHECK(s->min_eigenvalue == doctest::Approx(st.min_eigenvalue));
    }
    CHECK(at(a.second->state.q, apex) < -spec.rise);
  }
  SUBCASE("the second state is the inverted arch") {
    const double w = at(a.second->state.q, apex);
    CHECK(std::abs(w + 2 * spec.rise) < 0.15 * 2 * spec.rise);
    const oracles::Minimum ref = oracles::minimize_potential(m, mirrored(m), 0.0);
    CHECK(std::abs(at(ref.q, apex) - w) < 1e-4 * std::abs(w));
    CHECK((ref.q - a.second->state.q).norm() < 1e-4 * a.second->state.q.norm());
    CHECK(ref.energy == doctest::Approx(a.second->energy).epsilon(1e-6));
  }
  SUBCASE("barrier separates the wells") {
    CHECK(a.barrier > 0.0);
    REQUIRE(a.saddle.has_value());
    const double saddle_energy = total_potential(m, a.saddle->q, 0.0);
    CHECK(saddle_energy > a.first.energy);
    CHECK(saddle_energy > a.second->energy);
    CHECK(a.barrier == doctest::Approx(saddle_energy - a.first.energy));
    CHECK_FALSE(bi::classify_stability(m, *a.saddle).stable);
  }
  SUBCASE("states between the limit points are unstable") {
    const std::size_t mid = (a.limits[0].index + a.limits[1].index) / 2;
    CHECK(a.path.points[mid].min_eigenvalue < 0.0);
    CHECK_FALSE(bi::classify_stability(m, a.path.points[mid].state).stable);
    CHECK(bi::classify_stability(m, a.path.points[1].state).stable);
  }
  SUBCASE("trigger dof and force") {
    REQUIRE(a.trigger_dof.has_value());
    CHECK(*a.trigger_dof == apex);
    REQUIRE(a.trigger_force.has_value());
    CHECK(*a.trigger_force == doctest::Approx(*a.trigger_lambda * reference_load(m).norm()));
    CHECK(*a.trigger_lambda >= a.path.points[a.limits[0].index].state.lambda);
  }
}

TEST_CASE("classification rejects non-equilibria") {
  const Model m = scenarios::make_shallow_arch({});
  State s{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dof_count())), 0.5};
  CHECK_THROWS_WITH_AS(bi::classify_stability(m, s), doctest::Contains("not an equilibrium"), AnalysisError);
}

TEST_CASE("stability does not depend on node numbering") {
  const bi::Analysis& a = default_analysis();
  const Model m = scenarios::make_shallow_arch({});
  const std::size_t n = m.nodes.size();
  // Reverse the node ids: node i becomes n-1-i.
  auto relabel = [&](int id) { return static_cast<int>(n) - 1 - id; };
  Model p = m;
  for (std::size_t i = 0; i < n; ++i) {
    p.nodes[i] = m.nodes[n - 1 - i];
    p.nodes[i].id = static_cast<int>(i);
  }
  for (Element& e : p.elements) e = make_element(p.nodes, relabel(e.node_a), relabel(e.node_b), e.material);
  for (DofRef& d : p.bcs.fixed) d.node = relabel(d.node);
  for (NodalForce& f : p.load.reference_forces) f.dof.node = relabel(f.dof.node);
  auto permute = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd out(q.size());
    for (std::size_t i = 0; i < n; ++i)
      out.segment<3>(static_cast<Eigen::Index>(3 * i)) = q.segment<3>(static_cast<Eigen::Index>(3 * (n - 1 - i)));
    return out;
  };
  const std::vector<State> states{a.first.state, a.second->state, *a.saddle,
                                  a.path.points[a.limits[0].index + 3].state};
  for (const State& s : states) {
    const bi::Stability x = bi::classify_stability(m, s);
    const bi::Stability y = bi::classify_stability(p, State{permute(s.q), s.lambda});
    CHECK(x.stable == y.stable);
    CHECK(y.min_eigenvalue == doctest::Approx(x.min_eigenvalue).epsilon(1e-8));
  }
}

TEST_CASE("a straight beam is monostable") {
  const Model m = straight_beam();
  CHECK_FALSE(bi::find_second_stable_state(m).has_value());
  CHECK(bi::analyze(m).monostable());
  CHECK_THROWS_WITH_AS(bi::trigger_force(m), doctest::Contains("monostable"), AnalysisError);

  Model flat = m;
  flat.load.gravity_enabled = false;
  const auto land = bi::energy_landscape(flat, apex, -0.01, 0.01, 41);
  const auto minima = bi::landscape_minima(land);
  REQUIRE(minima.size() == 1);
  CHECK(std::abs(land[minima[0]].displacement) < 1e-12);
}

TEST_CASE("energy landscape of the default arch") {
  const bi::Analysis& a = default_analysis();
  const Model m = scenarios::make_shallow_arch({});
  const double w1 = at(a.first.state.q, apex), w2 = at(a.second->state.q, apex);
  const double pad = 0.25 * std::abs(w1 - w2);
  const int samples = 201;
  const auto land = bi::energy_landscape(m, apex, std::max(w1, w2) + pad, std::min(w1, w2) - pad, samples);
  REQUIRE(land.size() == static_cast<std::size_t>(samples));
  for (const auto& s : land) CHECK(s.converged);

  const auto minima = bi::landscape_minima(land);
  REQUIRE(minima.size() == 2);
  const double spacing = std::abs(land[1].displacement - land[0].displacement);
  CHECK(std::abs(land[minima[0]].displacement - w1) <= spacing);
  CHECK(std::abs(land[minima[1]].displacement - w2) <= spacing);

  // One interior maximum between the wells.
  int maxima = 0;
  for (std::size_t i = minima[0] + 1; i < minima[1]; ++i)
    if (land[i].energy > land[i - 1].energy && land[i].energy > land[i + 1].energy) ++maxima;
  CHECK(maxima == 1);

  // The reaction is the derivative of the energy along the sweep.
  double scale = 0.0;
  for (const auto& s : land) scale = std::max(scale, std::abs(s.reaction));
  const double h = land[1].displacement - land[0].displacement;
  for (std::size_t i = 1; i + 1 < land.size(); ++i) {
    const double fd = (land[i + 1].energy - land[i - 1].energy) / (2 * h);
    CHECK(std::abs(fd - land[i].reaction) <= 0.01 * std::max(std::abs(land[i].reaction), 0.1 * scale));
  }
  // Reaction vanishes at the wells.
  const auto ends = bi::energy_landscape(m, apex, w1, w2, 2);
  CHECK(std::abs(ends[0].reaction) < 1e-6 * scale);
  CHECK(std::abs(ends[1].reaction) < 1e-6 * scale);
}

TEST_CASE("trigger force grows with the arch rise") {
  double previous = 0.0;
  for (double k : {4.0, 6.0, 8.0}) {
    scenarios::ArchSpec spec;
    spec.material = scenarios::demo_material(0.001);
    spec.rise = k * 0.001;
    const double f = bi::trigger_force(scenarios::make_shallow_arch(spec));
    CHECK(f > previous);
    previous = f;
  }
}

TEST_CASE("trigger force matches load-control bisection") {
  const bi::Analysis& a = default_analysis();
  const Model m = scenarios::make_shallow_arch({});
  const double lambda = oracles::load_control_limit(m, apex, 0.5 * scenarios::ArchSpec{}.rise, 0.01, 1e-3);
  const double force = lambda * reference_load(m).norm();
  CHECK(std::abs(force - *a.trigger_force) < 1e-3 * *a.trigger_force);
}

TEST_CASE("trigger force does not depend on the reference load magnitude") {
  const Model m = scenarios::make_shallow_arch({});
  const double base = bi::trigger_force(m);
  for (double scale : {1e-3, 7.5, 1e3}) {
    Model s = m;
    for (NodalForce& f : s.load.reference_forces) f.value *= scale;
    CHECK(std::abs(bi::trigger_force(s) - base) < 1e-9 * base);
  }
}
