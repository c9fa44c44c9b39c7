#include "elastica.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

using StateType = std::array<double, 4>;  // theta, theta', x, y over unit length

StateType integrate(double load, double curvature0) {
  StateType s{0.0, curvature0, 0.0, 0.0};
  auto rhs = [load](const StateType& z, StateType& dz, double) {
    dz[0] = z[1];
    dz[1] = load * std::cos(z[0]);
    dz[2] = std::cos(z[0]);
    dz[3] = std::sin(z[0]);
  };
  namespace odeint = boost::numeric::odeint;
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<StateType>>(1e-13, 1e-13), rhs, s,
                             0.0, 1.0, 1e-3);
  return s;
}

}  // namespace

TipPosition cantilever_elastica(double load) {
  if (load == 0.0) return {1.0, 0.0};
  // Free end carries no moment: theta'(1) = 0. The root curvature lies in [-load, 0].
  auto residual = [load](double k0) { return integrate(load, k0)[1]; };
  boost::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, -load, 0.0,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
  const StateType tip = integrate(load, 0.5 * (lo + hi));
  return {tip[2], tip[3]};
}

}  // namespace oracles
