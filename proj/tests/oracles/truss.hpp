#pragma once
// Exact one-dof reduction of the symmetric two-bar truss: the apex moves
// vertically by w (positive downward), each bar has length
// L(w) = sqrt(a^2 + (h - w)^2) and the apex equilibrium force is
// P(w) = 2 EA (L0 - L)/L0 * (h - w)/L.

#include <boost/math/tools/minima.hpp>

#include <cmath>

namespace oracles {

struct Truss {
  double a = 0.0;   // half span
  double h = 0.0;   // rise
  double ea = 0.0;  // axial stiffness

  double L0() const { return std::hypot(a, h); }
  double length(double w) const { return std::hypot(a, h - w); }
  double force(double w) const { return 2.0 * ea * (L0() - length(w)) / L0() * (h - w) / length(w); }

  /// Peak of P(w) on (0, h).
  double limit_load() const {
    auto neg = [this](double w) { return -force(w); };
    return -boost::math::tools::brent_find_minima(neg, 0.0, h, 52).second;
  }
  /// Inverted stable state: P = 0 with the bars back at their rest length.
  double far_state() const { return 2.0 * h; }
};

}  // namespace oracles
