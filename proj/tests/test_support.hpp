#pragma once

#include <cmath>

#include "membrane/geometry.hpp"

namespace membrane::testing {

/// z = (cos y, sin y), r = 1, at rest: the static unit torus.
inline FieldState unit_torus(int n) {
  FieldState s = FieldState::at_rest(AxisymmetryShape::clifford(), n);
  for (int j = 0; j < n; ++j) {
    s.z(0, j) = std::cos(grid_point(j, n));
    s.z(1, j) = std::sin(grid_point(j, n));
  }
  return s;
}

/// Torus of revolution in R^3 with a few position and velocity modes.
inline FieldState perturbed_revolution_torus(int n) {
  FieldState s = FieldState::at_rest(AxisymmetryShape({1}, 1), n);
  for (int j = 0; j < n; ++j) {
    const double y = grid_point(j, n);
    s.z(0, j) = std::sin(y) + 0.01 * std::cos(3 * y);
    s.r(0, j) = 3.0 + std::cos(y) + 0.005 * std::cos(2 * y + 0.3);
    s.vz(0, j) = 0.015 * std::cos(2 * y);
    s.vr(0, j) = 0.025 * std::cos(y + 0.7);
  }
  return s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace membrane::testing
