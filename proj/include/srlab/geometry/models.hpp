#pragma once

#include <cmath>
#include <numbers>

#include "srlab/geometry/grid.hpp"
#include "srlab/geometry/pointwise.hpp"

namespace srlab::geometry {

inline const double sqrt2pi = std::sqrt(2 * std::numbers::pi);

/// X = d_x, Y = d_y - x d_z; [X,Y] = -d_z.
inline ClosedFormFrame heisenberg_frame() {
  return {[](const Point&) { return Point{1, 0, 0}; }, [](const Point& q) { return Point{0, 1, -q[0]}; }};
}

/// Heisenberg frame with Y perturbed by eps sin(z) d_x.
inline ClosedFormFrame perturbed_heisenberg_frame(double eps) {
  return {[](const Point&) { return Point{1, 0, 0}; },
          [eps](const Point& q) { return Point{eps * std::sin(q[2]), 1, -q[0]}; }};
}

/// X = d_x, Y = d_y + x^2 d_z; contact away from x = 0.
inline ClosedFormFrame martinet_frame() {
  return {[](const Point&) { return Point{1, 0, 0}; }, [](const Point& q) { return Point{0, 1, q[0] * q[0]}; }};
}

/// Periodic contact frame on T^3: X = d_z, Y = -sin z d_x + cos z d_y.
/// Reeb field cos z d_x + sin z d_y, alpha = cos z dx + sin z dy, Popp density 1.
inline ClosedFormFrame rotating_torus_frame() {
  return {[](const Point&) { return Point{0, 0, 1}; },
          [](const Point& q) { return Point{-std::sin(q[2]), std::cos(q[2]), 0}; }};
}

/// Fundamental domain of the Heisenberg lattice: x, y in [0, sqrt(2 pi)), z in [0, 2 pi).
inline ChartGrid heisenberg_chart(int n) {
  return ChartGrid({Axis{0, sqrt2pi, n, true}, Axis{0, sqrt2pi, n, true}, Axis{0, 2 * std::numbers::pi, n, true}});
}

}  // namespace srlab::geometry
