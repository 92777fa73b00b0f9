#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/geometry/grid.hpp"

namespace srlab::ergodic {

using geometry::Point;
using Field = std::function<Point(const Point&)>;
using Observable = std::function<double(const Point&)>;

/// Chart box; periodic axes wrap, open axes are walls.
struct ChartBox {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{1, 1, 1};
  std::array<bool, 3> periodic{true, true, true};

  Point reduce(const Point& q) const {
    Point r = q;
    for (std::size_t d = 0; d < 3; ++d) {
      if (!periodic[d]) continue;
      const double L = hi[d] - lo[d];
      r[d] = q[d] - std::floor((q[d] - lo[d]) / L) * L;
      if (r[d] >= hi[d]) r[d] = lo[d];  // floor rounding at the seam
    }
    return r;
  }
  bool inside(const Point& q) const {
    for (std::size_t d = 0; d < 3; ++d)
      if (!periodic[d] && (q[d] < lo[d] || q[d] > hi[d])) return false;
    return true;
  }
};

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Point> points;  // reduced into the chart
  double step = 0;
  Point final_unreduced{0, 0, 0};
  double error_estimate = 0;  // |y(dt) - y(dt/2)| * 16/15 at the final time; 0 if not requested
};

namespace detail {

inline Point axpy(const Point& y, double a, const Point& k) { return {y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]}; }

inline Point rk4_step(const Field& V, const ChartBox& chart, const Point& y, double h) {
  auto f = [&](const Point& q) { return V(chart.reduce(q)); };
  const Point k1 = f(y);
  const Point k2 = f(axpy(y, h / 2, k1));
  const Point k3 = f(axpy(y, h / 2, k2));
  const Point k4 = f(axpy(y, h, k3));
  Point out;
  for (std::size_t d = 0; d < 3; ++d) out[d] = y[d] + h / 6 * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
  return out;
}

// Integrates unreduced coordinates; V is always sampled at the reduced point.
inline Point run(const Field& V, const ChartBox& chart, Point y, double dt, long steps, std::vector<Point>* samples,
                 bool check_escape) {
  if (samples) samples->push_back(chart.reduce(y));
  for (long i = 1; i <= steps; ++i) {
    y = rk4_step(V, chart, y, dt);
    if (check_escape && !chart.inside(y)) throw EscapeError("trajectory left the chart", static_cast<double>(i) * dt);
    if (samples) samples->push_back(chart.reduce(y));
  }
  return y;
}

}  // namespace detail

/// Classical RK4 with fixed step. The number of steps is round(T/dt); times are i*dt.
inline FlowTrajectory integrate_flow(const Field& V, const Point& q0, double T, double dt, const ChartBox& chart,
                                     bool estimate_error = true) {
  if (!(dt > 0) || !(T >= dt)) throw InvariantViolation("integrate_flow: need dt > 0 and T >= dt");
  if (!chart.inside(q0)) throw EscapeError("initial point outside the chart", 0.0);
  const long steps = std::lround(T / dt);
  FlowTrajectory tr;
  tr.step = dt;
  tr.points.reserve(static_cast<std::size_t>(steps) + 1);
  tr.final_unreduced = detail::run(V, chart, q0, dt, steps, &tr.points, true);
  tr.times.resize(tr.points.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) tr.times[i] = static_cast<double>(i) * dt;
  if (estimate_error) {
    const Point fine = detail::run(V, chart, q0, dt / 2, 2 * steps, nullptr, true);
    double e = 0;
    for (std::size_t d = 0; d < 3; ++d) e = std::max(e, std::abs(fine[d] - tr.final_unreduced[d]));
    tr.error_estimate = e * 16.0 / 15.0;
  }
  return tr;
}

/// Trilinear interpolation of a grid field (periodic axes wrap, open axes clamp).
inline Field interpolate(const geometry::VectorFieldSpec& V) {
  return [V](const Point& q) {
    const auto& g = V.grid();
    std::array<int, 3> i0{}, i1{};
    std::array<double, 3> t{};
    for (int d = 0; d < 3; ++d) {
      const auto& a = g.axis(d);
      const auto ud = static_cast<std::size_t>(d);
      double s = (q[ud] - a.lo) / a.spacing();
      if (a.periodic) {
        s -= std::floor(s / a.n) * a.n;
        i0[ud] = static_cast<int>(std::floor(s)) % a.n;
        i1[ud] = (i0[ud] + 1) % a.n;
      } else {
        s = std::clamp(s, 0.0, static_cast<double>(a.n - 1));
        i0[ud] = std::min(static_cast<int>(std::floor(s)), a.n - 2);
        i1[ud] = i0[ud] + 1;
      }
      t[ud] = s - std::floor(s);
      if (!a.periodic && s >= a.n - 1) t[ud] = 1.0;
    }
    Point out{0, 0, 0};
    for (int c = 0; c < 8; ++c) {
      const int a = c & 1, b = (c >> 1) & 1, e = (c >> 2) & 1;
      const double w = (a ? t[0] : 1 - t[0]) * (b ? t[1] : 1 - t[1]) * (e ? t[2] : 1 - t[2]);
      const auto p = g.index(a ? i1[0] : i0[0], b ? i1[1] : i0[1], e ? i1[2] : i0[2]);
      for (std::size_t d = 0; d < 3; ++d) out[d] += w * V.c[d][p];
    }
    return out;
  };
}

struct BirkhoffAverage {
  std::vector<double> running;  // running[i] = average over [0, times[i]], running[0] = f(q0)
  double value = 0;
};

/// (1/T) int_0^T f(q(t)) dt by the trapezoid rule on the trajectory samples.
inline BirkhoffAverage birkhoff_average(const Observable& f, const FlowTrajectory& tr) {
  BirkhoffAverage out;
  out.running.resize(tr.points.size());
  double integral = 0;
  double prev = f(tr.points[0]);
  out.running[0] = prev;
  for (std::size_t i = 1; i < tr.points.size(); ++i) {
    const double cur = f(tr.points[i]);
    integral += 0.5 * (prev + cur) * (tr.times[i] - tr.times[i - 1]);
    out.running[i] = integral / tr.times[i];
    prev = cur;
  }
  out.value = out.running.back();
  return out;
}

}  // namespace srlab::ergodic
