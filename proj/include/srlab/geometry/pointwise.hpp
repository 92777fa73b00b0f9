#pragma once

#include <cmath>
#include <functional>

#include "srlab/geometry/grid.hpp"

namespace srlab::geometry {

/// Frame given by callables; used where grid differences are too coarse
/// (eigenfunction residuals) and as the source of sampled frames.
struct ClosedFormFrame {
  std::function<Point(const Point&)> X;
  std::function<Point(const Point&)> Y;
  std::function<double(const Point&)> volume = [](const Point&) { return 1.0; };

  ContactFrame sample(const ChartGrid& g) const {
    auto comp = [](const std::function<Point(const Point&)>& v, std::size_t i) {
      return PointFunction([v, i](const Point& q) { return v(q)[i]; });
    };
    return ContactFrame{VectorFieldSpec::sample(g, {comp(X, 0), comp(X, 1), comp(X, 2)}),
                        VectorFieldSpec::sample(g, {comp(Y, 0), comp(Y, 1), comp(Y, 2)}),
                        ScalarField::sample(g, volume)};
  }
};

/// Sixth-order central difference of t -> f(q + t v) at t = 0.
template <class F>
auto derivative_along(const F& f, const Point& q, const Point& v, double step) {
  auto at = [&](double t) { return f(Point{q[0] + t * v[0], q[1] + t * v[1], q[2] + t * v[2]}); };
  const double h = step;
  return (45.0 * (at(h) - at(-h)) - 9.0 * (at(2 * h) - at(-2 * h)) + (at(3 * h) - at(-3 * h))) / (60.0 * h);
}

/// div_mu(V) at q from sixth-order partials of rho V^j.
inline double divergence_at(const std::function<Point(const Point&)>& V, const std::function<double(const Point&)>& rho,
                            const Point& q, double step = 1e-3) {
  double s = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    Point e{0, 0, 0};
    e[j] = 1;
    s += derivative_along([&](const Point& p) { return rho(p) * V(p)[j]; }, q, e, step);
  }
  return s / rho(q);
}

/// Delta_mu f(q) = sum_i X_i(X_i f) + div_mu(X_i) X_i f, with the inner derivative
/// re-evaluated at every stencil point (no frozen-coefficient approximation).
template <class F>
auto sub_laplacian_at(const ClosedFormFrame& frame, const F& f, const Point& q, double step = 0.02) {
  using T = decltype(f(q));
  T out{};
  for (const auto* field : {&frame.X, &frame.Y}) {
    const auto& V = *field;
    auto vf = [&](const Point& p) { return derivative_along(f, p, V(p), step); };
    out += derivative_along(vf, q, V(q), step);
    out += divergence_at(V, frame.volume, q) * vf(q);
  }
  return out;
}

using PointField = std::function<Point(const Point&)>;

/// [A,B] at q, components from sixth-order directional derivatives.
inline Point bracket_at(const PointField& A, const PointField& B, const Point& q, double step) {
  Point out{};
  const Point a = A(q), b = B(q);
  for (std::size_t j = 0; j < 3; ++j) {
    out[j] = derivative_along([&](const Point& p) { return B(p)[j]; }, q, a, step) -
             derivative_along([&](const Point& p) { return A(p)[j]; }, q, b, step);
  }
  return out;
}

namespace detail {

inline double det3_at(const Point& a, const Point& b, const Point& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

// Coefficient of v on the third basis vector of (a, b, c), by Cramer's rule.
inline double third_coefficient(const Point& a, const Point& b, const Point& c, const Point& v) {
  return det3_at(a, b, v) / det3_at(a, b, c);
}

}  // namespace detail

/// Reeb field at q by the same algebra as the grid route, with nested pointwise brackets.
inline PointField reeb_pointwise(const ClosedFormFrame& frame, double step = 1e-2) {
  auto X = frame.X, Y = frame.Y;
  PointField W = [X, Y, step](const Point& q) { return bracket_at(X, Y, q, step); };
  return [X, Y, W, step](const Point& q) {
    const Point x = X(q), y = Y(q), w = W(q);
    const double b = detail::third_coefficient(x, y, w, bracket_at(X, W, q, step));
    const double a = -detail::third_coefficient(x, y, w, bracket_at(Y, W, q, step));
    return Point{-w[0] + a * x[0] + b * y[0], -w[1] + a * x[1] + b * y[1], -w[2] + a * x[2] + b * y[2]};
  };
}

struct PointwiseReebCheck {
  Point Z{};
  double residual_x = 0;  // |[X,Z] mod D|
  double residual_y = 0;
};

/// Evaluates Z and the transversal parts of [X,Z], [Y,Z] at q.
inline PointwiseReebCheck reeb_check_at(const ClosedFormFrame& frame, const Point& q, double step = 1e-2) {
  const auto Z = reeb_pointwise(frame, step);
  PointField W = [&](const Point& p) { return bracket_at(frame.X, frame.Y, p, step); };
  const Point x = frame.X(q), y = frame.Y(q), w = W(q);
  PointwiseReebCheck out;
  out.Z = Z(q);
  out.residual_x = std::abs(detail::third_coefficient(x, y, w, bracket_at(frame.X, Z, q, step)));
  out.residual_y = std::abs(detail::third_coefficient(x, y, w, bracket_at(frame.Y, Z, q, step)));
  return out;
}

}  // namespace srlab::geometry
