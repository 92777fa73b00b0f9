#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "srlab/core/error.hpp"

namespace srlab::geometry {

using Point = std::array<double, 3>;
using PointFunction = std::function<double(const Point&)>;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 4;
  bool periodic = true;

  double length() const noexcept { return hi - lo; }
  /// length/n on periodic axes (the seam point is not stored), length/(n-1) otherwise.
  double spacing() const noexcept { return periodic ? length() / n : length() / (n - 1); }
  double coord(int i) const noexcept { return lo + i * spacing(); }

  bool operator==(const Axis&) const = default;
};

/// Tensor grid on a chart box. Flat index = i + n0 * (j + n1 * k).
class ChartGrid {
public:
  ChartGrid() = default;
  explicit ChartGrid(std::array<Axis, 3> axes) : axes_(axes) {
    for (const auto& a : axes_) {
      if (a.n < 4) throw InvariantViolation("chart grid needs at least 4 points per axis");
      if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
        throw InvariantViolation("chart axis extent must be a finite, non-empty interval");
    }
  }

  const Axis& axis(int d) const { return axes_[static_cast<std::size_t>(d)]; }
  const std::array<Axis, 3>& axes() const noexcept { return axes_; }
  int n(int d) const { return axis(d).n; }
  double spacing(int d) const { return axis(d).spacing(); }
  bool all_periodic() const {
    return axes_[0].periodic && axes_[1].periodic && axes_[2].periodic;
  }
  double max_spacing() const {
    return std::max({spacing(0), spacing(1), spacing(2)});
  }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(axes_[0].n) * static_cast<std::size_t>(axes_[1].n) *
           static_cast<std::size_t>(axes_[2].n);
  }
  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(axes_[0].n) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(axes_[1].n) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> multi_index(std::size_t p) const noexcept {
    const auto n0 = static_cast<std::size_t>(axes_[0].n), n1 = static_cast<std::size_t>(axes_[1].n);
    return {static_cast<int>(p % n0), static_cast<int>((p / n0) % n1), static_cast<int>(p / (n0 * n1))};
  }
  Point point(std::size_t p) const noexcept {
    const auto m = multi_index(p);
    return {axes_[0].coord(m[0]), axes_[1].coord(m[1]), axes_[2].coord(m[2])};
  }

  /// Quadrature weight of node p: h per periodic axis, trapezoid on open axes.
  double weight(std::size_t p) const noexcept {
    const auto m = multi_index(p);
    double w = 1.0;
    for (int d = 0; d < 3; ++d) {
      const auto& a = axes_[static_cast<std::size_t>(d)];
      double wd = a.spacing();
      if (!a.periodic && (m[static_cast<std::size_t>(d)] == 0 || m[static_cast<std::size_t>(d)] == a.n - 1)) wd *= 0.5;
      w *= wd;
    }
    return w;
  }

  bool operator==(const ChartGrid&) const = default;

private:
  std::array<Axis, 3> axes_{};
};

/// Real field sampled on every grid node.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(ChartGrid grid, double value = 0.0)
      : grid_(std::move(grid)), values_(grid_.size(), value) {}
  ScalarField(ChartGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw StructuralError("scalar field size does not match grid");
  }

  static ScalarField sample(const ChartGrid& grid, const PointFunction& f) {
    ScalarField s(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) s.values_[p] = f(grid.point(p));
    return s;
  }

  const ChartGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t p) const { return values_[p]; }
  double& operator[](std::size_t p) { return values_[p]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double max_abs() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double min() const {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double v : values_) m = std::min(m, v);
    return m;
  }
  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }
  /// Grid quadrature in fixed index order.
  double integral() const {
    double s = 0;
    for (std::size_t p = 0; p < values_.size(); ++p) s += values_[p] * grid_.weight(p);
    return s;
  }

private:
  ChartGrid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) throw StructuralError(std::string(what) + ": fields live on different grids");
}

/// Components against d/dx, d/dy, d/dz.
struct VectorFieldSpec {
  std::array<ScalarField, 3> c;

  const ChartGrid& grid() const { return c[0].grid(); }
  void validate() const {
    require_same_grid(c[0], c[1], "vector field");
    require_same_grid(c[0], c[2], "vector field");
  }
  Point at(std::size_t p) const { return {c[0][p], c[1][p], c[2][p]}; }
  double max_norm() const {
    double m = 0;
    for (std::size_t p = 0; p < c[0].size(); ++p) {
      const auto v = at(p);
      m = std::max(m, std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
    }
    return m;
  }

  static VectorFieldSpec sample(const ChartGrid& grid, const std::array<PointFunction, 3>& f) {
    return {{ScalarField::sample(grid, f[0]), ScalarField::sample(grid, f[1]), ScalarField::sample(grid, f[2])}};
  }
};

/// Components against dx, dy, dz.
struct OneFormSpec {
  std::array<ScalarField, 3> c;

  const ChartGrid& grid() const { return c[0].grid(); }
  double pair(const VectorFieldSpec& v, std::size_t p) const {
    return c[0][p] * v.c[0][p] + c[1][p] * v.c[1][p] + c[2][p] * v.c[2][p];
  }
};

/// Orthonormal frame (X, Y) of the distribution plus the volume density of d mu.
struct ContactFrame {
  VectorFieldSpec X;
  VectorFieldSpec Y;
  ScalarField volume;

  const ChartGrid& grid() const { return volume.grid(); }

  /// Shape checks and positivity of the volume; the contact condition is checked
  /// by reeb_field, which has the bracket at hand.
  void validate() const {
    X.validate();
    Y.validate();
    require_same_grid(X.c[0], Y.c[0], "frame");
    require_same_grid(X.c[0], volume, "frame");
    for (const auto* f : {&X.c[0], &X.c[1], &X.c[2], &Y.c[0], &Y.c[1], &Y.c[2], &volume})
      if (!f->all_finite()) throw InvariantViolation("frame coefficients must be finite");
    if (volume.min() <= 0) throw InvariantViolation("volume density must be strictly positive");
  }
};

/// CSV export: one row per grid node, columns x,y,z,value.
inline void write_csv(std::ostream& os, const ScalarField& f, const std::string& value_name = "value") {
  os << "x,y,z," << value_name << "\n";
  os.precision(17);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const auto q = f.grid().point(p);
    os << q[0] << ',' << q[1] << ',' << q[2] << ',' << f[p] << '\n';
  }
}

inline void write_csv(std::ostream& os, const VectorFieldSpec& v) {
  os << "x,y,z,v_x,v_y,v_z\n";
  os.precision(17);
  for (std::size_t p = 0; p < v.c[0].size(); ++p) {
    const auto q = v.grid().point(p);
    os << q[0] << ',' << q[1] << ',' << q[2] << ',' << v.c[0][p] << ',' << v.c[1][p] << ',' << v.c[2][p] << '\n';
  }
}

inline void write_csv(std::ostream& os, const OneFormSpec& a) {
  os << "x,y,z,a_x,a_y,a_z\n";
  os.precision(17);
  for (std::size_t p = 0; p < a.c[0].size(); ++p) {
    const auto q = a.grid().point(p);
    os << q[0] << ',' << q[1] << ',' << q[2] << ',' << a.c[0][p] << ',' << a.c[1][p] << ',' << a.c[2][p] << '\n';
  }
}

}  // namespace srlab::geometry
