#pragma once

#include "srlab/geometry/grid.hpp"

namespace srlab::geometry {

/// Second-order centered derivative along `axis`; periodic axes wrap, open axes
/// use second-order one-sided stencils at the two end nodes and set *one_sided.
inline ScalarField partial(const ScalarField& f, int axis, bool* one_sided = nullptr) {
  const ChartGrid& g = f.grid();
  const Axis& a = g.axis(axis);
  const double h = a.spacing();
  const int n = a.n;
  ScalarField out(g);
  if (!a.periodic && one_sided) *one_sided = true;
  for (std::size_t p = 0; p < g.size(); ++p) {
    auto m = g.multi_index(p);
    const int i = m[static_cast<std::size_t>(axis)];
    auto at = [&](int ii) {
      auto mm = m;
      mm[static_cast<std::size_t>(axis)] = ii;
      return f[g.index(mm[0], mm[1], mm[2])];
    };
    double d;
    if (a.periodic) {
      d = (at((i + 1) % n) - at((i - 1 + n) % n)) / (2 * h);
    } else if (i == 0) {
      d = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
    } else if (i == n - 1) {
      d = (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
    } else {
      d = (at(i + 1) - at(i - 1)) / (2 * h);
    }
    out[p] = d;
  }
  return out;
}

/// All three partials of a field: result[d] = d f / d x_d.
inline std::array<ScalarField, 3> gradient(const ScalarField& f, bool* one_sided = nullptr) {
  return {partial(f, 0, one_sided), partial(f, 1, one_sided), partial(f, 2, one_sided)};
}

}  // namespace srlab::geometry
