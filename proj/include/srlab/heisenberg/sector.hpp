#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/hermite.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/core/sector1d.hpp"
#include "srlab/geometry/models.hpp"
#include "srlab/heisenberg/spectrum.hpp"

namespace srlab::heisenberg {

struct SectorOptions {
  int intervals = 2048;
  int levels = 2;                 // 3 also reports an observed order per eigenvalue
  double half_width = 0;          // 0: 12 / sqrt|m|
  double tail_tolerance = 1e-12;  // Dirichlet truncation gate on the highest requested mode
};

struct ResidueSpectrum {
  int residue = 0;
  double center = 0;                  // sqrt(2 pi) k0 / m
  std::vector<double> values;         // extrapolated
  std::vector<double> observed_order; // levels == 3 only
};

struct SectorSpectrum {
  int m = 0;
  double half_width = 0;
  std::vector<ResidueSpectrum> residues;

  /// max over ell of (max - min over residues) / lambda.
  double relative_spread() const {
    double s = 0;
    for (std::size_t l = 0; l < residues.front().values.size(); ++l) {
      double lo = residues.front().values[l], hi = lo;
      for (const auto& r : residues) {
        lo = std::min(lo, r.values[l]);
        hi = std::max(hi, r.values[l]);
      }
      s = std::max(s, (hi - lo) / std::abs(lo));
    }
    return s;
  }

  std::vector<EigenPair> pairs() const {
    std::vector<EigenPair> out;
    for (const auto& r : residues)
      for (std::size_t l = 0; l < r.values.size(); ++l)
        out.push_back({r.values[l], 1, Family::Sector, m, static_cast<int>(l), r.residue, Origin::Numeric, {}});
    return out;
  }
};

/// The 1D problem of sector m, residue k0:
/// -u'' + (sqrt(2 pi) k0 - m x)^2 u on a Dirichlet window around x_c = sqrt(2 pi) k0 / m.
inline DirichletProblem residue_problem(int m, int k0, double half_width) {
  const double s = geometry::sqrt2pi;
  const double xc = s * k0 / m;
  return {xc - half_width, xc + half_width, [m, k0, s](double x) {
            const double v = s * k0 - m * x;
            return v * v;
          }};
}

/// Lowest `count` eigenvalues for every residue k0 in [0, |m|).
inline SectorSpectrum sector_operator(int m, int count, const SectorOptions& opt = {}) {
  if (m == 0) throw NotApplicable("sector_operator: m = 0 is the torus family, use torus_eigenvalue");
  if (count < 1) throw InvariantViolation("sector_operator: count must be positive");
  const int am = std::abs(m);
  const double scale = std::sqrt(static_cast<double>(am));
  SectorSpectrum out;
  out.m = m;
  out.half_width = opt.half_width > 0 ? opt.half_width : 12.0 / scale;
  const double edge = out.half_width * scale;
  if (hermite_tail_bound(count - 1, edge) > opt.tail_tolerance)
    throw WindowError("sector_operator: window half-width " + std::to_string(out.half_width) +
                          " leaves a Dirichlet tail above tolerance for ell = " + std::to_string(count - 1),
                      hermite_tail_radius(count - 1, opt.tail_tolerance) / scale);
  out.residues.resize(static_cast<std::size_t>(am));
  parallel_for(static_cast<std::size_t>(am), [&](std::size_t i) {
    const int k0 = static_cast<int>(i);
    const auto sol = solve_lowest(residue_problem(m, k0, out.half_width), static_cast<std::size_t>(count),
                                  SectorGrid{opt.intervals, opt.levels});
    out.residues[i] = {k0, geometry::sqrt2pi * k0 / m, sol.values, sol.observed_order};
  });
  return out;
}

}  // namespace srlab::heisenberg
