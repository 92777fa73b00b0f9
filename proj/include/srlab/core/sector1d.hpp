#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/tridiagonal.hpp"

namespace srlab {

/// -u'' + V(x) u = lambda u on [lo, hi] with u(lo) = u(hi) = 0.
struct DirichletProblem {
  double lo = -1.0;
  double hi = 1.0;
  std::function<double(double)> potential;
};

/// Discretization controls: `intervals` cells on the base level; levels >= 2 adds
/// a refined level (h/2) used for Richardson extrapolation, levels == 3 adds h/4
/// and an observed convergence order.
struct SectorGrid {
  int intervals = 2048;
  int levels = 2;
};

struct SectorEigenvalues {
  std::vector<double> values;                    // extrapolated (or raw if levels == 1)
  std::vector<std::vector<double>> per_level;    // raw second-order values per level
  std::vector<double> observed_order;            // only when levels == 3
  double h = 0;                                  // base spacing
};

/// Second-order centered discretization on interior nodes x_i = lo + i h, i = 1..n-1.
inline SymTridiagonal discretize(const DirichletProblem& p, int intervals) {
  if (intervals < 4) throw InvariantViolation("sector grid needs at least 4 intervals");
  if (!(p.hi > p.lo)) throw InvariantViolation("empty Dirichlet interval");
  const double h = (p.hi - p.lo) / intervals;
  const double inv_h2 = 1.0 / (h * h);
  SymTridiagonal t;
  t.diag.resize(static_cast<std::size_t>(intervals) - 1);
  t.off.assign(static_cast<std::size_t>(intervals) - 2, -inv_h2);
  for (int i = 1; i < intervals; ++i)
    t.diag[static_cast<std::size_t>(i) - 1] = 2.0 * inv_h2 + p.potential(p.lo + i * h);
  return t;
}

namespace detail {

inline SectorEigenvalues combine_levels(std::vector<std::vector<double>> levels, double h) {
  SectorEigenvalues out;
  out.h = h;
  std::size_t k = levels.front().size();
  for (const auto& l : levels) k = std::min(k, l.size());
  for (auto& l : levels) l.resize(k);
  out.per_level = std::move(levels);
  const auto& pl = out.per_level;
  out.values.resize(k);
  const std::size_t L = pl.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (L == 1)
      out.values[i] = pl[0][i];
    else
      out.values[i] = (4.0 * pl[L - 1][i] - pl[L - 2][i]) / 3.0;
  }
  if (L >= 3) {
    out.observed_order.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double d1 = pl[0][i] - pl[1][i];
      const double d2 = pl[1][i] - pl[2][i];
      out.observed_order[i] = (d2 != 0.0) ? std::log2(std::abs(d1 / d2)) : 0.0;
    }
  }
  return out;
}

}  // namespace detail

/// Lowest `count` eigenvalues.
inline SectorEigenvalues solve_lowest(const DirichletProblem& p, std::size_t count,
                                      const SectorGrid& grid = {}) {
  if (grid.levels < 1 || grid.levels > 3) throw InvariantViolation("sector grid levels must be 1..3");
  // Bisection on a 4x coarser pre-level supplies guesses; every real level refines the
  // previous one's values by Rayleigh quotient iteration with a Sturm-count check.
  std::vector<double> guess;
  if (grid.intervals >= 256) {
    const SturmBisection pre(discretize(p, grid.intervals / 4));
    guess = pre.lowest(count);
  }
  std::vector<std::vector<double>> levels;
  for (int l = 0; l < grid.levels; ++l) {
    const SturmBisection s(discretize(p, grid.intervals << l));
    if (guess.size() < count) {
      guess = s.lowest(count);
    } else {
      for (std::size_t k = 0; k < count; ++k) guess[k] = s.refine(k, guess[k]);
    }
    levels.push_back(guess);
  }
  return detail::combine_levels(std::move(levels), (p.hi - p.lo) / grid.intervals);
}

/// All eigenvalues <= bound (after extrapolation).
inline SectorEigenvalues solve_below(const DirichletProblem& p, double bound,
                                     const SectorGrid& grid = {}) {
  if (grid.levels < 1 || grid.levels > 3) throw InvariantViolation("sector grid levels must be 1..3");
  // Raw second-order values undershoot slightly; over-collect on the finest level,
  // then extrapolate and filter.
  const double margin = 0.05 * std::abs(bound) + 1.0;
  const int finest = grid.intervals << (grid.levels - 1);
  const SturmBisection fine(discretize(p, finest));
  const std::size_t count = fine.count_below(bound + margin);
  auto out = solve_lowest(p, count, grid);
  std::size_t keep = 0;
  while (keep < out.values.size() && out.values[keep] <= bound) ++keep;
  out.values.resize(keep);
  for (auto& l : out.per_level) l.resize(keep);
  if (!out.observed_order.empty()) out.observed_order.resize(keep);
  return out;
}

/// Grid nodes and unit-l2 eigenvector (interior nodes) for an eigenvalue of the base level.
struct SectorVector {
  std::vector<double> x;
  std::vector<double> values;   // sum values^2 * h = 1
  double h = 0;
};

inline SectorVector sector_eigenvector(const DirichletProblem& p, int intervals, double raw_lambda) {
  const auto t = discretize(p, intervals);
  SectorVector v;
  v.h = (p.hi - p.lo) / intervals;
  v.values = tridiagonal_eigenvector(t, raw_lambda);
  const double s = 1.0 / std::sqrt(v.h);
  for (auto& e : v.values) e *= s;
  v.x.resize(v.values.size());
  for (std::size_t i = 0; i < v.x.size(); ++i) v.x[i] = p.lo + static_cast<double>(i + 1) * v.h;
  return v;
}

}  // namespace srlab
