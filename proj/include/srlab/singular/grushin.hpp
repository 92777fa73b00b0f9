#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/hermite.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/core/sector1d.hpp"
#include "srlab/singular/counting.hpp"

namespace srlab::singular {

/// X = d_x, Y = x d_y with y periodic. Fourier mode n in y gives -d^2 + nu^2 x^2,
/// nu = 2 pi n / y_period.
struct GrushinModel {
  double y_period = 2 * std::numbers::pi;
  bool whole_line = false;
  double half_width = 1.0;  // x in [-a, a] with Dirichlet ends
  SectorGrid grid{2048, 2};
  /// Sectors whose highest needed Hermite function is below this at the wall use
  /// the closed form (the Dirichlet shift is far below grid accuracy).
  double confinement_tolerance = 1e-12;

  double frequency(long n) const { return 2 * std::numbers::pi * static_cast<double>(std::labs(n)) / y_period; }
  void validate() const {
    if (!(y_period > 0)) throw InvariantViolation("Grushin: y_period must be positive");
    if (!whole_line && !(half_width > 0)) throw InvariantViolation("Grushin: half_width must be positive");
  }
  DirichletProblem problem(long n) const {
    const double nu = frequency(n);
    return {-half_width, half_width, [nu](double x) { return nu * nu * x * x; }};
  }
  /// Free sector n = 0 on the box.
  double free_eigenvalue(int k) const {
    const double w = std::numbers::pi * k / (2 * half_width);
    return w * w;
  }
};

struct GrushinSectorSpectrum {
  std::vector<double> values;
  std::vector<double> whole_line;  // (2 ell + 1)|nu|, empty for n = 0
  double max_gap = 0;              // max(values - whole_line), interval model only
};

inline GrushinSectorSpectrum grushin_sector_spectrum(const GrushinModel& model, long n, int count) {
  model.validate();
  if (count < 1) throw InvariantViolation("grushin_sector_spectrum: count must be positive");
  GrushinSectorSpectrum out;
  const double nu = model.frequency(n);
  if (n != 0)
    for (int l = 0; l < count; ++l) out.whole_line.push_back((2.0 * l + 1.0) * nu);
  if (model.whole_line) {
    if (n == 0) throw NotApplicable("Grushin n = 0 sector has continuous spectrum on the whole line");
    out.values = out.whole_line;
    return out;
  }
  if (n == 0) {
    for (int k = 1; k <= count; ++k) out.values.push_back(model.free_eigenvalue(k));
    return out;
  }
  if (count > model.grid.intervals / 16)
    throw WindowError("grushin_sector_spectrum: " + std::to_string(count) + " eigenvalues are not resolved by " +
                          std::to_string(model.grid.intervals) + " intervals",
                      model.half_width);
  out.values = solve_lowest(model.problem(std::labs(n)), static_cast<std::size_t>(count), model.grid).values;
  for (std::size_t l = 0; l < out.values.size(); ++l)
    out.max_gap = std::max(out.max_gap, out.values[l] - out.whole_line[l]);
  return out;
}

namespace detail {

struct GrushinSector {
  long n = 0;           // n >= 0; n > 0 stands for +-n
  double lower_bound = 0;
  bool confined = false;
};

inline std::vector<GrushinSector> grushin_sectors(const GrushinModel& m, double lambda_max) {
  std::vector<GrushinSector> out;
  const double free_ground = m.free_eigenvalue(1);
  if (free_ground <= lambda_max) out.push_back({0, free_ground, true});
  for (long n = 1;; ++n) {
    const double nu = m.frequency(n);
    const double lb = std::max(nu, free_ground);
    if (nu > lambda_max) break;
    if (lb > lambda_max) continue;
    const int ell_max = static_cast<int>(std::floor((lambda_max / nu - 1) / 2));
    const bool confined = hermite_tail_bound(ell_max, std::sqrt(nu) * m.half_width) <= m.confinement_tolerance;
    out.push_back({n, lb, confined});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GrushinSector& a, const GrushinSector& b) { return a.lower_bound < b.lower_bound; });
  return out;
}

}  // namespace detail

struct GrushinOptions {
  std::size_t max_sectors = 1'000'000;
  int samples = 400;
};

/// Per-eigenpair data for mass computations.
struct GrushinEigen {
  double lambda;
  std::int64_t mult;
  long n;
  int index;     // ell (or k - 1 for n = 0)
  bool confined;
  double raw;    // base-level eigenvalue for grid sectors
};

struct GrushinSpectrum {
  MergedSpectrum merged;
  std::vector<GrushinEigen> pairs;
  double completeness_bound = 0;
  std::size_t sectors = 0;
};

inline GrushinSpectrum grushin_spectrum(const GrushinModel& model, double lambda_max, const GrushinOptions& opt = {}) {
  model.validate();
  if (model.whole_line) throw UnsupportedConfiguration("Grushin counting needs the interval model (n = 0 is continuous otherwise)");
  auto sectors = detail::grushin_sectors(model, lambda_max);
  GrushinSpectrum out;
  out.completeness_bound = lambda_max;
  if (sectors.size() > opt.max_sectors) {
    out.completeness_bound = std::nextafter(sectors[opt.max_sectors].lower_bound, 0.0);
    sectors.resize(opt.max_sectors);
  }
  out.sectors = sectors.size();
  std::vector<std::vector<GrushinEigen>> per(sectors.size());
  parallel_for(sectors.size(), [&](std::size_t i) {
    const auto& s = sectors[i];
    auto& v = per[i];
    if (s.n == 0) {
      for (int k = 1; model.free_eigenvalue(k) <= lambda_max; ++k)
        v.push_back({model.free_eigenvalue(k), 1, 0, k - 1, true, model.free_eigenvalue(k)});
      return;
    }
    const double nu = model.frequency(s.n);
    if (s.confined) {
      for (int l = 0; (2.0 * l + 1) * nu <= lambda_max; ++l) v.push_back({(2.0 * l + 1) * nu, 2, s.n, l, true, 0});
      return;
    }
    const auto sol = solve_below(model.problem(s.n), lambda_max, model.grid);
    for (std::size_t l = 0; l < sol.values.size(); ++l)
      v.push_back({sol.values[l], 2, s.n, static_cast<int>(l), false, sol.per_level[0][l]});
  });
  for (const auto& v : per)
    for (const auto& e : v) {
      out.merged.add(e.lambda, e.mult);
      out.pairs.push_back(e);
    }
  out.merged.finalize();
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const GrushinEigen& a, const GrushinEigen& b) { return a.lambda < b.lambda; });
  return out;
}

struct GrushinCounting {
  CountingSamples samples;
  std::vector<LogLawFit> fits;
  double stability = 0;
  std::vector<double> ratio_linear;  // N / lambda at the samples
  std::vector<double> ratio_13;      // N / lambda^1.3
};

/// Counts on [lambda_max/20, lambda_max], fits a lambda log lambda + b lambda on [L/2, L]
/// for every L in `fit_tops` (default: lambda_max/2 and lambda_max).
inline GrushinCounting grushin_counting(const GrushinModel& model, double lambda_max, std::vector<double> fit_tops = {},
                                        const GrushinOptions& opt = {}) {
  if (lambda_max < 50) throw InvariantViolation("grushin_counting: lambda_max must be at least 50");
  const auto spec = grushin_spectrum(model, lambda_max, opt);
  GrushinCounting out;
  out.samples = sample_counts("grushin", spec.merged, linspace(lambda_max / 20, lambda_max, opt.samples),
                              spec.completeness_bound);
  if (fit_tops.empty()) fit_tops = {lambda_max / 2, lambda_max};
  for (double top : fit_tops) out.fits.push_back(fit_log_law(out.samples, top / 2, top, 1));
  out.stability = fit_stability(out.fits);
  for (std::size_t i = 0; i < out.samples.lambdas.size(); ++i) {
    const double l = out.samples.lambdas[i], c = static_cast<double>(out.samples.counts[i]);
    out.ratio_linear.push_back(c / l);
    out.ratio_13.push_back(c / std::pow(l, 1.3));
  }
  return out;
}

/// Cesaro means (1/N) sum_{lambda_n <= cutoff} int f |phi_n|^2 at each cutoff, with the
/// box eigenfunctions: sines for n = 0, Hermite functions for confined sectors, grid
/// eigenvectors otherwise.
inline std::vector<double> grushin_mass_near_singular_set(const GrushinModel& model, const std::function<double(double)>& f,
                                                          const std::vector<double>& cutoffs, int quadrature = 8192) {
  if (cutoffs.empty()) return {};
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
    throw InvariantViolation("grushin_mass_near_singular_set: cutoffs must be ascending");
  const double top = cutoffs.back();
  const auto spec = grushin_spectrum(model, top);
  const double a = model.half_width;
  const double h = 2 * a / quadrature;
  std::vector<double> fx(static_cast<std::size_t>(quadrature) + 1);
  for (int i = 0; i <= quadrature; ++i) fx[static_cast<std::size_t>(i)] = f(-a + i * h) * ((i == 0 || i == quadrature) ? 0.5 : 1.0);

  // Group pairs by sector so Hermite tables and grid solves are shared.
  std::vector<long> ns;
  for (const auto& e : spec.pairs) ns.push_back(e.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<std::vector<double>> mass_by_sector(ns.size());
  std::vector<std::vector<double>> raw_by_sector(ns.size());
  std::vector<bool> confined(ns.size(), true);
  for (const auto& e : spec.pairs) {
    const auto s = static_cast<std::size_t>(std::lower_bound(ns.begin(), ns.end(), e.n) - ns.begin());
    if (raw_by_sector[s].size() <= static_cast<std::size_t>(e.index)) raw_by_sector[s].resize(static_cast<std::size_t>(e.index) + 1);
    raw_by_sector[s][static_cast<std::size_t>(e.index)] = e.raw;
    confined[s] = e.confined;
  }
  parallel_for(ns.size(), [&](std::size_t s) {
    const long n = ns[s];
    const std::size_t count = raw_by_sector[s].size();
    auto& out = mass_by_sector[s];
    out.assign(count, 0.0);
    if (n == 0) {
      for (std::size_t k = 0; k < count; ++k) {
        double acc = 0;
        for (int i = 0; i <= quadrature; ++i) {
          const double v = std::sin(std::numbers::pi * static_cast<double>(k + 1) * i * h / (2 * a));
          acc += fx[static_cast<std::size_t>(i)] * v * v;
        }
        out[k] = acc * h / a;
      }
    } else if (confined[s]) {
      const double nu = model.frequency(n), sn = std::sqrt(nu);
      std::vector<double> psi(count);
      for (int i = 0; i <= quadrature; ++i) {
        hermite_functions(sn * (-a + i * h), psi);
        for (std::size_t l = 0; l < count; ++l) out[l] += fx[static_cast<std::size_t>(i)] * psi[l] * psi[l];
      }
      for (auto& v : out) v *= sn * h;
    } else {
      const auto p = model.problem(n);
      for (std::size_t l = 0; l < count; ++l) {
        const auto vec = sector_eigenvector(p, model.grid.intervals, raw_by_sector[s][l]);
        double acc = 0;
        for (std::size_t i = 0; i < vec.x.size(); ++i) acc += f(vec.x[i]) * vec.values[i] * vec.values[i];
        out[l] = acc * vec.h;
      }
    }
  });
  std::vector<double> result;
  double sum = 0;
  std::int64_t n = 0;
  std::size_t i = 0;
  for (double c : cutoffs) {
    for (; i < spec.pairs.size() && spec.pairs[i].lambda <= c; ++i) {
      const auto& e = spec.pairs[i];
      const auto s = static_cast<std::size_t>(std::lower_bound(ns.begin(), ns.end(), e.n) - ns.begin());
      sum += static_cast<double>(e.mult) * mass_by_sector[s][static_cast<std::size_t>(e.index)];
      n += e.mult;
    }
    result.push_back(n > 0 ? sum / static_cast<double>(n) : 0.0);
  }
  return result;
}

}  // namespace srlab::singular
