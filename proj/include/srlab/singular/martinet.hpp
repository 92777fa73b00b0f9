#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/core/sector1d.hpp"
#include "srlab/singular/counting.hpp"

namespace srlab::singular {

/// X = d_x, Y = d_y + x^2 d_z with y, z periodic and x in [-a, a] (Dirichlet).
/// Fourier modes (eta, zeta) give -d^2 + (eta' + zeta' x^2)^2 with eta' = 2 pi eta / y_period,
/// zeta' = 2 pi zeta / z_period.
struct MartinetModel {
  double y_period = 2 * std::numbers::pi;
  double z_period = 2 * std::numbers::pi;
  double half_width = 1.0;
  SectorGrid grid{2048, 2};

  double eta_freq(long eta) const { return 2 * std::numbers::pi * static_cast<double>(eta) / y_period; }
  double zeta_freq(long zeta) const { return 2 * std::numbers::pi * static_cast<double>(zeta) / z_period; }

  void validate() const {
    if (!(half_width > 0)) throw InvariantViolation("Martinet: half_width must be positive");
    if (!(y_period > 0) || !(z_period > 0)) throw InvariantViolation("Martinet: periods must be positive");
  }

  /// (eta, zeta) and (-eta, -zeta) share one potential; both map to the zeta > 0 representative.
  DirichletProblem problem(long eta, long zeta) const {
    if (zeta < 0) {
      eta = -eta;
      zeta = -zeta;
    }
    const double e = eta_freq(eta), z = zeta_freq(zeta);
    return {-half_width, half_width, [e, z](double x) {
              const double v = e + z * x * x;
              return v * v;
            }};
  }

  /// zeta = 0: eta'^2 + (pi k / 2a)^2.
  double flat_eigenvalue(long eta, int k) const {
    const double w = std::numbers::pi * k / (2 * half_width);
    return eta_freq(eta) * eta_freq(eta) + w * w;
  }
};

/// Whole-line constants of -d^2 + (t + u^2)^2 (ground energy G(t)) used as certified
/// lower bounds, each rounded down from the measured value:
///   G(t) >= t^2 + quartic_ground  (t >= 0; measured 1.0604)
///   G(t) >= global_min            (all t; measured 0.9056 near t = -0.4)
///   G(t) >= well_slope sqrt(|t|)  (t < 0; measured inf G/sqrt|t| = 0.5907)
/// Dirichlet eigenvalues on a box dominate the whole-line ones, and scaling u = |zeta'|^{1/3} x
/// gives E(eta, zeta) = |zeta'|^{2/3} G(eta' sign(zeta') |zeta'|^{-1/3}).
struct MartinetBounds {
  double quartic_ground = 1.06;
  double global_min = 0.89;
  double well_slope = 0.58;
};

/// Lower bound on the ground energy of sector (eta, zeta), zeta != 0.
inline double martinet_lower_bound(const MartinetModel& m, long eta, long zeta, const MartinetBounds& b = {}) {
  if (zeta < 0) {
    eta = -eta;
    zeta = -zeta;
  }
  const double e = m.eta_freq(eta), z = m.zeta_freq(zeta);
  const double z23 = std::cbrt(z * z);
  // Box bound: min of the potential on [-a, a] plus the free Dirichlet ground.
  const double edge = z * m.half_width * m.half_width;
  double vmin;
  if (e >= 0) vmin = e * e;
  else if (-e <= edge) vmin = 0;
  else vmin = (-e - edge) * (-e - edge);
  const double box = vmin + std::pow(std::numbers::pi / (2 * m.half_width), 2);
  double scaled;
  if (e >= 0) scaled = e * e + b.quartic_ground * z23;
  else scaled = std::max(b.global_min, b.well_slope * std::sqrt(-e / std::cbrt(z))) * z23;
  return std::max(box, scaled);
}

struct MartinetOptions {
  std::size_t max_sectors = 2'000'000;
  int samples = 200;
  MartinetBounds bounds{};
};

struct MartinetSpectrum {
  MergedSpectrum merged;
  double completeness_bound = 0;   // all eigenvalues <= this are present
  std::size_t sectors_enumerated = 0;
  std::size_t sectors_nonempty = 0;
  std::size_t sectors_skipped = 0; // candidates beyond the budget
  std::int64_t flat_count = 0;     // eigenvalues from zeta = 0 sectors (at lambda_max)
};

namespace detail {

struct MartinetSector {
  long eta;
  long zeta;  // > 0
  double lower_bound;
};

}  // namespace detail

/// All eigenvalues <= lambda_max. Sectors are visited in ascending order of their ground
/// lower bound, so a budget cut leaves a certified completeness bound.
inline MartinetSpectrum martinet_spectrum(const MartinetModel& model, double lambda_max, const MartinetOptions& opt = {}) {
  model.validate();
  const auto& b = opt.bounds;
  std::vector<detail::MartinetSector> cands;
  for (long zeta = 1;; ++zeta) {
    const double z = model.zeta_freq(zeta);
    if (b.global_min * std::cbrt(z * z) > lambda_max) break;
    // eta' >= 0 side: eta'^2 <= lambda_max. eta' < 0 side: both bounds cap |eta'|.
    const double e_pos = std::sqrt(lambda_max);
    const double e_neg = std::min(std::pow(lambda_max / b.well_slope, 2) / z,
                                  z * model.half_width * model.half_width + std::sqrt(lambda_max));
    const long hi = static_cast<long>(std::floor(e_pos * model.y_period / (2 * std::numbers::pi)));
    const long lo = -static_cast<long>(std::floor(e_neg * model.y_period / (2 * std::numbers::pi)));
    for (long eta = lo; eta <= hi; ++eta) {
      const double lb = martinet_lower_bound(model, eta, zeta, b);
      if (lb <= lambda_max) cands.push_back({eta, zeta, lb});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) { return x.lower_bound < y.lower_bound; });

  MartinetSpectrum out;
  out.completeness_bound = lambda_max;
  if (cands.size() > opt.max_sectors) {
    out.completeness_bound = std::nextafter(cands[opt.max_sectors].lower_bound, 0.0);
    out.sectors_skipped = cands.size() - opt.max_sectors;
    cands.resize(opt.max_sectors);
  }
  out.sectors_enumerated = cands.size();

  std::vector<std::vector<double>> per(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) {
    const auto p = model.problem(cands[i].eta, cands[i].zeta);
    // Cheap Sturm test first: most candidates have nothing below lambda_max.
    const int finest = model.grid.intervals << (model.grid.levels - 1);
    const SturmBisection probe(discretize(p, finest));
    if (probe.count_below(lambda_max * 1.05 + 1.0) == 0) return;
    per[i] = solve_below(p, lambda_max, model.grid).values;
  });
  for (const auto& v : per) {
    if (!v.empty()) ++out.sectors_nonempty;
    for (double l : v) out.merged.add(l, 2);  // (eta, zeta) and (-eta, -zeta)
  }
  // zeta = 0 sectors in closed form.
  const long eta_max = static_cast<long>(std::floor(std::sqrt(lambda_max) * model.y_period / (2 * std::numbers::pi)));
  for (long eta = -eta_max; eta <= eta_max; ++eta)
    for (int k = 1; model.flat_eigenvalue(eta, k) <= lambda_max; ++k) {
      out.merged.add(model.flat_eigenvalue(eta, k), 1);
      ++out.flat_count;
    }
  out.merged.finalize();
  return out;
}

/// Lowest `count` eigenvalues of sector (eta, zeta), zeta != 0.
inline std::vector<double> martinet_sector_spectrum(const MartinetModel& model, long eta, long zeta, int count) {
  model.validate();
  if (zeta == 0) throw NotApplicable("martinet_sector_spectrum: zeta = 0 sectors are closed form (flat_eigenvalue)");
  if (count < 1) throw InvariantViolation("martinet_sector_spectrum: count must be positive");
  return solve_lowest(model.problem(eta, zeta), static_cast<std::size_t>(count), model.grid).values;
}

struct MartinetCounting {
  CountingSamples samples;
  std::vector<LogLawFit> fits;
  double stability = 0;
  std::vector<double> ratio_log;     // N / (lambda^2 log lambda)
  std::vector<double> ratio_square;  // N / lambda^2
  std::vector<std::int64_t> flat_counts;  // zeta = 0 contribution at the samples
  MartinetSpectrum spectrum;
};

/// Counts on [lambda_max/10, lambda_max]; fits a lambda^2 log lambda + b lambda^2 on [L/2, L]
/// for each L in `fit_tops` (default lambda_max/2 and lambda_max).
inline MartinetCounting martinet_counting(const MartinetModel& model, double lambda_max, std::vector<double> fit_tops = {},
                                          const MartinetOptions& opt = {}) {
  if (lambda_max < 30) throw InvariantViolation("martinet_counting: lambda_max must be at least 30");
  MartinetCounting out;
  out.spectrum = martinet_spectrum(model, lambda_max, opt);
  out.samples = sample_counts("martinet", out.spectrum.merged, linspace(lambda_max / 10, lambda_max, opt.samples),
                              out.spectrum.completeness_bound);
  if (fit_tops.empty()) fit_tops = {lambda_max / 2, lambda_max};
  for (double top : fit_tops) out.fits.push_back(fit_log_law(out.samples, top / 2, top, 2));
  out.stability = fit_stability(out.fits);
  for (std::size_t i = 0; i < out.samples.lambdas.size(); ++i) {
    const double l = out.samples.lambdas[i], c = static_cast<double>(out.samples.counts[i]);
    out.ratio_log.push_back(c / (l * l * std::log(l)));
    out.ratio_square.push_back(c / (l * l));
    std::int64_t flat = 0;
    const long eta_max = static_cast<long>(std::floor(std::sqrt(l) * model.y_period / (2 * std::numbers::pi)));
    for (long eta = -eta_max; eta <= eta_max; ++eta)
      for (int k = 1; model.flat_eigenvalue(eta, k) <= l; ++k) ++flat;
    out.flat_counts.push_back(flat);
  }
  return out;
}

}  // namespace srlab::singular
