#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srlab/core/error.hpp"

namespace srlab::ergodic {

/// Values attached to a sorted spectrum: lambdas ascending, one value and one multiplicity per entry.
struct SpectralSequence {
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<std::int64_t> multiplicities;  // empty: all ones

  std::int64_t mult(std::size_t i) const { return multiplicities.empty() ? 1 : multiplicities[i]; }
  void validate() const {
    if (lambdas.size() != values.size() || (!multiplicities.empty() && multiplicities.size() != values.size()))
      throw StructuralError("spectral sequence: lambdas, values and multiplicities differ in length");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
      throw StructuralError("spectral sequence: lambdas must be ascending");
  }
};

struct CesaroReport {
  std::vector<double> cutoffs;
  std::vector<std::int64_t> counts;  // N(cutoff)
  std::vector<double> E;
  std::vector<double> V;                // filled by variance()
  std::vector<double> E_squared;        // E(A*A) when supplied
  bool variance_bound_holds = true;     // V <= E(A*A) at every cutoff
};

namespace detail {

template <class Acc>
void scan(const SpectralSequence& s, const std::vector<double>& cutoffs, Acc&& acc) {
  s.validate();
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw StructuralError("cutoffs must be ascending");
  std::size_t i = 0;
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    for (; i < s.lambdas.size() && s.lambdas[i] <= cutoffs[c]; ++i) acc.add(i);
    acc.emit(c);
  }
}

}  // namespace detail

/// Running E(cutoff) = (1/N) sum_{lambda_n <= cutoff} mult_n * value_n.
inline CesaroReport cesaro_mean(const SpectralSequence& s, const std::vector<double>& cutoffs) {
  CesaroReport r;
  r.cutoffs = cutoffs;
  struct {
    const SpectralSequence& s;
    CesaroReport& r;
    double sum = 0;
    std::int64_t n = 0;
    void add(std::size_t i) {
      sum += static_cast<double>(s.mult(i)) * s.values[i];
      n += s.mult(i);
    }
    void emit(std::size_t) {
      r.counts.push_back(n);
      r.E.push_back(n > 0 ? sum / static_cast<double>(n) : 0.0);
    }
  } acc{s, r};
  detail::scan(s, cutoffs, acc);
  return r;
}

/// Running second moment of (value - target). With `squared` (the pairings of A*A,
/// A = f - target) also records E(A*A) and checks V <= E(A*A).
inline CesaroReport variance(const SpectralSequence& s, const std::vector<double>& cutoffs, double target,
                             const std::optional<SpectralSequence>& squared = std::nullopt) {
  CesaroReport r = cesaro_mean(s, cutoffs);
  struct {
    const SpectralSequence& s;
    CesaroReport& r;
    double target;
    double sum = 0;
    std::int64_t n = 0;
    void add(std::size_t i) {
      const double d = s.values[i] - target;
      sum += static_cast<double>(s.mult(i)) * d * d;
      n += s.mult(i);
    }
    void emit(std::size_t) { r.V.push_back(n > 0 ? sum / static_cast<double>(n) : 0.0); }
  } acc{s, r, target};
  detail::scan(s, cutoffs, acc);
  if (squared) {
    if (squared->lambdas != s.lambdas) throw StructuralError("variance: squared sequence not aligned");
    r.E_squared = cesaro_mean(*squared, cutoffs).E;
    for (std::size_t c = 0; c < cutoffs.size(); ++c)
      if (r.V[c] > r.E_squared[c] * (1 + 1e-12) + 1e-15) r.variance_bound_holds = false;
  }
  return r;
}

/// Index sequence n = 1, 2, ... as a spectral sequence with unit multiplicities.
inline SpectralSequence indexed(const std::vector<double>& u) {
  SpectralSequence s;
  s.values = u;
  s.lambdas.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) s.lambdas[i] = static_cast<double>(i + 1);
  return s;
}

struct WeylMeasureEstimate {
  std::string label;
  double target = 0;          // int f d(nu) or the singular-set prediction
  std::vector<double> E;      // per cutoff
  double final_deviation = 0; // |E(last) - target|
};

struct WeylMeasureReport {
  std::vector<double> cutoffs;
  std::vector<WeylMeasureEstimate> estimates;
};

struct WeylMeasureInput {
  std::string label;
  SpectralSequence masses;  // per-eigenfunction int f |phi_n|^2 d(mu)
  double target = 0;
};

/// Cesaro estimates of the local Weyl measure on a family of test functions.
inline WeylMeasureReport local_weyl_measure(const std::vector<WeylMeasureInput>& inputs,
                                            const std::vector<double>& cutoffs) {
  WeylMeasureReport r;
  r.cutoffs = cutoffs;
  for (const auto& in : inputs) {
    WeylMeasureEstimate e;
    e.label = in.label;
    e.target = in.target;
    e.E = cesaro_mean(in.masses, cutoffs).E;
    e.final_deviation = e.E.empty() ? 0.0 : std::abs(e.E.back() - in.target);
    r.estimates.push_back(std::move(e));
  }
  return r;
}

struct QlSplit {
  double theta = 0;
  std::vector<double> beta0;    // Cesaro fraction with s < theta, per cutoff
  std::vector<double> betainf;  // complement
};

struct QlReport {
  std::vector<double> cutoffs;
  QlSplit main;
  std::vector<QlSplit> sweep;  // other thresholds
};

/// beta0 / beta_inf mass proxies from the concentration statistic s in [0, 1].
inline QlReport ql_decomposition_stat(const SpectralSequence& s, const std::vector<double>& cutoffs,
                                      double theta = 0.99, const std::vector<double>& sweep = {0.5, 0.8, 0.9, 0.95, 0.99}) {
  for (double v : s.values)
    if (v < 0 || v > 1) throw InvariantViolation("ql_decomposition_stat: statistic outside [0, 1]");
  auto split = [&](double th) {
    SpectralSequence ind = s;
    for (auto& v : ind.values) v = v < th ? 1.0 : 0.0;
    QlSplit q;
    q.theta = th;
    q.beta0 = cesaro_mean(ind, cutoffs).E;
    for (double b : q.beta0) q.betainf.push_back(1.0 - b);
    return q;
  };
  QlReport r;
  r.cutoffs = cutoffs;
  r.main = split(theta);
  for (double th : sweep) r.sweep.push_back(split(th));
  return r;
}

}  // namespace srlab::ergodic
