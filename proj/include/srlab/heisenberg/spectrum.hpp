#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/fit.hpp"

namespace srlab::heisenberg {

enum class Family { Sector = 0, Torus = 1 };
enum class Origin { Exact = 0, Numeric = 1 };

inline const char* to_string(Family f) { return f == Family::Sector ? "sector" : "torus"; }
inline const char* to_string(Origin o) { return o == Origin::Exact ? "exact" : "numeric"; }

/// One row of a spectrum. Sector rows: (ell, residue) with residue in [0, |m|), or
/// residue = -1 for an aggregated row standing for all |m| residues (multiplicity |m|).
/// Torus rows (m = 0): ell and residue carry the Fourier pair (j, k).
struct EigenPair {
  double lambda = 0;
  std::int64_t multiplicity = 1;
  Family family = Family::Sector;
  int m = 0;
  int ell = 0;
  int residue = 0;
  Origin origin = Origin::Exact;
  std::vector<double> vector;  // optional grid coefficients

  int j() const { return ell; }
  int k() const { return residue; }

  bool operator==(const EigenPair&) const = default;
};

inline double sector_eigenvalue(int ell, int m) {
  return static_cast<double>(2 * ell + 1) * static_cast<double>(std::abs(m));
}
inline double torus_eigenvalue(int j, int k) {
  return 2.0 * std::numbers::pi * static_cast<double>(j * j + k * k);
}

/// Deterministic order: lambda, family, |m| (or j^2+k^2), ell, residue, m.
inline bool table_order(const EigenPair& a, const EigenPair& b) {
  auto key = [](const EigenPair& e) {
    const int size = e.family == Family::Sector ? std::abs(e.m) : e.ell * e.ell + e.residue * e.residue;
    return std::make_tuple(e.lambda, static_cast<int>(e.family), size, e.ell, e.residue, e.m);
  };
  return key(a) < key(b);
}

/// Concentration statistic s = m^2 / (lambda + m^2); 0 on the torus family.
inline double concentration_stat(const EigenPair& e) {
  if (e.m == 0) return 0.0;
  const double m2 = static_cast<double>(e.m) * e.m;
  return m2 / (e.lambda + m2);
}

class SpectrumTable {
public:
  SpectrumTable() = default;
  SpectrumTable(std::vector<EigenPair> entries, double lambda_max) : entries_(std::move(entries)), lambda_max_(lambda_max) {
    std::stable_sort(entries_.begin(), entries_.end(), table_order);
    if (!entries_.empty() && entries_.back().lambda > lambda_max_)
      throw InvariantViolation("spectrum table entry exceeds lambda_max");
    prefix_.resize(entries_.size());
    std::int64_t s = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) prefix_[i] = (s += entries_[i].multiplicity);
  }

  const std::vector<EigenPair>& entries() const noexcept { return entries_; }
  double lambda_max() const noexcept { return lambda_max_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::int64_t total_multiplicity() const { return prefix_.empty() ? 0 : prefix_.back(); }

  /// Number of rows with lambda <= x.
  std::size_t rows_below(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(entries_.begin(), entries_.end(), x, [](double v, const EigenPair& e) { return v < e.lambda; }) -
        entries_.begin());
  }
  std::int64_t prefix(std::size_t rows) const { return rows == 0 ? 0 : prefix_[rows - 1]; }

  /// Distinct eigenvalues in [lo, hi].
  std::vector<double> distinct(double lo, double hi) const {
    std::vector<double> out;
    for (const auto& e : entries_)
      if (e.lambda >= lo && e.lambda <= hi && (out.empty() || out.back() != e.lambda)) out.push_back(e.lambda);
    return out;
  }

private:
  std::vector<EigenPair> entries_;
  std::vector<std::int64_t> prefix_;
  double lambda_max_ = 0;
};

struct SpectrumBudget {
  std::size_t max_rows = 50'000'000;
};

/// Both families up to lambda_max. Sector rows are aggregated over residues.
inline SpectrumTable exact_spectrum(double lambda_max, const SpectrumBudget& budget = {}) {
  if (!(lambda_max > 0) || !std::isfinite(lambda_max)) throw InvariantViolation("exact_spectrum: lambda_max must be positive");
  // Row count first, so an oversized request fails before allocating.
  std::size_t rows = 0;
  const auto m_max = static_cast<int>(std::floor(lambda_max));
  for (int am = 1; am <= m_max; ++am) rows += 2 * static_cast<std::size_t>((lambda_max / am - 1) / 2 + 1);
  const double r2 = lambda_max / (2 * std::numbers::pi);
  const auto jmax = static_cast<int>(std::floor(std::sqrt(r2)));
  for (int j = -jmax; j <= jmax; ++j)
    for (int k = -jmax; k <= jmax; ++k)
      if (torus_eigenvalue(j, k) <= lambda_max) ++rows;
  if (rows > budget.max_rows)
    throw CapacityError("exact_spectrum: " + std::to_string(rows) + " rows exceed the budget of " +
                        std::to_string(budget.max_rows));

  std::vector<EigenPair> entries;
  entries.reserve(rows);
  for (int am = 1; am <= m_max; ++am) {
    for (int ell = 0;; ++ell) {
      const double lam = sector_eigenvalue(ell, am);
      if (lam > lambda_max) break;
      for (int m : {-am, am}) entries.push_back({lam, am, Family::Sector, m, ell, -1, Origin::Exact, {}});
    }
  }
  for (int j = -jmax; j <= jmax; ++j)
    for (int k = -jmax; k <= jmax; ++k) {
      const double lam = torus_eigenvalue(j, k);
      if (lam <= lambda_max) entries.push_back({lam, 1, Family::Torus, 0, j, k, Origin::Exact, {}});
    }
  return SpectrumTable(std::move(entries), lambda_max);
}

/// N(lambda) = #{n : lambda_n <= lambda} with multiplicity.
inline std::int64_t counting_function(const SpectrumTable& t, double lambda) {
  if (lambda > t.lambda_max())
    throw IncompletenessError("counting_function: lambda " + std::to_string(lambda) + " exceeds table bound " +
                              std::to_string(t.lambda_max()));
  return t.prefix(t.rows_below(lambda));
}

struct WeylFit {
  double c = 0;                 // N ~ c lambda^2
  std::vector<double> lambdas;  // sample points (distinct eigenvalues)
  std::vector<double> residuals;
  double relative_rms = 0;
};

/// Least squares N(lambda) = c lambda^2, sampled at the distinct eigenvalues in the window.
inline WeylFit weyl_constant_fit(const SpectrumTable& t, double lo, double hi) {
  if (lo < 0 || hi > t.lambda_max() || !(hi > lo))
    throw InvariantViolation("weyl_constant_fit: window must lie inside [0, lambda_max]");
  WeylFit out;
  out.lambdas = t.distinct(lo, hi);
  std::vector<double> n;
  for (double l : out.lambdas) n.push_back(static_cast<double>(counting_function(t, l)));
  const auto fit = least_squares(out.lambdas, n, {[](double l) { return l * l; }});
  out.c = fit.coefficients[0];
  out.residuals = fit.residuals;
  out.relative_rms = fit.relative_rms;
  return out;
}

/// (1/N(lambda)) sum_{lambda_n <= lambda} chi(s_n), multiplicity-weighted.
inline double concentration_cesaro(const SpectrumTable& t, double lambda, const std::function<double(double)>& chi) {
  const auto rows = t.rows_below(lambda);
  if (lambda > t.lambda_max()) throw IncompletenessError("concentration_cesaro: lambda exceeds table bound");
  double s = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& e = t.entries()[i];
    s += static_cast<double>(e.multiplicity) * chi(concentration_stat(e));
  }
  return s / static_cast<double>(t.prefix(rows));
}

/// Same statistic at increasing cutoffs in one pass.
inline std::vector<double> concentration_profile(const SpectrumTable& t, const std::vector<double>& cutoffs,
                                                 const std::function<double(double)>& chi) {
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw InvariantViolation("cutoffs must be increasing");
  if (!cutoffs.empty() && cutoffs.back() > t.lambda_max())
    throw IncompletenessError("concentration_profile: cutoff exceeds table bound");
  std::vector<double> out;
  double s = 0;
  std::int64_t n = 0;
  std::size_t i = 0;
  for (double c : cutoffs) {
    for (; i < t.size() && t.entries()[i].lambda <= c; ++i) {
      const auto& e = t.entries()[i];
      s += static_cast<double>(e.multiplicity) * chi(concentration_stat(e));
      n += e.multiplicity;
    }
    out.push_back(n > 0 ? s / static_cast<double>(n) : 0.0);
  }
  return out;
}

/// Per-index statistic sequence s_n (multiplicity-expanded) for lambda_n <= lambda.
inline std::vector<double> expanded_stat(const SpectrumTable& t, double lambda) {
  std::vector<double> out;
  const auto rows = t.rows_below(lambda);
  out.reserve(static_cast<std::size_t>(t.prefix(rows)));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& e = t.entries()[i];
    out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), concentration_stat(e));
  }
  return out;
}

struct Factorization {
  double r = 0;             // eigenvalue of sqrt(Z*Z) on the sector
  double omega = 0;         // lambda / |m|
  double odd_residual = 0;  // distance of omega to the nearest odd integer
};

/// -Delta = R Omega on sector m: R = |m|, Omega = lambda/|m| must be an odd integer.
inline Factorization factorization_check(const EigenPair& e) {
  if (e.m == 0) throw NotApplicable("factorization_check: torus-family eigenpair (m = 0) has no sector factorization");
  Factorization f;
  f.r = std::abs(e.m);
  f.omega = e.lambda / f.r;
  const double nearest_odd = 2.0 * std::round((f.omega - 1.0) / 2.0) + 1.0;
  f.odd_residual = std::abs(f.omega - nearest_odd);
  return f;
}

}  // namespace srlab::heisenberg
