#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "srlab/core/error.hpp"

namespace srlab {

/// Real symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }
};

namespace detail {

inline std::vector<double> squared(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
  return out;
}

// Sturm sequence count of eigenvalues strictly below x.
inline std::size_t sturm_count(const std::vector<double>& d, const std::vector<double>& e2,
                               double x, double pivot_floor) {
  std::size_t count = 0;
  double q = d[0] - x;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (std::abs(q) < pivot_floor) q = -pivot_floor;
    q = d[i] - x - e2[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

}  // namespace detail

/// Eigenvalue bracketing by Sturm sequences and bisection. Holds the squared
/// off-diagonal and Gershgorin bounds so repeated queries are cheap.
class SturmBisection {
public:
  explicit SturmBisection(const SymTridiagonal& t) : d_(t.diag), off_(t.off), e2_(detail::squared(t.off)) {
    if (d_.empty()) throw StructuralError("empty tridiagonal matrix");
    if (t.off.size() + 1 != d_.size()) throw StructuralError("tridiagonal off-diagonal size mismatch");
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    double scale = 0;
    for (std::size_t i = 0; i < d_.size(); ++i) {
      double r = 0;
      if (i > 0) r += std::abs(t.off[i - 1]);
      if (i + 1 < d_.size()) r += std::abs(t.off[i]);
      lo_ = std::min(lo_, d_[i] - r);
      hi_ = std::max(hi_, d_[i] + r);
      scale = std::max(scale, std::abs(d_[i]) + r);
    }
    pivot_floor_ = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
    lo_ -= pivot_floor_;
    hi_ += pivot_floor_;
  }

  std::size_t size() const noexcept { return d_.size(); }

  /// Number of eigenvalues strictly below x.
  std::size_t count_below(double x) const {
    if (x <= lo_) return 0;
    if (x > hi_) return d_.size();
    return detail::sturm_count(d_, e2_, x, pivot_floor_);
  }

  /// k-th smallest eigenvalue (0-based), to about machine precision.
  double eigenvalue(std::size_t k) const {
    if (k >= d_.size()) throw StructuralError("eigenvalue index out of range");
    return bisect(k, lo_, hi_);
  }

  std::vector<double> lowest(std::size_t count) const {
    count = std::min(count, d_.size());
    std::vector<double> out(count);
    double floor = lo_;
    for (std::size_t k = 0; k < count; ++k) {
      // eigenvalue k is >= eigenvalue k-1; tighten the bracket from below
      out[k] = bisect(k, std::max(lo_, floor - pivot_floor_), hi_);
      floor = out[k];
    }
    return out;
  }

  /// k-th eigenvalue starting from a nearby guess: Rayleigh quotient iteration, accepted
  /// only if Sturm counts confirm it is the k-th one; bisection otherwise.
  double refine(std::size_t k, double guess) const {
    if (k >= d_.size()) throw StructuralError("eigenvalue index out of range");
    const std::size_t n = d_.size();
    std::vector<double> v(n), w(n), c(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * std::sin(0.37 * static_cast<double>(i) + 0.1);
    double x = guess;
    for (int it = 0; it < 8; ++it) {
      // (T - x) w = v by the Thomas algorithm.
      double denom = d_[0] - x;
      if (denom == 0) denom = pivot_floor_;
      if (n > 1) c[0] = off_[0] / denom;
      w[0] = v[0] / denom;
      for (std::size_t i = 1; i < n; ++i) {
        denom = d_[i] - x - off_[i - 1] * c[i - 1];
        if (denom == 0) denom = pivot_floor_;
        if (i + 1 < n) c[i] = off_[i] / denom;
        w[i] = (v[i] - off_[i - 1] * w[i - 1]) / denom;
      }
      for (std::size_t i = n - 1; i-- > 0;) w[i] -= c[i] * w[i + 1];
      double norm = 0;
      for (double e : w) norm += e * e;
      norm = std::sqrt(norm);
      if (!std::isfinite(norm) || norm == 0) break;
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
      // x + v^T (T - x) v
      double q = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double tv = (d_[i] - x) * v[i];
        if (i > 0) tv += off_[i - 1] * v[i - 1];
        if (i + 1 < n) tv += off_[i] * v[i + 1];
        q += v[i] * tv;
      }
      const double next = x + q;
      const bool done = std::abs(next - x) <= 1e-13 * std::abs(next) + 16 * pivot_floor_;
      x = next;
      if (done) break;
    }
    const double tol = std::max(1e-12 * std::abs(x), 64 * pivot_floor_);
    if (std::isfinite(x) && count_below(x - tol) == k && count_below(x + tol) == k + 1) return x;
    return bisect(k, lo_, hi_);
  }

  /// All eigenvalues <= bound, ascending.
  std::vector<double> below(double bound) const {
    const std::size_t n = count_below(std::nextafter(bound, std::numeric_limits<double>::infinity()));
    return lowest(n);
  }

private:
  double bisect(std::size_t k, double a, double b) const {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(mid) > k)
        b = mid;
      else
        a = mid;
      if (b - a <= 2 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
        break;
    }
    return 0.5 * (a + b);
  }

  std::vector<double> d_;
  std::vector<double> off_;
  std::vector<double> e2_;
  double lo_ = 0, hi_ = 0;
  double pivot_floor_ = 0;
};

/// Unit eigenvector for an (isolated) eigenvalue by inverse iteration.
inline std::vector<double> tridiagonal_eigenvector(const SymTridiagonal& t, double lambda,
                                                   int iterations = 3) {
  const std::size_t n = t.size();
  double scale = 0;
  for (double v : t.diag) scale = std::max(scale, std::abs(v));
  const double shift = lambda + 64 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  std::vector<double> x(n, 1.0), c(n), dp(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 1e-3 * std::sin(0.37 * static_cast<double>(i) + 0.1);
  for (int it = 0; it < iterations; ++it) {
    // Thomas algorithm on (T - shift I).
    double denom = t.diag[0] - shift;
    if (denom == 0) denom = 1e-300;
    if (n > 1) c[0] = t.off[0] / denom;
    dp[0] = x[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = t.diag[i] - shift - t.off[i - 1] * c[i - 1];
      if (denom == 0) denom = 1e-300;
      if (i + 1 < n) c[i] = t.off[i] / denom;
      dp[i] = (x[i] - t.off[i - 1] * dp[i - 1]) / denom;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - c[i] * x[i + 1];
    double norm = 0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  // Fix the sign so that the largest component is positive.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  if (x[imax] < 0)
    for (double& v : x) v = -v;
  return x;
}

}  // namespace srlab
