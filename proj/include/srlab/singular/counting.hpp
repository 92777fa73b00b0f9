#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "srlab/core/fit.hpp"
#include "srlab/core/io.hpp"

namespace srlab::singular {

/// Sorted eigenvalues with multiplicities, merged from many sectors.
class MergedSpectrum {
public:
  void add(double lambda, std::int64_t mult) { raw_.emplace_back(lambda, mult); }
  void append(const MergedSpectrum& o) { raw_.insert(raw_.end(), o.raw_.begin(), o.raw_.end()); }

  void finalize() {
    std::sort(raw_.begin(), raw_.end());
    prefix_.resize(raw_.size());
    std::int64_t s = 0;
    for (std::size_t i = 0; i < raw_.size(); ++i) prefix_[i] = (s += raw_[i].second);
  }

  std::int64_t count(double lambda) const {
    const auto it = std::upper_bound(raw_.begin(), raw_.end(), lambda,
                                     [](double v, const std::pair<double, std::int64_t>& e) { return v < e.first; });
    const auto i = static_cast<std::size_t>(it - raw_.begin());
    return i == 0 ? 0 : prefix_[i - 1];
  }
  const std::vector<std::pair<double, std::int64_t>>& entries() const noexcept { return raw_; }

private:
  std::vector<std::pair<double, std::int64_t>> raw_;
  std::vector<std::int64_t> prefix_;
};

struct CountingSamples {
  std::string model;
  std::vector<double> lambdas;
  std::vector<std::int64_t> counts;
  std::vector<bool> complete;
  double completeness_bound = 0;  // every eigenvalue <= bound was enumerated
};

inline CountingSamples sample_counts(const std::string& model, const MergedSpectrum& s, const std::vector<double>& lambdas,
                                     double completeness_bound) {
  CountingSamples out;
  out.model = model;
  out.completeness_bound = completeness_bound;
  for (double l : lambdas) {
    out.lambdas.push_back(l);
    out.counts.push_back(s.count(l));
    out.complete.push_back(l <= completeness_bound);
  }
  return out;
}

/// n evenly spaced points on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

/// N ~ a * lead(lambda) + b * sub(lambda) over a window.
struct LogLawFit {
  std::string model;
  double lo = 0, hi = 0;
  double a = 0, b = 0;
  double relative_rms = 0;
};

/// Fits on complete samples inside [lo, hi]. `power` is 1 for lambda log lambda + lambda,
/// 2 for lambda^2 log lambda + lambda^2.
inline LogLawFit fit_log_law(const CountingSamples& s, double lo, double hi, int power) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < s.lambdas.size(); ++i)
    if (s.complete[i] && s.lambdas[i] >= lo && s.lambdas[i] <= hi) {
      x.push_back(s.lambdas[i]);
      y.push_back(static_cast<double>(s.counts[i]));
    }
  auto pw = [power](double l) { return power == 1 ? l : l * l; };
  const auto f = least_squares(x, y, {[pw](double l) { return pw(l) * std::log(l); }, pw});
  return {s.model, lo, hi, f.coefficients[0], f.coefficients[1], f.relative_rms};
}

/// max |a_i - a_j| / |a_last| over the fits.
inline double fit_stability(const std::vector<LogLawFit>& fits) {
  double lo = fits.front().a, hi = lo;
  for (const auto& f : fits) {
    lo = std::min(lo, f.a);
    hi = std::max(hi, f.a);
  }
  return (hi - lo) / std::abs(fits.back().a);
}

inline std::string counting_csv(const CountingSamples& s) {
  std::ostringstream os;
  os << "lambda,count,model,complete\n";
  for (std::size_t i = 0; i < s.lambdas.size(); ++i)
    os << format_double(s.lambdas[i]) << ',' << s.counts[i] << ',' << s.model << ',' << (s.complete[i] ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace srlab::singular
