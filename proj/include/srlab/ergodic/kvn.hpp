#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srlab/core/error.hpp"

namespace srlab::ergodic {

/// Extracted index set with its density profile. Indices are 1-based positions n
/// of the input sequence; block j holds n in [2^j, 2^{j+1}).
struct DensityOneSet {
  std::vector<std::size_t> indices;
  std::size_t length = 0;                // input length

  // Per dyadic block (the last one may be partial).
  std::vector<std::size_t> block_ends;   // last n of the block
  std::vector<double> thresholds;        // eps_j = sqrt(sup of running Cesaro mean over the block)
  std::vector<double> density;           // d(n) at block ends
  std::vector<double> certificate;       // guaranteed lower bound on d(n) at block ends
  std::vector<double> running_mean;      // Cesaro mean at block ends
  std::vector<double> kept_sup;          // max u over kept indices of the block

  std::size_t n0 = 0;                    // d is nondecreasing over block ends >= n0
  double tail_sup = 0;                   // kept_sup of the last complete block

  /// d(n) = #{k in S, k <= n} / n.
  double density_at(std::size_t n) const {
    const auto c = std::upper_bound(indices.begin(), indices.end(), n) - indices.begin();
    return static_cast<double>(c) / static_cast<double>(n);
  }
};

/// Dyadic square-root thresholding: in block j keep n with u_n <= eps_j. Markov's
/// inequality on the block bounds the removed count by (block sum)/eps_j, which
/// gives the certificate.
inline DensityOneSet koopman_von_neumann(const std::vector<double>& u) {
  for (double v : u)
    if (!(v >= 0)) throw InvariantViolation("koopman_von_neumann: sequence must be nonnegative");
  DensityOneSet s;
  s.length = u.size();
  const std::size_t N = u.size();
  std::vector<double> running(N);
  double acc = 0;
  for (std::size_t i = 0; i < N; ++i) {
    acc += u[i];
    running[i] = acc / static_cast<double>(i + 1);
  }
  double removed_bound = 0;
  std::size_t kept = 0;
  for (std::size_t start = 1; start <= N; start *= 2) {
    const std::size_t end = std::min(2 * start - 1, N);
    double sup = 0, block_sum = 0;
    for (std::size_t n = start; n <= end; ++n) {
      sup = std::max(sup, running[n - 1]);
      block_sum += u[n - 1];
    }
    const double eps = std::sqrt(sup);
    double ksup = 0;
    for (std::size_t n = start; n <= end; ++n) {
      if (u[n - 1] <= eps) {
        s.indices.push_back(n);
        ksup = std::max(ksup, u[n - 1]);
        ++kept;
      }
    }
    const auto block = static_cast<double>(end - start + 1);
    removed_bound += eps > 0 ? std::min(block, block_sum / eps) : 0.0;
    s.block_ends.push_back(end);
    s.thresholds.push_back(eps);
    s.density.push_back(static_cast<double>(kept) / static_cast<double>(end));
    s.certificate.push_back(1.0 - removed_bound / static_cast<double>(end));
    s.running_mean.push_back(running[end - 1]);
    s.kept_sup.push_back(ksup);
    if (end == N) break;
  }
  // n0: first block end after which the density never decreases.
  std::size_t j0 = s.density.size();
  while (j0 > 0 && (j0 == s.density.size() || s.density[j0 - 1] <= s.density[j0])) --j0;
  s.n0 = s.block_ends.empty() ? 0 : s.block_ends[std::min(j0, s.block_ends.size() - 1)];
  // Last complete block: the final block unless it is partial.
  if (!s.kept_sup.empty()) {
    std::size_t last = s.kept_sup.size() - 1;
    const std::size_t start = std::size_t{1} << last;
    if (s.block_ends[last] != 2 * start - 1 && last > 0) --last;
    s.tail_sup = s.kept_sup[last];
  }
  return s;
}

}  // namespace srlab::ergodic
