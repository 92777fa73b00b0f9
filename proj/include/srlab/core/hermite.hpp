#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace srlab {

/// L2(R)-normalized Hermite functions psi_n(u) = (2^n n! sqrt(pi))^{-1/2} H_n(u) e^{-u^2/2}
/// for n = 0..out.size()-1, by the three-term recurrence. The Gaussian factor is
/// applied at the end with a tracked exponent so large n and |u| do not underflow early.
inline void hermite_functions(double u, std::span<double> out) {
  if (out.empty()) return;
  constexpr double big = 1e150;
  const double base = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  double log_scale = -0.5 * u * u;
  double prev = 0.0;
  double cur = base;
  auto emit = [&](std::size_t n, double v) { out[n] = v * std::exp(log_scale); };
  emit(0, cur);
  for (std::size_t n = 1; n < out.size(); ++n) {
    const double k = static_cast<double>(n - 1);
    const double next = std::sqrt(2.0 / (k + 1)) * u * cur - std::sqrt(k / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > big) {
      cur /= big;
      prev /= big;
      log_scale += std::log(big);
      // earlier outputs were already emitted with the old scale
    }
    emit(n, cur);
  }
}

inline double hermite_function(int n, double u) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  hermite_functions(u, v);
  return v.back();
}

/// psi_n'(u) = sqrt(n/2) psi_{n-1}(u) - sqrt((n+1)/2) psi_{n+1}(u).
inline double hermite_function_derivative(int n, double u) {
  std::vector<double> v(static_cast<std::size_t>(n) + 2);
  hermite_functions(u, v);
  const double lower = n > 0 ? std::sqrt(n / 2.0) * v[static_cast<std::size_t>(n) - 1] : 0.0;
  return lower - std::sqrt((n + 1) / 2.0) * v[static_cast<std::size_t>(n) + 1];
}

/// Upper bound on sup_{|v| >= u} |psi_n(v)| valid beyond the turning point
/// sqrt(2n+1), where |psi_n| is monotonically decreasing. Returns 1 inside.
inline double hermite_tail_bound(int n, double u) {
  u = std::abs(u);
  if (u * u <= 2.0 * n + 1.0) return 1.0;
  return std::abs(hermite_function(n, u));
}

/// Smallest half-width u (in oscillator units) with hermite_tail_bound(n, u) <= tol
/// for every order up to n_max.
inline double hermite_tail_radius(int n_max, double tol) {
  double u = std::sqrt(2.0 * n_max + 1.0) + 0.5;
  for (int n = 0; n <= n_max; ++n)
    while (hermite_tail_bound(n, u) > tol) u += 0.25;
  return u;
}

/// e^{-x/2} L_n(x) for x >= 0, forward recurrence with a tracked exponent.
inline double laguerre_function(int n, double x) {
  constexpr double big = 1e150;
  double log_scale = -0.5 * x;
  double prev = 1.0, cur = 1.0 - x;
  if (n == 0) return std::exp(log_scale);
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > big) {
      cur /= big;
      prev /= big;
      log_scale += std::log(big);
    }
  }
  return cur * std::exp(log_scale);
}

/// int psi_n(v + tau/2) psi_n(v - tau/2) e^{i omega v} dv = e^{-r^2/4} L_n(r^2/2), r^2 = tau^2 + omega^2.
inline double hermite_ambiguity(int n, double tau, double omega) {
  return laguerre_function(n, 0.5 * (tau * tau + omega * omega));
}

}  // namespace srlab
