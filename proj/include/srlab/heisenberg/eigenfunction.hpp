#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/hermite.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/geometry/models.hpp"
#include "srlab/geometry/pointwise.hpp"
#include "srlab/heisenberg/spectrum.hpp"

namespace srlab::heisenberg {

using complex = std::complex<double>;

/// phi(x,y,z) = e^{imz} sum_{k = k0 mod |m|, |k| <= K|m|} psi_ell(sqrt|m| (x - sqrt(2 pi) k/m)) e^{i sqrt(2 pi) k y},
/// divided by its L2 norm over the fundamental domain.
class WeilBrezinEigenfunction {
public:
  /// `reach`: |x| range over which the truncation gate is guaranteed.
  WeilBrezinEigenfunction(int m, int ell, int k0, double tail_tolerance = 1e-12, double reach = 2 * geometry::sqrt2pi)
      : m_(m), ell_(ell), k0_(k0) {
    if (m == 0) throw NotApplicable("Weil-Brezin eigenfunction needs m != 0");
    if (ell < 0 || k0 < 0 || k0 >= std::abs(m)) throw InvariantViolation("Weil-Brezin: need ell >= 0 and 0 <= k0 < |m|");
    const double scale = std::sqrt(static_cast<double>(std::abs(m)));
    radius_ = hermite_tail_radius(ell, tail_tolerance);
    // |sqrt(2 pi) k/m| >= sqrt(2 pi) (K + 1) for dropped terms; keep them beyond radius_ from |x| <= reach.
    truncation_ = static_cast<int>(std::ceil((reach + radius_ / scale) / geometry::sqrt2pi)) + 1;
    norm_ = std::sqrt(quadrature_norm2());
  }

  /// Truncation fixed by hand; used to show the residual falling as K grows.
  static WeilBrezinEigenfunction with_truncation(int m, int ell, int k0, int K) {
    WeilBrezinEigenfunction f(m, ell, k0);
    f.truncation_ = K;
    f.norm_ = std::sqrt(f.quadrature_norm2());
    return f;
  }

  int m() const noexcept { return m_; }
  int ell() const noexcept { return ell_; }
  int residue() const noexcept { return k0_; }
  int truncation() const noexcept { return truncation_; }
  double lambda() const { return sector_eigenvalue(ell_, m_); }
  double norm() const noexcept { return norm_; }
  /// 2 pi sqrt(2 pi) / sqrt|m|.
  double analytic_norm2() const {
    return 2 * std::numbers::pi * geometry::sqrt2pi / std::sqrt(static_cast<double>(std::abs(m_)));
  }

  complex operator()(const geometry::Point& q) const { return raw(q) / norm_; }

  /// Value of the function on the quotient: reduce q to the fundamental domain with
  /// (x + sqrt(2 pi), y, z) ~ (x, y, z + sqrt(2 pi) y), then evaluate the truncated sum.
  /// Agrees with operator() up to the tail tolerance exactly when the truncation is adequate.
  complex on_quotient(const geometry::Point& q) const {
    const double s = geometry::sqrt2pi;
    const double a = std::floor(q[0] / s);
    const geometry::Point r{q[0] - a * s, q[1] - std::floor(q[1] / s) * s,
                            q[2] - std::floor(q[2] / (2 * std::numbers::pi)) * 2 * std::numbers::pi};
    return std::polar(1.0, m_ * a * s * q[1]) * (*this)(r);
  }

  /// Unnormalized lattice sum.
  complex raw(const geometry::Point& q) const {
    const int am = std::abs(m_);
    const double scale = std::sqrt(static_cast<double>(am));
    const double s = geometry::sqrt2pi;
    complex sum = 0;
    for (int t = -truncation_; t <= truncation_; ++t) {
      const long k = k0_ + static_cast<long>(am) * t;
      const double u = scale * (q[0] - s * static_cast<double>(k) / m_);
      if (std::abs(u) > radius_ + 8) continue;  // below the tail tolerance by many orders
      sum += hermite_function(ell_, u) * std::polar(1.0, s * static_cast<double>(k) * q[1]);
    }
    return sum * std::polar(1.0, m_ * q[2]);
  }

private:
  // y and z integrate exactly (orthogonal Fourier modes); x by the periodic trapezoid rule.
  double quadrature_norm2() const {
    const int n = 512;
    const double h = geometry::sqrt2pi / n;
    const int am = std::abs(m_);
    const double scale = std::sqrt(static_cast<double>(am));
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double x = i * h;
      for (int t = -truncation_; t <= truncation_; ++t) {
        const long k = k0_ + static_cast<long>(am) * t;
        const double v = hermite_function(ell_, scale * (x - geometry::sqrt2pi * static_cast<double>(k) / m_));
        s += v * v;
      }
    }
    return s * h * geometry::sqrt2pi * 2 * std::numbers::pi;
  }

  int m_, ell_, k0_;
  int truncation_ = 0;
  double radius_ = 0;
  double norm_ = 1;
};

/// Normalized torus mode e^{i sqrt(2 pi)(j x + k y)} / (2 pi).
inline complex torus_mode(int j, int k, const geometry::Point& q) {
  return std::polar(1.0 / (2 * std::numbers::pi), geometry::sqrt2pi * (j * q[0] + k * q[1]));
}

struct ResidualReport {
  double residual = 0;  // ||Delta phi + lambda phi|| / ||phi|| on the sample grid
  double norm = 0;
};

/// Residual of the eigen-equation on an n^3 grid over the fundamental domain, with the
/// sixth-order pointwise sub-Laplacian of the Heisenberg frame. Stencil points leaving the
/// domain are folded back through the lattice, so a short truncation shows up as a seam
/// defect. Default difference step: half the grid spacing in x.
inline ResidualReport eigenfunction_residual(const WeilBrezinEigenfunction& phi, int n, double step = 0) {
  const auto frame = geometry::heisenberg_frame();
  const auto grid = geometry::heisenberg_chart(n);
  if (step <= 0) step = 0.5 * grid.spacing(0);
  const double lam = phi.lambda();
  std::vector<double> r2(grid.size()), f2(grid.size());
  auto f = [&](const geometry::Point& q) { return phi.on_quotient(q); };
  parallel_for(grid.size(), [&](std::size_t p) {
    const auto q = grid.point(p);
    const complex v = phi(q);
    const complex lap = geometry::sub_laplacian_at(frame, f, q, step);
    r2[p] = std::norm(lap + lam * v);
    f2[p] = std::norm(v);
  });
  double sr = 0, sf = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    sr += r2[p];
    sf += f2[p];
  }
  return {std::sqrt(sr / sf), std::sqrt(sf * grid.weight(0))};
}

/// Heisenberg-periodic trig observable e^{i sqrt(2 pi)(p x + q y)}.
struct TrigMode {
  int p = 0;
  int q = 0;
};

/// <e_{p,q} phi, phi> for the normalized Weil-Brezin function of (ell, m, k0). Unfolding the
/// lattice sum leaves one Hermite overlap, which is the Laguerre closed form of the ambiguity
/// function of psi_ell.
inline complex sector_mode_mass(int ell, int m, int k0, TrigMode f) {
  const int am = std::abs(m);
  if (f.q % am != 0) return 0.0;
  const double scale = std::sqrt(static_cast<double>(am));
  const double s = geometry::sqrt2pi;
  const double x0 = s * k0 / m;
  const double shift = s * f.q * (m > 0 ? 1 : -1) / scale;
  const double omega = s * f.p / scale;
  return std::polar(hermite_ambiguity(ell, shift, omega), s * f.p * x0 + 0.5 * omega * shift);
}

/// Same integral by the trapezoid rule on the Hermite functions; reference for the closed form.
inline complex sector_mode_mass_quadrature(int ell, int m, int k0, TrigMode f, double du = 0.02) {
  const int am = std::abs(m);
  if (f.q % am != 0) return 0.0;
  const double scale = std::sqrt(static_cast<double>(am));
  const double s = geometry::sqrt2pi;
  const double x0 = s * k0 / m;
  const double shift = s * f.q * (m > 0 ? 1 : -1) / scale;
  const double radius = std::sqrt(2.0 * ell + 1.0) + 40.0 + std::abs(shift);
  const int n = static_cast<int>(std::ceil(2 * radius / du));
  complex sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double u = -radius + i * du;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * hermite_function(ell, u) * hermite_function(ell, u - shift) * std::polar(1.0, s * f.p * (x0 + u / scale));
  }
  return sum * du;
}

/// Same pairing for a torus mode: 1 for the constant observable, 0 otherwise.
inline complex torus_mode_mass(TrigMode f) { return (f.p == 0 && f.q == 0) ? 1.0 : 0.0; }

}  // namespace srlab::heisenberg
