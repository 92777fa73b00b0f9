#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "srlab/core/error.hpp"

namespace srlab {

struct LinearFit {
  std::vector<double> coefficients;
  std::vector<double> residuals;   // data - model, per sample
  double rms_residual = 0;
  double relative_rms = 0;         // rms residual / rms data
};

/// Least squares for y ~ sum_j c_j basis_j(x).
inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<std::function<double(double)>>& basis,
                               std::size_t min_samples = 10) {
  if (x.size() != y.size()) throw StructuralError("fit: x and y lengths differ");
  if (x.size() < std::max(min_samples, basis.size()))
    throw FitError("fit: " + std::to_string(x.size()) + " samples, need at least " +
                   std::to_string(std::max(min_samples, basis.size())));
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = basis[static_cast<std::size_t>(j)](x[static_cast<std::size_t>(i)]);
    b(i) = y[static_cast<std::size_t>(i)];
  }
  // Column scaling keeps the QR well conditioned for lambda^2 log lambda style bases.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (scale(j) == 0) throw FitError("fit: basis function vanishes on all samples");
    a.col(j) /= scale(j);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < m) throw FitError("fit: rank-deficient design matrix");
  Eigen::VectorXd c = qr.solve(b);
  LinearFit out;
  out.coefficients.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) out.coefficients[static_cast<std::size_t>(j)] = c(j) / scale(j);
  const Eigen::VectorXd r = b - a * c;
  out.residuals.assign(r.data(), r.data() + r.size());
  out.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  const double rms_data = std::sqrt(b.squaredNorm() / static_cast<double>(n));
  out.relative_rms = rms_data > 0 ? out.rms_residual / rms_data : 0.0;
  return out;
}

}  // namespace srlab
