#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "srlab/core/error.hpp"
#include "srlab/geometry/grid.hpp"

namespace srlab::geometry {

/// Discrete -Delta_mu = W^{-1} sum_i D_i^T W D_i, where D_i applies X_i with centered
/// differences and W = diag(rho * cell weight). Self-adjoint in <f,g> = f^T W g by
/// construction and positive semidefinite.
class SubLaplacian {
public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SubLaplacian(Sparse stiffness, Eigen::VectorXd mass, std::vector<Sparse> derivatives, ChartGrid grid)
      : stiffness_(std::move(stiffness)), mass_(std::move(mass)), derivatives_(std::move(derivatives)),
        grid_(std::move(grid)) {}

  const Sparse& stiffness() const noexcept { return stiffness_; }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }
  const ChartGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(mass_.size()); }

  /// -Delta f.
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    return (stiffness_ * f).cwiseQuotient(mass_);
  }
  ScalarField apply(const ScalarField& f) const {
    const auto r = apply(as_vector(f));
    return ScalarField(grid_, std::vector<double>(r.data(), r.data() + r.size()));
  }

  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return f.dot(mass_.cwiseProduct(g));
  }
  double norm(const Eigen::VectorXd& f) const { return std::sqrt(inner(f, f)); }

  /// <-Delta f, f>.
  double quadratic_form(const Eigen::VectorXd& f) const { return f.dot(stiffness_ * f); }

  /// sum_i ||X_i f||^2 in L^2(mu), same differences as the operator.
  double dirichlet_integral(const Eigen::VectorXd& f) const {
    double s = 0;
    for (const auto& d : derivatives_) {
      const Eigen::VectorXd xf = d * f;
      s += xf.dot(mass_.cwiseProduct(xf));
    }
    return s;
  }

  /// W^{-1/2} A W^{-1/2}: same spectrum as -Delta, symmetric in the Euclidean sense.
  Sparse symmetric_form() const {
    const Eigen::VectorXd s = mass_.cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * stiffness_ * s.asDiagonal();
  }

  static Eigen::VectorXd as_vector(const ScalarField& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
  }

private:
  Sparse stiffness_;
  Eigen::VectorXd mass_;
  std::vector<Sparse> derivatives_;
  ChartGrid grid_;
};

namespace detail {

inline SubLaplacian::Sparse directional_derivative(const VectorFieldSpec& V) {
  const ChartGrid& g = V.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.size() * 6);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto m = g.multi_index(p);
    for (int d = 0; d < 3; ++d) {
      const double c = V.c[static_cast<std::size_t>(d)][p];
      if (c == 0.0) continue;
      const int nd = g.n(d);
      auto plus = m, minus = m;
      plus[static_cast<std::size_t>(d)] = (m[static_cast<std::size_t>(d)] + 1) % nd;
      minus[static_cast<std::size_t>(d)] = (m[static_cast<std::size_t>(d)] - 1 + nd) % nd;
      const double w = c / (2 * g.spacing(d));
      const auto row = static_cast<Eigen::Index>(p);
      trip.emplace_back(row, static_cast<Eigen::Index>(g.index(plus[0], plus[1], plus[2])), w);
      trip.emplace_back(row, static_cast<Eigen::Index>(g.index(minus[0], minus[1], minus[2])), -w);
    }
  }
  SubLaplacian::Sparse D(n, n);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

}  // namespace detail

/// Assembly on a fully periodic chart. Quasi-periodic quotients are handled by the
/// sector reduction, not here.
inline SubLaplacian assemble_laplacian(const ContactFrame& frame) {
  frame.validate();
  const ChartGrid& g = frame.grid();
  for (int d = 0; d < 3; ++d)
    if (!g.axis(d).periodic)
      throw UnsupportedConfiguration("assemble_laplacian: axis " + std::to_string(d) + " is not periodic");
  Eigen::VectorXd mass(static_cast<Eigen::Index>(g.size()));
  for (std::size_t p = 0; p < g.size(); ++p) mass(static_cast<Eigen::Index>(p)) = frame.volume[p] * g.weight(p);
  std::vector<SubLaplacian::Sparse> ds{detail::directional_derivative(frame.X), detail::directional_derivative(frame.Y)};
  SubLaplacian::Sparse A(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  for (const auto& d : ds) {
    SubLaplacian::Sparse t = SubLaplacian::Sparse(d.transpose()) * mass.asDiagonal() * d;
    A += t;
  }
  // Symmetrize away the last-bit asymmetry of the sparse product.
  SubLaplacian::Sparse At = A.transpose();
  A = 0.5 * (A + At);
  A.makeCompressed();
  return SubLaplacian(std::move(A), std::move(mass), std::move(ds), g);
}

struct ConjugationReport {
  std::vector<double> residuals;  // one per test function, relative to ||f||_{mu1}
  double max_residual = 0;
};

/// For mu2 = h^2 mu1 and J f = h f, checks J Delta_2 J^{-1} = Delta_1 + h Delta_2(1/h)
/// on each test function.
inline ConjugationReport conjugation_check(const ContactFrame& frame, const ScalarField& volume1,
                                           const ScalarField& volume2, const std::vector<ScalarField>& testfns) {
  require_same_grid(volume1, volume2, "conjugation_check");
  const ChartGrid& g = volume1.grid();
  ScalarField h(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!(volume1[p] > 0) || !(volume2[p] > 0))
      throw InvariantViolation("conjugation_check: volumes must be strictly positive");
    h[p] = std::sqrt(volume2[p] / volume1[p]);
  }
  const auto L1 = assemble_laplacian(ContactFrame{frame.X, frame.Y, volume1});
  const auto L2 = assemble_laplacian(ContactFrame{frame.X, frame.Y, volume2});
  const Eigen::VectorXd hv = SubLaplacian::as_vector(h);
  const Eigen::VectorXd potential = hv.cwiseProduct(L2.apply(Eigen::VectorXd(hv.cwiseInverse())));
  ConjugationReport out;
  for (const auto& f : testfns) {
    require_same_grid(f, volume1, "conjugation_check");
    const Eigen::VectorXd fv = SubLaplacian::as_vector(f);
    // With L = -Delta: -h L2(f/h) + L1 f + h L2(1/h) f.
    const Eigen::VectorXd r =
        -hv.cwiseProduct(L2.apply(Eigen::VectorXd(fv.cwiseQuotient(hv)))) + L1.apply(fv) + potential.cwiseProduct(fv);
    const double nf = L1.norm(fv);
    const double res = nf > 0 ? L1.norm(r) / nf : L1.norm(r);
    out.residuals.push_back(res);
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

}  // namespace srlab::geometry
