#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/geometry/differencing.hpp"
#include "srlab/geometry/grid.hpp"

namespace srlab::geometry {

namespace detail {

using Vec3 = std::array<double, 3>;

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

// Coefficients of v in the basis (a, b, c) (columns), by Cramer's rule.
inline Vec3 decompose(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& v) {
  const double d = det3(a, b, c);
  return {det3(v, b, c) / d, det3(a, v, c) / d, det3(a, b, v) / d};
}

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline DegeneracyError degeneracy(const std::string& what, const ChartGrid& g, const std::vector<std::size_t>& where) {
  std::vector<DegeneracyError::Location> locs;
  locs.reserve(where.size());
  for (auto p : where) locs.push_back({p, g.point(p)});
  std::ostringstream os;
  os << what << " at " << where.size() << " grid point(s)";
  if (!where.empty()) {
    const auto q = g.point(where.front());
    os << ", first at (x=" << q[0] << ", y=" << q[1] << ", z=" << q[2] << ")";
  }
  return DegeneracyError(os.str(), std::move(locs));
}

}  // namespace detail

struct BracketResult {
  VectorFieldSpec field;
  bool one_sided_boundary = false;
};

/// [A,B]^i = sum_j (A^j d_j B^i - B^j d_j A^i), centered differences.
/// The two sums are formed separately, so lie_bracket(B,A) is the exact negation.
inline BracketResult lie_bracket(const VectorFieldSpec& A, const VectorFieldSpec& B) {
  A.validate();
  B.validate();
  require_same_grid(A.c[0], B.c[0], "lie_bracket");
  const ChartGrid& g = A.grid();
  BracketResult out;
  std::array<std::array<ScalarField, 3>, 3> dA, dB;
  for (std::size_t i = 0; i < 3; ++i) {
    dA[i] = gradient(A.c[i], &out.one_sided_boundary);
    dB[i] = gradient(B.c[i], &out.one_sided_boundary);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    ScalarField r(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
      double ab = 0, ba = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        ab += A.c[j][p] * dB[i][j][p];
        ba += B.c[j][p] * dA[i][j][p];
      }
      r[p] = ab - ba;
    }
    out.field.c[i] = std::move(r);
  }
  return out;
}

/// div_mu(V) = (1/rho) sum_i d_i(rho V^i).
inline ScalarField divergence(const VectorFieldSpec& V, const ScalarField& volume) {
  V.validate();
  require_same_grid(V.c[0], volume, "divergence");
  if (volume.min() <= 0) throw InvariantViolation("divergence: volume density must be strictly positive");
  const ChartGrid& g = volume.grid();
  ScalarField out(g);
  for (int i = 0; i < 3; ++i) {
    ScalarField flux(g);
    for (std::size_t p = 0; p < g.size(); ++p) flux[p] = volume[p] * V.c[static_cast<std::size_t>(i)][p];
    const auto d = partial(flux, i);
    for (std::size_t p = 0; p < g.size(); ++p) out[p] += d[p];
  }
  for (std::size_t p = 0; p < g.size(); ++p) out[p] /= volume[p];
  return out;
}

struct ReebOptions {
  /// |det(X,Y,[X,Y])| must exceed factor * max(|X|,|Y|,|[X,Y]|)^3.
  double determinant_floor_factor = 1e-8;
  /// Success gate: residual <= factor * h^2 * coefficient scale.
  double tolerance_factor = 1.0;
  std::optional<double> tolerance;
};

struct ReebResult {
  VectorFieldSpec Z;
  ScalarField a, b;                 // Z = -[X,Y] + a X + b Y
  ScalarField bracket_determinant;  // det(X, Y, [X,Y])
  double residual_x = 0;            // max |[X,Z] mod D|
  double residual_y = 0;            // max |[Y,Z] mod D|
  double tolerance = 0;
  bool success = false;
  bool one_sided_boundary = false;
};

/// Reeb field of the normalized contact form: the unique Z = -[X,Y] + aX + bY with
/// [X,Z] and [Y,Z] in D. Writing W = [X,Y], the two conditions are pointwise linear:
/// b = (W-coefficient of [X,W]) and a = -(W-coefficient of [Y,W]) in the basis (X,Y,W).
inline ReebResult reeb_field(const ContactFrame& frame, const ReebOptions& opt = {}) {
  frame.validate();
  const ChartGrid& g = frame.grid();
  ReebResult out;
  const auto W = lie_bracket(frame.X, frame.Y);
  out.one_sided_boundary = W.one_sided_boundary;
  const auto XW = lie_bracket(frame.X, W.field);
  const auto YW = lie_bracket(frame.Y, W.field);

  const double scale = std::max({frame.X.max_norm(), frame.Y.max_norm(), W.field.max_norm()});
  const double floor = opt.determinant_floor_factor * scale * scale * scale;
  out.bracket_determinant = ScalarField(g);
  out.a = ScalarField(g);
  out.b = ScalarField(g);
  std::vector<std::size_t> degenerate;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = frame.X.at(p), y = frame.Y.at(p), w = W.field.at(p);
    const double d = detail::det3(x, y, w);
    out.bracket_determinant[p] = d;
    if (!(std::abs(d) > floor)) {
      degenerate.push_back(p);
      continue;
    }
    out.b[p] = detail::decompose(x, y, w, XW.field.at(p))[2];
    out.a[p] = -detail::decompose(x, y, w, YW.field.at(p))[2];
  }
  if (!degenerate.empty())
    throw detail::degeneracy("frame is not contact: det(X, Y, [X,Y]) vanishes", g, degenerate);

  for (std::size_t i = 0; i < 3; ++i) {
    ScalarField zi(g);
    for (std::size_t p = 0; p < g.size(); ++p)
      zi[p] = -W.field.c[i][p] + out.a[p] * frame.X.c[i][p] + out.b[p] * frame.Y.c[i][p];
    out.Z.c[i] = std::move(zi);
  }

  const auto XZ = lie_bracket(frame.X, out.Z);
  const auto YZ = lie_bracket(frame.Y, out.Z);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = frame.X.at(p), y = frame.Y.at(p), w = W.field.at(p);
    out.residual_x = std::max(out.residual_x, std::abs(detail::decompose(x, y, w, XZ.field.at(p))[2]));
    out.residual_y = std::max(out.residual_y, std::abs(detail::decompose(x, y, w, YZ.field.at(p))[2]));
  }
  const double h = g.max_spacing();
  const double coeff_scale = std::max({1.0, frame.X.max_norm(), frame.Y.max_norm()});
  out.tolerance = opt.tolerance ? *opt.tolerance : opt.tolerance_factor * h * h * coeff_scale;
  out.success = out.residual_x <= out.tolerance && out.residual_y <= out.tolerance;
  return out;
}

struct ContactFormResult {
  OneFormSpec alpha;
  ScalarField dalpha_xy;           // d alpha(X,Y) by finite differences of alpha
  double max_dalpha_deviation = 0; // max |d alpha(X,Y) - 1|
  double max_alpha_z_deviation = 0;// max |alpha(Z) - 1|
};

/// alpha_g with alpha(X) = alpha(Y) = 0, alpha(Z) = 1, pointwise 3x3 solve.
inline ContactFormResult normalized_contact_form(const ContactFrame& frame, const ReebResult& reeb) {
  const ChartGrid& g = frame.grid();
  ContactFormResult out;
  for (auto& c : out.alpha.c) c = ScalarField(g);
  std::vector<std::size_t> degenerate;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = frame.X.at(p), y = frame.Y.at(p), z = reeb.Z.at(p);
    // Rows x, y, z: alpha = M^{-1} e_3, i.e. the cross product y x z divided by det.
    const double d = detail::det3(x, y, z);
    const double scale = detail::norm(x) * detail::norm(y) * detail::norm(z);
    if (!(std::abs(d) > 1e-12 * scale)) {
      degenerate.push_back(p);
      continue;
    }
    const detail::Vec3 cross{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
    for (std::size_t i = 0; i < 3; ++i) out.alpha.c[i][p] = cross[i] / d;
  }
  if (!degenerate.empty()) throw detail::degeneracy("contact form solve is singular", g, degenerate);

  std::array<std::array<ScalarField, 3>, 3> da;  // da[j][i] = d_i alpha_j
  for (std::size_t j = 0; j < 3; ++j) da[j] = gradient(out.alpha.c[j]);
  out.dalpha_xy = ScalarField(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = frame.X.at(p), y = frame.Y.at(p);
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) s += (da[j][i][p] - da[i][j][p]) * x[i] * y[j];
    out.dalpha_xy[p] = s;
    out.max_dalpha_deviation = std::max(out.max_dalpha_deviation, std::abs(s - 1.0));
    out.max_alpha_z_deviation = std::max(out.max_alpha_z_deviation, std::abs(out.alpha.pair(reeb.Z, p) - 1.0));
  }
  return out;
}

struct PoppResult {
  ScalarField density;            // |alpha ^ d alpha| against |dx dy dz|, finite differences
  ScalarField algebraic_density;  // 1/|det(X,Y,Z)|, exact for an exact Reeb field
  ScalarField probability;        // density / total_mass
  double total_mass = 0;
  double max_route_gap = 0;       // max |density - algebraic_density|
};

inline PoppResult popp_density(const ContactFrame& frame, const ReebResult& reeb, const ContactFormResult& form) {
  const ChartGrid& g = frame.grid();
  const auto& a = form.alpha.c;
  std::array<std::array<ScalarField, 3>, 3> da;
  for (std::size_t j = 0; j < 3; ++j) da[j] = gradient(a[j]);
  PoppResult out;
  out.density = ScalarField(g);
  out.algebraic_density = ScalarField(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    // alpha . curl(alpha)
    const double curl_x = da[2][1][p] - da[1][2][p];
    const double curl_y = da[0][2][p] - da[2][0][p];
    const double curl_z = da[1][0][p] - da[0][1][p];
    out.density[p] = std::abs(a[0][p] * curl_x + a[1][p] * curl_y + a[2][p] * curl_z);
    out.algebraic_density[p] = 1.0 / std::abs(detail::det3(frame.X.at(p), frame.Y.at(p), reeb.Z.at(p)));
    out.max_route_gap = std::max(out.max_route_gap, std::abs(out.density[p] - out.algebraic_density[p]));
  }
  out.total_mass = out.density.integral();
  out.probability = out.density;
  for (auto& v : out.probability.values()) v /= out.total_mass;
  return out;
}

/// Everything derived from a frame in one pass.
struct ContactStructure {
  ReebResult reeb;
  ContactFormResult form;
  PoppResult popp;
};

inline ContactStructure analyze(const ContactFrame& frame, const ReebOptions& opt = {}) {
  ContactStructure s;
  s.reeb = reeb_field(frame, opt);
  s.form = normalized_contact_form(frame, s.reeb);
  s.popp = popp_density(frame, s.reeb, s.form);
  return s;
}

}  // namespace srlab::geometry
