#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "srlab/core/parallel.hpp"
#include "srlab/heisenberg/eigenfunction.hpp"
#include "srlab/heisenberg/spectrum.hpp"

namespace srlab::heisenberg {

/// Finite sum of Heisenberg-periodic modes c * e^{i sqrt(2 pi)(p x + q y)}.
/// Such functions are invariant under the lattice, so they are functions on the quotient.
struct TrigObservable {
  std::vector<std::pair<complex, TrigMode>> terms;
  std::string label;

  static TrigObservable constant(double c = 1.0) { return {{{c, {0, 0}}}, "const"}; }
  static TrigObservable cosine(int p, int q) {
    return {{{0.5, {p, q}}, {0.5, {-p, -q}}}, "cos(" + std::to_string(p) + "," + std::to_string(q) + ")"};
  }
  static TrigObservable sine(int p, int q) {
    return {{{complex(0, -0.5), {p, q}}, {complex(0, 0.5), {-p, -q}}},
            "sin(" + std::to_string(p) + "," + std::to_string(q) + ")"};
  }

  double operator()(const geometry::Point& x) const {
    complex s = 0;
    for (const auto& [c, mode] : terms) s += c * std::polar(1.0, geometry::sqrt2pi * (mode.p * x[0] + mode.q * x[1]));
    return s.real();
  }
  /// Mean against the normalized Popp (here Lebesgue) measure.
  double mean() const {
    complex s = 0;
    for (const auto& [c, mode] : terms)
      if (mode.p == 0 && mode.q == 0) s += c;
    return s.real();
  }
};

/// Per-eigenfunction masses <f phi_n, phi_n> for lambda_n <= lambda, one entry per
/// eigenfunction (aggregated sector rows are expanded over residues), in table order.
struct PairingSequence {
  std::vector<double> lambdas;
  std::vector<double> values;
};

inline PairingSequence eigenfunction_masses(const SpectrumTable& t, const TrigObservable& f, double lambda) {
  if (lambda > t.lambda_max()) throw IncompletenessError("eigenfunction_masses: lambda exceeds table bound");
  const auto rows = t.rows_below(lambda);
  std::vector<std::vector<double>> per_row(rows);
  parallel_for(rows, [&](std::size_t i) {
    const auto& e = t.entries()[i];
    auto& out = per_row[i];
    if (e.family == Family::Torus) {
      out.push_back(f.mean());
      return;
    }
    std::vector<std::pair<complex, complex>> overlaps;  // (coefficient, overlap at residue 0)
    for (const auto& [c, mode] : f.terms) overlaps.emplace_back(c, sector_mode_mass(e.ell, e.m, 0, mode));
    const int am = std::abs(e.m);
    auto residue_value = [&](int k0) {
      complex s = 0;
      for (std::size_t j = 0; j < f.terms.size(); ++j) {
        const int p = f.terms[j].second.p;
        // Residue k0 shifts the centre by sqrt(2 pi) k0/m: a phase e^{2 pi i p k0 / m}.
        s += overlaps[j].first * overlaps[j].second * std::polar(1.0, 2 * std::numbers::pi * p * k0 / e.m);
      }
      return s.real();
    };
    if (e.residue >= 0) {
      out.push_back(residue_value(e.residue));
    } else {
      for (int k0 = 0; k0 < am; ++k0) out.push_back(residue_value(k0));
    }
  });
  PairingSequence seq;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& e = t.entries()[i];
    if (e.residue < 0 || e.family == Family::Torus) {
      for (double v : per_row[i]) {
        seq.lambdas.push_back(e.lambda);
        seq.values.push_back(v);
      }
      if (e.family == Family::Torus)
        for (std::int64_t r = 1; r < e.multiplicity; ++r) {
          seq.lambdas.push_back(e.lambda);
          seq.values.push_back(per_row[i][0]);
        }
    } else {
      for (std::int64_t r = 0; r < e.multiplicity; ++r) {
        seq.lambdas.push_back(e.lambda);
        seq.values.push_back(per_row[i][0]);
      }
    }
  }
  return seq;
}

}  // namespace srlab::heisenberg
