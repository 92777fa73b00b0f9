#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "srlab/singular.hpp"

using namespace srlab;
using namespace srlab::singular;

TEST(Grushin, WideBoxMatchesWholeLine) {
  GrushinModel m;
  m.half_width = 4;
  m.grid = {8192, 2};
  const auto s = grushin_sector_spectrum(m, 5, 3);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(s.values[l], s.whole_line[l], 1e-8);
}

TEST(Grushin, SectorSymmetryAndDirichletDomination) {
  GrushinModel m;
  for (long n : {1, 3, 7}) {
    const auto a = grushin_sector_spectrum(m, n, 5), b = grushin_sector_spectrum(m, -n, 5);
    EXPECT_EQ(a.values, b.values);
    for (std::size_t l = 0; l < 5; ++l) EXPECT_GE(a.values[l], a.whole_line[l]);
    GrushinModel narrow = m;
    narrow.half_width = 0.8;
    const auto c = grushin_sector_spectrum(narrow, n, 5);
    for (std::size_t l = 0; l < 5; ++l) EXPECT_GT(c.values[l], a.values[l]);
  }
}

TEST(Grushin, SectorEigenvaluesInterlaceAcrossN) {
  // nu^2 x^2 grows with |n|, so every level grows too.
  GrushinModel m;
  std::vector<double> prev = grushin_sector_spectrum(m, 0, 6).values;
  for (long n = 1; n <= 6; ++n) {
    const auto cur = grushin_sector_spectrum(m, n, 6).values;
    for (std::size_t l = 0; l < 6; ++l) EXPECT_GT(cur[l], prev[l]);
    prev = cur;
  }
}

TEST(Grushin, FreeSectorAndErrors) {
  GrushinModel m;
  const auto s = grushin_sector_spectrum(m, 0, 3);
  for (int k = 1; k <= 3; ++k)
    EXPECT_DOUBLE_EQ(s.values[static_cast<std::size_t>(k - 1)], std::pow(std::numbers::pi * k / 2, 2));
  GrushinModel line = m;
  line.whole_line = true;
  EXPECT_THROW(grushin_sector_spectrum(line, 0, 3), NotApplicable);
  EXPECT_THROW(grushin_spectrum(line, 100), UnsupportedConfiguration);
  EXPECT_THROW(grushin_sector_spectrum(m, 2, 1000), WindowError);
  EXPECT_THROW(grushin_counting(m, 20), InvariantViolation);
  m.half_width = 0;
  EXPECT_THROW(grushin_sector_spectrum(m, 1, 1), InvariantViolation);
}

TEST(Grushin, CountingIsMonotoneAndBelowWholeLineBound) {
  GrushinModel m;
  const auto spec = grushin_spectrum(m, 400);
  std::int64_t prev = 0;
  for (double l = 5; l <= 400; l += 5) {
    const auto c = spec.merged.count(l);
    EXPECT_GE(c, prev);
    prev = c;
    // Nonzero sectors dominate their whole-line counterparts; n = 0 adds at most 2 sqrt(l)/pi.
    EXPECT_LE(c, oracle::grushin_whole_line_count(l) + static_cast<std::int64_t>(2 * std::sqrt(l) / std::numbers::pi) + 1);
  }
}

TEST(Grushin, SectorBudgetLowersCompletenessBound) {
  GrushinModel m;
  GrushinOptions opt;
  opt.max_sectors = 10;
  const auto cut = grushin_spectrum(m, 200, opt);
  const auto full = grushin_spectrum(m, 200);
  EXPECT_LT(cut.completeness_bound, 200);
  EXPECT_EQ(full.completeness_bound, 200);
  for (double l = 1; l <= cut.completeness_bound; l += 1) EXPECT_EQ(cut.merged.count(l), full.merged.count(l));
}

TEST(Grushin, ConstantObservableHasUnitMass) {
  GrushinModel m;
  const auto r = grushin_mass_near_singular_set(m, [](double) { return 1.0; }, {50, 100, 200}, 2048);
  ASSERT_EQ(r.size(), 3u);
  for (double v : r) EXPECT_NEAR(v, 1.0, 1e-6);
  EXPECT_THROW(grushin_mass_near_singular_set(m, [](double) { return 1.0; }, {100, 50}), InvariantViolation);
}

TEST(Grushin, LogLawFitRecoversSyntheticCoefficients) {
  CountingSamples s;
  for (double l = 100; l <= 1000; l += 10) {
    s.lambdas.push_back(l);
    s.counts.push_back(static_cast<std::int64_t>(std::llround(0.5 * l * std::log(l) + 2 * l)));
    s.complete.push_back(true);
  }
  s.completeness_bound = 1000;
  const auto f = fit_log_law(s, 100, 1000, 1);
  EXPECT_NEAR(f.a, 0.5, 1e-3);
  EXPECT_NEAR(f.b, 2, 1e-2);
}

namespace {

MartinetModel wide_martinet(double t_step) {
  MartinetModel m;
  m.half_width = 8;
  m.grid = {1024, 2};
  m.y_period = 2 * std::numbers::pi / t_step;  // eta' = eta * t_step
  return m;
}

}  // namespace

TEST(Martinet, SectorSymmetry) {
  MartinetModel m;
  EXPECT_EQ(martinet_sector_spectrum(m, 2, 1, 3), martinet_sector_spectrum(m, -2, -1, 3));
  EXPECT_EQ(martinet_sector_spectrum(m, -5, 3, 3), martinet_sector_spectrum(m, 5, -3, 3));
  EXPECT_THROW(martinet_sector_spectrum(m, 1, 0, 3), NotApplicable);
}

TEST(Martinet, QuarticGroundConstants) {
  // zeta' = 1 makes the sector ground energy G(t) at t = eta'.
  const auto m = wide_martinet(0.1);
  const MartinetBounds b;
  for (long eta = -100; eta <= 30; ++eta) {
    const double t = m.eta_freq(eta);
    const double g = martinet_sector_spectrum(m, eta, 1, 1)[0];
    EXPECT_GE(g, b.global_min) << "t " << t;
    if (t >= 0) EXPECT_GE(g, t * t + b.quartic_ground) << "t " << t;
    else EXPECT_GE(g, b.well_slope * std::sqrt(-t)) << "t " << t;
  }
}

TEST(Martinet, LowerBoundIsBelowGroundEnergy) {
  MartinetModel m;
  m.grid = {1024, 2};
  for (long zeta : {1, 2, 5, 20})
    for (long eta : {-30, -8, -3, -1, 0, 1, 4, 12}) {
      const double g = martinet_sector_spectrum(m, eta, zeta, 1)[0];
      EXPECT_LE(martinet_lower_bound(m, eta, zeta), g) << eta << " " << zeta;
      EXPECT_EQ(martinet_lower_bound(m, eta, zeta), martinet_lower_bound(m, -eta, -zeta));
    }
}

TEST(Martinet, BudgetCutKeepsCertifiedPrefix) {
  MartinetModel m;
  m.grid = {512, 2};
  MartinetOptions small;
  small.max_sectors = 40;
  const auto cut = martinet_spectrum(m, 40, small);
  const auto full = martinet_spectrum(m, 40);
  EXPECT_GT(cut.sectors_skipped, 0u);
  EXPECT_EQ(full.sectors_skipped, 0u);
  EXPECT_LT(cut.completeness_bound, 40);
  EXPECT_GT(cut.completeness_bound, 0);
  for (double l = 1; l <= cut.completeness_bound; l += 0.5) EXPECT_EQ(cut.merged.count(l), full.merged.count(l));
}

TEST(Martinet, FlatSectorsAreClosedForm) {
  MartinetModel m;
  m.grid = {512, 2};
  const auto s = martinet_spectrum(m, 35);
  std::int64_t flat = 0;
  for (long eta = -6; eta <= 6; ++eta)
    for (int k = 1; k < 10; ++k)
      if (eta * eta + std::pow(std::numbers::pi * k / 2, 2) <= 35) ++flat;
  EXPECT_EQ(s.flat_count, flat);
  EXPECT_THROW(martinet_counting(m, 10), InvariantViolation);
}
