#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "srlab/heisenberg.hpp"

using namespace srlab;
using namespace srlab::heisenberg;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("srlab_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(ExactSpectrum, CountMatchesEnumeration) {
  const auto t = exact_spectrum(120);
  for (double l : {0.5, 1.0, 6.2, 6.3, 30.0, 57.5, 100.0, 120.0})
    EXPECT_EQ(counting_function(t, l), oracle::heisenberg_count(l)) << "lambda " << l;
}

TEST(ExactSpectrum, LowestEigenvaluesAndMultiplicities) {
  const auto t = exact_spectrum(10);
  ASSERT_FALSE(t.entries().empty());
  EXPECT_EQ(t.entries().front().lambda, 0.0);  // constants
  EXPECT_EQ(counting_function(t, 0.0), 1);
  // lambda = 1: m = +-1, ell = 0, multiplicity 1 each.
  EXPECT_EQ(counting_function(t, 1.0), 3);
  // lambda = 2: m = +-2, multiplicity 2 each.
  EXPECT_EQ(counting_function(t, 2.0), 7);
}

TEST(ExactSpectrum, CountingBeyondTableIsIncomplete) {
  const auto t = exact_spectrum(50);
  EXPECT_THROW(counting_function(t, 50.5), IncompletenessError);
  EXPECT_THROW(eigenfunction_masses(t, TrigObservable::constant(), 51), IncompletenessError);
}

TEST(ExactSpectrum, BudgetIsEnforcedBeforeAllocation) {
  EXPECT_THROW(exact_spectrum(1000, SpectrumBudget{100}), CapacityError);
  EXPECT_THROW(exact_spectrum(-1), InvariantViolation);
}

TEST(ExactSpectrum, WeylConstant) {
  const auto t = exact_spectrum(300);
  const auto fit = weyl_constant_fit(t, 100, 300);
  const double target = std::numbers::pi * std::numbers::pi / 8;
  EXPECT_NEAR(fit.c, target, 0.01 * target);
  EXPECT_THROW(weyl_constant_fit(t, 100, 400), InvariantViolation);
}

TEST(Sector, NumericMatchesExactForSmallM) {
  for (int m : {1, -2, 3, 5}) {
    const auto s = sector_operator(m, 4);
    for (const auto& r : s.residues)
      for (int l = 0; l < 4; ++l)
        EXPECT_NEAR(r.values[static_cast<std::size_t>(l)], sector_eigenvalue(l, m), 1e-7 * sector_eigenvalue(l, m))
            << "m " << m << " residue " << r.residue << " ell " << l;
    EXPECT_LT(s.relative_spread(), 1e-8);
  }
}

TEST(Sector, ThirdLevelReportsSecondOrderScheme) {
  const auto s = sector_operator(2, 2, SectorOptions{512, 3});
  for (const auto& r : s.residues)
    for (double o : r.observed_order) EXPECT_NEAR(o, 2.0, 0.05);
}

TEST(Sector, RejectsTorusFamilyAndNarrowWindows) {
  EXPECT_THROW(sector_operator(0, 3), NotApplicable);
  SectorOptions narrow;
  narrow.half_width = 1.0;
  EXPECT_THROW(sector_operator(1, 10, narrow), WindowError);
}

TEST(Factorization, OddIntegerOnSectorRows) {
  const auto t = exact_spectrum(60);
  for (const auto& e : t.entries()) {
    if (e.m == 0) {
      EXPECT_THROW(factorization_check(e), NotApplicable);
      continue;
    }
    const auto f = factorization_check(e);
    EXPECT_EQ(f.r, std::abs(e.m));
    EXPECT_EQ(f.odd_residual, 0.0);
  }
}

TEST(Concentration, StatisticBoundsAndProfile) {
  const auto t = exact_spectrum(200);
  for (const auto& e : t.entries()) {
    const double s = concentration_stat(e);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  const auto p = concentration_profile(t, {50, 100, 200}, [](double s) { return s; });
  EXPECT_NEAR(p[2], concentration_cesaro(t, 200, [](double s) { return s; }), 1e-12);
  EXPECT_THROW(concentration_profile(t, {100, 50}, [](double s) { return s; }), InvariantViolation);
}

TEST(Eigenfunction, ResidualFallsWithTruncationAndGrid) {
  const auto full = WeilBrezinEigenfunction(2, 1, 1);
  const auto short_sum = WeilBrezinEigenfunction::with_truncation(2, 1, 1, 0);
  const double r_short = eigenfunction_residual(short_sum, 12).residual;
  const double r12 = eigenfunction_residual(full, 12).residual;
  const double r24 = eigenfunction_residual(full, 24).residual;
  EXPECT_GT(r_short, 10 * r12);
  EXPECT_LT(r24, r12);
  EXPECT_LT(r24, 1e-3);
}

TEST(Eigenfunction, NormMatchesClosedForm) {
  for (int m : {1, 3, -4}) {
    const WeilBrezinEigenfunction phi(m, 2, 0);
    EXPECT_NEAR(phi.norm() * phi.norm(), phi.analytic_norm2(), 1e-9 * phi.analytic_norm2());
  }
}

TEST(Eigenfunction, QuasiPeriodicity) {
  const WeilBrezinEigenfunction phi(3, 1, 2);
  const double s = geometry::sqrt2pi;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 20; ++i) {
    const geometry::Point q{s * u(rng), s * u(rng), 2 * std::numbers::pi * u(rng)};
    const auto v = phi(q);
    EXPECT_LT(std::abs(phi({q[0], q[1] + s, q[2]}) - v), 1e-10);
    EXPECT_LT(std::abs(phi({q[0], q[1], q[2] + 2 * std::numbers::pi}) - v), 1e-10);
    EXPECT_LT(std::abs(phi({q[0] + s, q[1], q[2]}) - std::polar(1.0, phi.m() * s * q[1]) * v), 1e-10);
  }
  EXPECT_THROW(WeilBrezinEigenfunction(0, 0, 0), NotApplicable);
  EXPECT_THROW(WeilBrezinEigenfunction(2, 0, 2), InvariantViolation);
}

TEST(Masses, ClosedFormMatchesQuadrature) {
  struct Case {
    int ell, m, k0;
    TrigMode f;
  };
  for (const auto& c : {Case{0, 1, 0, {1, 0}}, Case{3, 2, 1, {1, 2}}, Case{5, -3, 2, {-2, 3}}, Case{10, 4, 3, {0, -4}},
                        Case{2, 1, 0, {0, 0}}}) {
    const auto a = sector_mode_mass(c.ell, c.m, c.k0, c.f);
    const auto b = sector_mode_mass_quadrature(c.ell, c.m, c.k0, c.f);
    EXPECT_LT(std::abs(a - b), 1e-9) << c.ell << " " << c.m << " " << c.f.p << " " << c.f.q;
  }
  EXPECT_EQ(sector_mode_mass(1, 3, 0, {1, 1}), complex(0.0));
  EXPECT_NEAR(std::abs(sector_mode_mass(7, 5, 0, {0, 0}) - 1.0), 0.0, 1e-12);
}

TEST(Masses, ConstantObservableHasUnitMass) {
  const auto t = exact_spectrum(80);
  const auto seq = eigenfunction_masses(t, TrigObservable::constant(), 80);
  EXPECT_EQ(static_cast<std::int64_t>(seq.values.size()), counting_function(t, 80));
  for (double v : seq.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Masses, ObservableEvaluation) {
  const auto c = TrigObservable::cosine(1, 0);
  const auto s = TrigObservable::sine(0, 1);
  const geometry::Point q{0.3, 0.7, 0.0};
  EXPECT_NEAR(c(q), std::cos(geometry::sqrt2pi * 0.3), 1e-14);
  EXPECT_NEAR(s(q), std::sin(geometry::sqrt2pi * 0.7), 1e-14);
  EXPECT_EQ(c.mean(), 0.0);
  EXPECT_EQ(TrigObservable::constant(2.5).mean(), 2.5);
}

TEST(Cache, RoundTripAndHit) {
  const auto dir = temp_dir("cache");
  const SpectrumKey key{150};
  const auto first = cached_exact_spectrum(key, dir);
  EXPECT_FALSE(first.hit);
  const auto second = cached_exact_spectrum(key, dir);
  EXPECT_TRUE(second.hit);
  EXPECT_EQ(first.table.entries(), second.table.entries());
  EXPECT_FALSE(cached_exact_spectrum(key, dir, true).hit);
  // Another key never reads this file.
  EXPECT_THROW(parse_spectrum_csv(read_file(first.file), SpectrumKey{151}), StructuralError);
  std::filesystem::remove_all(dir);
}

TEST(Cache, CorruptFileIsRecomputed) {
  const auto dir = temp_dir("cache_corrupt");
  const SpectrumKey key{40};
  const auto first = cached_exact_spectrum(key, dir);
  write_atomic(first.file, "garbage\n");
  const auto again = cached_exact_spectrum(key, dir);
  EXPECT_FALSE(again.hit);
  EXPECT_EQ(again.table.entries(), first.table.entries());
  std::filesystem::remove_all(dir);
}

TEST(Cache, EnvironmentOverridesFallback) {
  ::setenv(cache_env_var, "/tmp/srlab_env_cache", 1);
  EXPECT_EQ(cache_directory("fallback"), std::filesystem::path("/tmp/srlab_env_cache"));
  ::unsetenv(cache_env_var);
  EXPECT_EQ(cache_directory("fallback"), std::filesystem::path("fallback"));
}
