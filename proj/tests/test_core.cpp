#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "srlab/core/fit.hpp"
#include "srlab/core/hermite.hpp"
#include "srlab/core/io.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/core/sector1d.hpp"
#include "srlab/core/tridiagonal.hpp"

using namespace srlab;

TEST(Tridiagonal, SturmCountMatchesDenseSolver) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  SymTridiagonal t;
  for (int i = 0; i < 40; ++i) t.diag.push_back(u(rng));
  for (int i = 0; i < 39; ++i) t.off.push_back(u(rng));
  const auto ref = oracle::tridiagonal_eigenvalues(t.diag, t.off);
  const SturmBisection s(t);
  const auto low = s.lowest(40);
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(low[k], ref[k], 1e-12);
  EXPECT_EQ(s.count_below(ref[10] + 1e-9), 11u);
  EXPECT_EQ(s.count_below(ref[0] - 1e-9), 0u);
}

TEST(Tridiagonal, RefineConvergesToIndexedEigenvalue) {
  SymTridiagonal t;
  for (int i = 0; i < 200; ++i) t.diag.push_back(2.0 + 0.01 * i);
  t.off.assign(199, -1.0);
  const SturmBisection s(t);
  const auto ref = oracle::tridiagonal_eigenvalues(t.diag, t.off);
  for (std::size_t k : {0u, 3u, 17u}) EXPECT_NEAR(s.refine(k, ref[k] * 1.001), ref[k], 1e-11);
  // A guess closer to a neighbour must still land on eigenvalue k.
  EXPECT_NEAR(s.refine(5, ref[6]), ref[5], 1e-11);
}

TEST(Tridiagonal, RejectsMalformedInput) {
  EXPECT_THROW(SturmBisection(SymTridiagonal{}), StructuralError);
  EXPECT_THROW(SturmBisection(SymTridiagonal{{1, 2}, {1, 1}}), StructuralError);
}

TEST(Sector1d, HarmonicOscillatorExtrapolated) {
  const DirichletProblem p{-10, 10, [](double x) { return x * x; }};
  const auto r = solve_lowest(p, 6, SectorGrid{2048, 3});
  for (int l = 0; l < 6; ++l) EXPECT_NEAR(r.values[static_cast<std::size_t>(l)], 2 * l + 1, 1e-9);
  for (double o : r.observed_order) EXPECT_NEAR(o, 2.0, 0.05);
}

TEST(Sector1d, MatchesDenseDiscretization) {
  auto V = [](double x) { return std::cos(3 * x) + x * x * x * x; };
  const DirichletProblem p{-2, 2, V};
  const auto dense = oracle::dense_dirichlet(V, -2, 2, 300);
  const auto r = solve_lowest(p, 5, SectorGrid{300, 1});
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(r.values[k], dense[k], 1e-9 * dense[k]);
}

TEST(Sector1d, SolveBelowReturnsExactlyTheEigenvaluesUnderTheBound) {
  const DirichletProblem p{-1, 1, [](double) { return 0.0; }};
  const auto r = solve_below(p, 100.0);
  // (pi k / 2)^2 <= 100  ->  k <= 6
  ASSERT_EQ(r.values.size(), 6u);
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR(r.values[static_cast<std::size_t>(k) - 1], std::pow(std::numbers::pi * k / 2, 2), 1e-8);
}

TEST(Sector1d, EigenvectorIsNormalized) {
  const DirichletProblem p{-8, 8, [](double x) { return x * x; }};
  const auto raw = solve_lowest(p, 3, SectorGrid{1024, 1}).values;
  const auto v = sector_eigenvector(p, 1024, raw[2]);
  double s = 0, overlap = 0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    s += v.values[i] * v.values[i] * v.h;
    overlap += v.values[i] * hermite_function(2, v.x[i]) * v.h;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(overlap), 1.0, 1e-5);
}

TEST(Hermite, OrthonormalOnFineGrid) {
  const int N = 12;
  std::vector<double> gram(N * N, 0.0), buf(N);
  const double h = 0.01;
  for (double u = -15; u <= 15; u += h) {
    hermite_functions(u, buf);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) gram[static_cast<std::size_t>(i * N + j)] += buf[static_cast<std::size_t>(i)] * buf[static_cast<std::size_t>(j)] * h;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) EXPECT_NEAR(gram[static_cast<std::size_t>(i * N + j)], i == j ? 1.0 : 0.0, 1e-10);
}

TEST(Hermite, LargeOrderStaysFinite) {
  EXPECT_TRUE(std::isfinite(hermite_function(600, 30.0)));
  EXPECT_GT(hermite_tail_radius(50, 1e-12), std::sqrt(101.0));
}

TEST(Hermite, LaguerreFunctionKnownValues) {
  // L_2(x) = 1 - 2x + x^2/2
  for (double x : {0.0, 0.3, 2.0, 7.5}) EXPECT_NEAR(laguerre_function(2, x), std::exp(-x / 2) * (1 - 2 * x + x * x / 2), 1e-14);
  // Reference value e^{-1050} L_500(2100) from 50-digit arithmetic.
  EXPECT_NEAR(laguerre_function(500, 2100) / 1.4950674605686064e-05, 1.0, 1e-9);
}

TEST(Hermite, AmbiguityMatchesQuadrature) {
  for (int n : {0, 3, 9})
    for (double tau : {0.0, 0.7, 2.5})
      for (double om : {0.0, 1.1}) {
        double re = 0;
        const double h = 0.005;
        for (double v = -20; v <= 20; v += h)
          re += hermite_function(n, v + tau / 2) * hermite_function(n, v - tau / 2) * std::cos(om * v) * h;
        EXPECT_NEAR(hermite_ambiguity(n, tau, om), re, 1e-10) << n << " " << tau << " " << om;
      }
}

TEST(Fit, RecoversExactCoefficients) {
  std::vector<double> x, y;
  for (int i = 1; i <= 30; ++i) {
    x.push_back(i);
    y.push_back(2.5 * i * std::log(i) - 0.75 * i);
  }
  const auto f = least_squares(x, y, {[](double l) { return l * std::log(l); }, [](double l) { return l; }});
  EXPECT_NEAR(f.coefficients[0], 2.5, 1e-10);
  EXPECT_NEAR(f.coefficients[1], -0.75, 1e-10);
  EXPECT_LT(f.relative_rms, 1e-12);
}

TEST(Fit, TooFewSamplesIsAFitError) {
  EXPECT_THROW(least_squares({1, 2}, {1, 2}, {[](double l) { return l; }}), FitError);
}

TEST(Io, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Io, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, i % 13 - 6);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Io, AtomicWriteReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "srlab_io_test";
  std::filesystem::remove_all(dir);
  write_atomic(dir / "sub" / "f.txt", "one");
  write_atomic(dir / "sub" / "f.txt", "two");
  EXPECT_EQ(read_file(dir / "sub" / "f.txt"), "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++files;
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Parallel, CoversEveryIndexOnce) {
  for (unsigned threads : {1u, 3u, 8u}) {
    set_thread_count(threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  set_thread_count(0);
}

TEST(Parallel, PropagatesExceptions) {
  set_thread_count(4);
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 42) throw InvariantViolation("boom");
               }),
               InvariantViolation);
  set_thread_count(0);
}

TEST(Errors, ConfigErrorPositions) {
  EXPECT_STREQ(ConfigError("bad", 3, 7).what(), "line 3, column 7: bad");
  EXPECT_STREQ(ConfigError("bad", 0, 7).what(), "column 7: bad");
  EXPECT_STREQ(ConfigError("bad").what(), "bad");
}
