#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "srlab/ergodic.hpp"
#include "srlab/geometry.hpp"

using namespace srlab;
using namespace srlab::ergodic;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

ChartBox torus_box() { return ChartBox{{0, 0, 0}, {two_pi, two_pi, two_pi}, {true, true, true}}; }

}  // namespace

TEST(Flow, TranslationWrapsAroundTheTorus) {
  const Field V = [](const Point&) { return Point{1, 0, 0}; };
  const auto tr = integrate_flow(V, {1, 2, 3}, 10, 0.01, torus_box());
  EXPECT_NEAR(tr.final_unreduced[0], 11, 1e-10);
  EXPECT_NEAR(tr.points.back()[0], 11 - two_pi, 1e-10);
  EXPECT_EQ(tr.points.size(), 1001u);
  for (const auto& p : tr.points) {
    EXPECT_GE(p[0], 0);
    EXPECT_LT(p[0], two_pi);
  }
  EXPECT_LT(tr.error_estimate, 1e-12);
}

TEST(Flow, ZeroFieldStaysPut) {
  const Field V = [](const Point&) { return Point{0, 0, 0}; };
  const auto tr = integrate_flow(V, {0.5, 0.5, 0.5}, 1, 0.1, torus_box());
  for (const auto& p : tr.points) EXPECT_EQ(p, (Point{0.5, 0.5, 0.5}));
}

TEST(Flow, LineHasPrescribedSlope) {
  const double a0 = 0.6180339887498949;
  const Field V = [a0](const Point&) { return Point{1, 0, -a0}; };
  const auto tr = integrate_flow(V, {0.1, 0.2, 0.3}, 50, 0.05, torus_box());
  EXPECT_NEAR(tr.final_unreduced[0], 50.1, 1e-9);
  EXPECT_NEAR(tr.final_unreduced[2], 0.3 - 50 * a0, 1e-9);
}

TEST(Flow, RungeKuttaIsFourthOrder) {
  // Rotation in (x, y) about the origin, walls far away.
  const ChartBox box{{-5, -5, 0}, {5, 5, two_pi}, {false, false, true}};
  const Field V = [](const Point& q) { return Point{-q[1], q[0], 0}; };
  const double T = 3;
  auto err = [&](double dt) {
    const auto tr = integrate_flow(V, {1, 0, 0}, T, dt, box, false);
    return std::hypot(tr.final_unreduced[0] - std::cos(T), tr.final_unreduced[1] - std::sin(T));
  };
  const double e1 = err(0.1), e2 = err(0.05);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.2);
}

TEST(Flow, ReductionCommutesWithIntegration) {
  const Field V = [](const Point& q) { return Point{1 + 0.3 * std::sin(q[2]), 0.2 * std::cos(q[0]), 0.7}; };
  const auto a = integrate_flow(V, {1, 1, 1}, 20, 0.01, torus_box(), false);
  const auto b = integrate_flow(V, {1 + two_pi, 1, 1 - two_pi}, 20, 0.01, torus_box(), false);
  for (std::size_t i = 0; i < a.points.size(); i += 97)
    for (std::size_t d = 0; d < 3; ++d) {
      const double diff = std::remainder(a.points[i][d] - b.points[i][d], two_pi);
      EXPECT_NEAR(diff, 0, 1e-9);
    }
}

TEST(Flow, LeavingAnOpenAxisThrows) {
  const ChartBox box{{0, 0, 0}, {1, 1, 1}, {false, true, true}};
  const Field V = [](const Point&) { return Point{1, 0, 0}; };
  try {
    integrate_flow(V, {0.5, 0.5, 0.5}, 2, 0.01, box);
    FAIL() << "expected escape";
  } catch (const EscapeError&) {
  }
  EXPECT_THROW(integrate_flow(V, {2, 0.5, 0.5}, 1, 0.1, box), EscapeError);
  EXPECT_THROW(integrate_flow(V, {0.5, 0.5, 0.5}, 1, 0, box), InvariantViolation);
}

TEST(Flow, InterpolationIsExactForAffineFields) {
  using namespace geometry;
  const ChartGrid g({Axis{-1, 1, 9, false}, Axis{0, 1, 8, false}, Axis{0, 2, 6, false}});
  const auto V = VectorFieldSpec::sample(g, {[](const Point& q) { return 1 + 2 * q[0] - q[2]; },
                                             [](const Point& q) { return q[1]; }, [](const Point&) { return 3.0; }});
  const auto f = interpolate(V);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const Point q{-1 + 2 * u(rng), u(rng), 2 * u(rng)};
    const auto v = f(q);
    EXPECT_NEAR(v[0], 1 + 2 * q[0] - q[2], 1e-12);
    EXPECT_NEAR(v[1], q[1], 1e-12);
    EXPECT_NEAR(v[2], 3, 1e-12);
  }
}

TEST(Birkhoff, ConstantAndInvariantObservables) {
  const Field reeb = [](const Point&) { return Point{0, 0, 1}; };
  const ChartBox box{{0, 0, 0}, {geometry::sqrt2pi, geometry::sqrt2pi, two_pi}, {true, true, true}};
  const auto tr = integrate_flow(reeb, {0.4, 0.9, 0.1}, 30, 0.01, box);
  EXPECT_NEAR(birkhoff_average([](const Point&) { return 1.0; }, tr).value, 1.0, 1e-14);
  // Functions of (x, y) are invariant under the Reeb flow: the time average is the initial value.
  const auto f = [](const Point& q) { return std::cos(geometry::sqrt2pi * q[0]); };
  EXPECT_NEAR(birkhoff_average(f, tr).value, f({0.4, 0.9, 0.1}), 1e-12);
}

TEST(Birkhoff, IrrationalLineAveragesDecayLikeOneOverT) {
  const double a0 = 0.6180339887498949;
  const Field V = [a0](const Point&) { return Point{1, 0, -a0}; };
  const auto obs = [](const Point& q) { return std::cos(q[2]); };
  for (double T : {100.0, 1000.0}) {
    const auto tr = integrate_flow(V, {0.3, 0.3, 0.3}, T, 0.05, torus_box(), false);
    EXPECT_LE(std::abs(birkhoff_average(obs, tr).value) * T, 2 / a0 + 1e-3);
  }
}

TEST(Cesaro, ConstantSquaresAndAlternating) {
  std::vector<double> one(100, 1.0), alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  const auto c = cesaro_mean(indexed(one), {10, 50, 100});
  for (double e : c.E) EXPECT_EQ(e, 1.0);
  EXPECT_EQ(c.counts, (std::vector<std::int64_t>{10, 50, 100}));
  const auto a = variance(indexed(alt), {10, 100}, 0.0);
  EXPECT_NEAR(a.E[1], 0, 1e-15);
  EXPECT_NEAR(a.V[1], 1, 1e-15);

  std::vector<double> sq(1000, 0.0);
  for (int k = 1; k * k <= 1000; ++k) sq[static_cast<std::size_t>(k * k - 1)] = 1;
  const auto s = cesaro_mean(indexed(sq), {100, 1000});
  EXPECT_NEAR(s.E[0], 0.1, 1e-15);
  EXPECT_NEAR(s.E[1], 31.0 / 1000, 1e-15);
}

TEST(Cesaro, MultiplicitiesMatchOracle) {
  SpectralSequence s{{1, 2, 2.5, 4}, {0.5, -1, 2, 3}, {2, 1, 3, 1}};
  const auto r = cesaro_mean(s, {2.5, 4});
  EXPECT_NEAR(r.E[0], oracle::cesaro(s.lambdas, s.values, s.multiplicities, 2.5), 1e-15);
  EXPECT_NEAR(r.E[1], oracle::cesaro(s.lambdas, s.values, s.multiplicities, 4), 1e-15);
}

TEST(Cesaro, VarianceBoundAgainstSquaredObservable) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1), w(0, 1);
  SpectralSequence v, sq;
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng);
    v.lambdas.push_back(i);
    v.values.push_back(a);
    sq.lambdas.push_back(i);
    sq.values.push_back(a * a + w(rng));  // <|A|^2 phi, phi> >= <A phi, phi>^2
  }
  EXPECT_TRUE(variance(v, {100, 499}, 0.0, sq).variance_bound_holds);
  for (auto& x : sq.values) x *= 0.1;
  EXPECT_FALSE(variance(v, {100, 499}, 0.0, sq).variance_bound_holds);
  sq.lambdas.pop_back();
  sq.values.pop_back();
  EXPECT_THROW(variance(v, {100}, 0.0, sq), StructuralError);
}

TEST(Cesaro, RejectsMalformedSequences) {
  EXPECT_THROW(cesaro_mean(SpectralSequence{{2, 1}, {0, 0}, {}}, {3}), StructuralError);
  EXPECT_THROW(cesaro_mean(SpectralSequence{{1, 2}, {0}, {}}, {3}), StructuralError);
  EXPECT_THROW(cesaro_mean(indexed({1, 2}), {2, 1}), StructuralError);
}

TEST(Kvn, ZeroSequenceKeepsEverything) {
  const auto s = koopman_von_neumann(std::vector<double>(1000, 0.0));
  EXPECT_EQ(s.indices.size(), 1000u);
  for (double c : s.certificate) EXPECT_EQ(c, 1.0);
  EXPECT_EQ(s.density_at(1000), 1.0);
}

TEST(Kvn, SquaresAreRemoved) {
  const std::size_t N = 1 << 16;
  std::vector<double> u(N, 0.0);
  for (std::size_t k = 1; k * k <= N; ++k) u[k * k - 1] = 1;
  const auto s = koopman_von_neumann(u);
  EXPECT_GT(s.density.back(), 0.99);
  EXPECT_EQ(s.tail_sup, 0.0);
  // Beyond the first few blocks the threshold drops below 1 and every square is dropped.
  for (std::size_t n : s.indices) {
    if (n > 64) {
      EXPECT_EQ(u[n - 1], 0.0) << n;
    }
  }
  for (std::size_t j = 0; j < s.density.size(); ++j) EXPECT_LE(s.certificate[j], s.density[j] + 1e-15);
  EXPECT_THROW(koopman_von_neumann({1.0, -0.5}), InvariantViolation);
}

TEST(Ql, TrivialSplits) {
  const auto zeros = ql_decomposition_stat(indexed(std::vector<double>(50, 0.0)), {10, 50});
  for (double b : zeros.main.beta0) EXPECT_EQ(b, 1.0);
  const auto ones = ql_decomposition_stat(indexed(std::vector<double>(50, 1.0)), {10, 50});
  for (double b : ones.main.betainf) EXPECT_EQ(b, 1.0);
  EXPECT_EQ(ones.sweep.size(), 5u);
  EXPECT_THROW(ql_decomposition_stat(indexed({0.5, 1.5}), {2}), InvariantViolation);
}

TEST(LocalWeyl, ConstantObservable) {
  const auto r = local_weyl_measure({{"one", indexed(std::vector<double>(20, 1.0)), 1.0}}, {5, 20});
  ASSERT_EQ(r.estimates.size(), 1u);
  EXPECT_EQ(r.estimates[0].E, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(r.estimates[0].final_deviation, 0.0);
}
