#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "oracles.hpp"
#include "srlab/cli/config.hpp"
#include "srlab/core/parallel.hpp"
#include "srlab/core/tridiagonal.hpp"
#include "srlab/ergodic.hpp"
#include "srlab/geometry/expression.hpp"
#include "srlab/heisenberg.hpp"
#include "srlab/singular.hpp"

using namespace srlab;

namespace {

constexpr int trials = 25;

struct ThreadGuard {
  ~ThreadGuard() { set_thread_count(0); }
};

// Random real trig polynomial with zero mean and its square, both as mode lists.
std::pair<heisenberg::TrigObservable, heisenberg::TrigObservable> random_observable(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mode(-3, 3);
  std::normal_distribution<double> coef;
  std::map<std::pair<int, int>, heisenberg::complex> a;
  for (int i = 0; i < 3; ++i) {
    int p = mode(rng), q = mode(rng);
    if (p == 0 && q == 0) p = 1;
    const heisenberg::complex c(coef(rng), coef(rng));
    a[{p, q}] += c;
    a[{-p, -q}] += std::conj(c);
  }
  std::map<std::pair<int, int>, heisenberg::complex> sq;
  for (const auto& [k1, c1] : a)
    for (const auto& [k2, c2] : a) sq[{k1.first + k2.first, k1.second + k2.second}] += c1 * c2;
  heisenberg::TrigObservable f, f2;
  for (const auto& [k, c] : a) f.terms.push_back({c, {k.first, k.second}});
  for (const auto& [k, c] : sq) f2.terms.push_back({c, {k.first, k.second}});
  return {f, f2};
}

struct RandomExpr {
  std::string text;
  std::function<double(double, double, double)> eval;
};

RandomExpr random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 8 : 3);
  std::uniform_real_distribution<double> num(0.1, 3);
  switch (pick(rng)) {
    case 0: return {"x", [](double x, double, double) { return x; }};
    case 1: return {"y", [](double, double y, double) { return y; }};
    case 2: return {"z", [](double, double, double z) { return z; }};
    case 3: {
      const double v = num(rng);
      return {format_double(v), [v](double, double, double) { return v; }};
    }
    default: break;
  }
  auto a = random_expression(rng, depth - 1), b = random_expression(rng, depth - 1);
  std::uniform_int_distribution<int> op(0, 6);
  switch (op(rng)) {
    case 0: return {"(" + a.text + ") + (" + b.text + ")", [a, b](double x, double y, double z) { return a.eval(x, y, z) + b.eval(x, y, z); }};
    case 1: return {"(" + a.text + ") - (" + b.text + ")", [a, b](double x, double y, double z) { return a.eval(x, y, z) - b.eval(x, y, z); }};
    case 2: return {"(" + a.text + ") * (" + b.text + ")", [a, b](double x, double y, double z) { return a.eval(x, y, z) * b.eval(x, y, z); }};
    case 3: return {"sin(" + a.text + ")", [a](double x, double y, double z) { return std::sin(a.eval(x, y, z)); }};
    case 4: return {"cos(" + a.text + ")", [a](double x, double y, double z) { return std::cos(a.eval(x, y, z)); }};
    case 5: return {"-(" + a.text + ")", [a](double x, double y, double z) { return -a.eval(x, y, z); }};
    default: return {"(" + a.text + ")^2", [a](double x, double y, double z) { return std::pow(a.eval(x, y, z), 2); }};
  }
}

}  // namespace

TEST(Property, SturmCountIsMonotoneAndMatchesDense) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> size(2, 30);
  for (int t = 0; t < trials; ++t) {
    SymTridiagonal m;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) m.diag.push_back(u(rng));
    for (int i = 0; i + 1 < n; ++i) m.off.push_back(u(rng));
    const SturmBisection s(m);
    const auto ref = oracle::tridiagonal_eigenvalues(m.diag, m.off);
    std::size_t prev = 0;
    for (double x = -10; x <= 10; x += 0.25) {
      const auto c = s.count_below(x);
      EXPECT_GE(c, prev);
      prev = c;
      const auto expect = static_cast<std::size_t>(std::lower_bound(ref.begin(), ref.end(), x) - ref.begin());
      // Counts may differ only when x sits on an eigenvalue.
      if (std::none_of(ref.begin(), ref.end(), [x](double l) { return std::abs(l - x) < 1e-9; })) EXPECT_EQ(c, expect);
    }
  }
}

TEST(Property, HeisenbergCountingMonotoneAndExact) {
  const auto t = heisenberg::exact_spectrum(400);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0, 400);
  std::vector<double> ls(200);
  for (auto& l : ls) l = u(rng);
  std::sort(ls.begin(), ls.end());
  std::int64_t prev = 0;
  for (double l : ls) {
    const auto n = heisenberg::counting_function(t, l);
    EXPECT_GE(n, prev);
    prev = n;
  }
  for (int i = 0; i < 20; ++i) {
    const double l = ls[static_cast<std::size_t>(i * 10)];
    EXPECT_EQ(heisenberg::counting_function(t, l), oracle::heisenberg_count(l));
  }
}

TEST(Property, ResultsIndependentOfThreadCount) {
  ThreadGuard guard;
  std::mt19937_64 rng(303);
  const auto [f, f2] = random_observable(rng);
  const auto t = heisenberg::exact_spectrum(150);
  set_thread_count(1);
  const auto a = heisenberg::eigenfunction_masses(t, f, 150);
  singular::MartinetModel mm;
  mm.grid = {256, 2};
  const auto ma = singular::martinet_spectrum(mm, 35);
  set_thread_count(4);
  const auto b = heisenberg::eigenfunction_masses(t, f, 150);
  const auto mb = singular::martinet_spectrum(mm, 35);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(ma.merged.entries(), mb.merged.entries());
}

TEST(Property, VarianceBelowSquaredObservableMass) {
  const auto t = heisenberg::exact_spectrum(200);
  std::mt19937_64 rng(404);
  for (int k = 0; k < 8; ++k) {
    const auto [f, f2] = random_observable(rng);
    const auto m = heisenberg::eigenfunction_masses(t, f, 200);
    const auto m2 = heisenberg::eigenfunction_masses(t, f2, 200);
    // Pointwise: <A phi, phi>^2 <= <A^2 phi, phi> for unit phi.
    for (std::size_t i = 0; i < m.values.size(); ++i) EXPECT_LE(m.values[i] * m.values[i], m2.values[i] * (1 + 1e-9) + 1e-12);
    const ergodic::SpectralSequence s{m.lambdas, m.values, {}}, s2{m2.lambdas, m2.values, {}};
    EXPECT_TRUE(ergodic::variance(s, {50, 100, 200}, 0.0, s2).variance_bound_holds);
  }
}

TEST(Property, ClosedFormMassMatchesQuadrature) {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> ell(0, 12), m(1, 6), p(-3, 3), sign(0, 1);
  for (int t = 0; t < trials; ++t) {
    const int mm = m(rng) * (sign(rng) ? 1 : -1);
    std::uniform_int_distribution<int> k0(0, std::abs(mm) - 1), qm(-2, 2);
    const heisenberg::TrigMode f{p(rng), qm(rng) * std::abs(mm)};
    const int l = ell(rng), r = k0(rng);
    EXPECT_LT(std::abs(heisenberg::sector_mode_mass(l, mm, r, f) - heisenberg::sector_mode_mass_quadrature(l, mm, r, f)),
              1e-9);
  }
}

TEST(Property, KvnCertificateAndThresholds) {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> len(1, 5000);
  std::exponential_distribution<double> ex(1.0);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> u(static_cast<std::size_t>(len(rng)));
    const double decay = ex(rng);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = ex(rng) / std::pow(static_cast<double>(i + 1), decay);
    const auto s = ergodic::koopman_von_neumann(u);
    EXPECT_TRUE(std::is_sorted(s.indices.begin(), s.indices.end()));
    for (std::size_t j = 0; j < s.density.size(); ++j) {
      EXPECT_LE(s.certificate[j], s.density[j] + 1e-12);
      EXPECT_LE(s.kept_sup[j], s.thresholds[j]);
    }
    EXPECT_EQ(s.block_ends.back(), u.size());
  }
}

TEST(Property, ConfigRoundTrip) {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.01, 1000);
  std::uniform_int_distribution<int> n(4, 64);
  for (int t = 0; t < trials; ++t) {
    cli::ExperimentConfig c;
    c.lambda_max = u(rng);
    c.theta = std::uniform_real_distribution<double>(0.01, 1)(rng);
    c.grid = {n(rng), n(rng), n(rng)};
    c.fit_tops = {u(rng), u(rng)};
    c.a0 = u(rng);
    c.q0 = {u(rng), u(rng), u(rng)};
    c.seed = rng();
    c.observables = {"cos(x)", "x*y+" + format_double(u(rng))};
    c.chart[2].periodic = t % 2 == 0;
    const auto text = c.serialize();
    const auto back = cli::ExperimentConfig::parse(text);
    EXPECT_EQ(back.serialize(), text);
    EXPECT_EQ(back.lambda_max, c.lambda_max);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.hash(), c.hash());
  }
}

TEST(Property, ExpressionMatchesDirectEvaluation) {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    const auto e = random_expression(rng, 4);
    const geometry::Expression parsed(e.text);
    for (int k = 0; k < 3; ++k) {
      const double x = u(rng), y = u(rng), z = u(rng);
      const double want = e.eval(x, y, z);
      EXPECT_NEAR(parsed(x, y, z), want, 1e-12 * std::max(1.0, std::abs(want))) << e.text;
    }
  }
}
