#pragma once

#include <cmath>
#include <complex>
#include <exception>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srlab/cli/config.hpp"
#include "srlab/cli/manifest.hpp"
#include "srlab/ergodic.hpp"
#include "srlab/geometry.hpp"
#include "srlab/heisenberg.hpp"
#include "srlab/singular.hpp"

namespace srlab::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, budget_error = 3, degeneracy_error = 4 };

/// Maps a library exception to the process exit code.
inline int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return config_error;
  } catch (const DegeneracyError&) {
    return degeneracy_error;
  } catch (const CapacityError&) {
    return budget_error;
  } catch (const IncompletenessError&) {
    return budget_error;
  } catch (const WindowError&) {
    return budget_error;
  } catch (const FitError&) {
    return budget_error;
  } catch (const EscapeError&) {
    return budget_error;
  } catch (...) {
    return failure;
  }
}

struct RunOptions {
  bool force_recompute = false;
  std::filesystem::path cache_fallback = ".srlab-cache";
};

namespace detail {

inline std::filesystem::path cache_dir(const ExperimentConfig& c, const RunOptions& opt) {
  return heisenberg::cache_directory(opt.cache_fallback.empty() ? std::filesystem::path(c.output_dir) / "cache"
                                                                : opt.cache_fallback);
}

inline heisenberg::SpectrumKey spectrum_key(const ExperimentConfig& c) {
  return {c.lambda_max, c.intervals, c.levels, c.half_width};
}

inline std::vector<double> cutoff_grid(double top, int n) {
  std::vector<double> v;
  for (int i = 1; i <= n; ++i) v.push_back(top * i / n);
  return v;
}

inline geometry::ChartGrid chart_grid(const ExperimentConfig& c) {
  std::array<geometry::Axis, 3> axes;
  for (std::size_t d = 0; d < 3; ++d)
    axes[d] = geometry::Axis{geometry::Expression(c.chart[d].lo)(0, 0, 0), geometry::Expression(c.chart[d].hi)(0, 0, 0),
                             c.grid[d], c.chart[d].periodic};
  return geometry::ChartGrid(axes);
}

inline ergodic::ChartBox chart_box(const geometry::ChartGrid& g) {
  ergodic::ChartBox b;
  for (std::size_t d = 0; d < 3; ++d) {
    b.lo[d] = g.axis(static_cast<int>(d)).lo;
    b.hi[d] = g.axis(static_cast<int>(d)).hi;
    b.periodic[d] = g.axis(static_cast<int>(d)).periodic;
  }
  return b;
}

inline std::function<geometry::Point(const geometry::Point&)> vector_expression(const std::array<std::string, 3>& src) {
  std::array<geometry::Expression, 3> e{geometry::Expression(src[0]), geometry::Expression(src[1]),
                                        geometry::Expression(src[2])};
  return [e](const geometry::Point& q) { return geometry::Point{e[0](q), e[1](q), e[2](q)}; };
}

inline geometry::ClosedFormFrame frame_from(const ExperimentConfig& c) {
  geometry::ClosedFormFrame f;
  f.X = vector_expression(c.frame_x);
  f.Y = vector_expression(c.frame_y);
  f.volume = geometry::Expression(c.volume).function();
  return f;
}

/// Projects an expression onto Heisenberg trigonometric modes e^{i sqrt(2 pi)(p x + q y)}
/// by a discrete Fourier transform, then checks the reconstruction at random points
/// (z included). Fails for anything that is not such a finite sum.
inline heisenberg::TrigObservable project_trig(const std::string& src, std::uint64_t seed, int M = 32) {
  using heisenberg::complex;
  const geometry::Expression f(src);
  const double L = geometry::sqrt2pi;
  std::vector<double> samples(static_cast<std::size_t>(M * M));
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) samples[static_cast<std::size_t>(a * M + b)] = f(L * a / M, L * b / M, 0.0);
  heisenberg::TrigObservable out;
  out.label = src;
  double scale = 1;
  for (double v : samples) scale = std::max(scale, std::abs(v));
  const int K = M / 2 - 1;
  for (int p = -K; p <= K; ++p)
    for (int q = -K; q <= K; ++q) {
      complex s = 0;
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
          s += samples[static_cast<std::size_t>(a * M + b)] * std::polar(1.0, -2 * std::numbers::pi * (p * a + q * b) / M);
      s /= static_cast<double>(M * M);
      if (std::abs(s) > 1e-13 * scale) out.terms.push_back({s, {p, q}});
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 16; ++i) {
    const geometry::Point q{u(rng), u(rng), u(rng)};
    if (std::abs(f(q) - out(q)) > 1e-9 * scale)
      throw ConfigError("observable '" + src + "' is not a trigonometric polynomial in (x, y) of period sqrt2pi");
  }
  return out;
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

// ---------------------------------------------------------------------------------------------

inline int cmd_geom_check(const ExperimentConfig& c, RunManifest& run, std::ostream& log) {
  if (c.model != "custom-frame") throw ConfigError("geom-check needs model = custom-frame");
  const auto grid = detail::chart_grid(c);
  const auto closed = detail::frame_from(c);
  const auto frame = closed.sample(grid);
  geometry::ContactStructure s;
  try {
    s = geometry::analyze(frame);
  } catch (const DegeneracyError& e) {
    std::ostringstream os;
    os << "index,x,y,z\n";
    for (const auto& l : e.locations())
      os << l.index << ',' << detail::fmt(l.point[0]) << ',' << detail::fmt(l.point[1]) << ',' << detail::fmt(l.point[2])
         << '\n';
    run.write_csv("degeneracy.csv", os.str());
    throw;
  }
  std::ostringstream reeb, alpha, popp;
  geometry::write_csv(reeb, s.reeb.Z);
  geometry::write_csv(alpha, s.form.alpha);
  geometry::write_csv(popp, s.popp.density, "density");
  run.write_csv("reeb.csv", reeb.str());
  run.write_csv("alpha.csv", alpha.str());
  run.write_csv("popp.csv", popp.str());

  // Pointwise probes: nested sixth-order brackets, independent of the grid.
  std::mt19937_64 rng(c.seed);
  const auto interp = ergodic::interpolate(s.reeb.Z);
  json probes = json::array();
  double probe_gap = 0, probe_res = 0;
  for (int i = 0; i < c.probes; ++i) {
    geometry::Point q;
    for (std::size_t d = 0; d < 3; ++d) {
      const auto& a = grid.axis(static_cast<int>(d));
      const double margin = a.periodic ? 0.0 : 0.1 * a.length();
      q[d] = std::uniform_real_distribution<double>(a.lo + margin, a.hi - margin)(rng);
    }
    const auto chk = geometry::reeb_check_at(closed, q);
    const auto zg = interp(q);
    double gap = 0;
    for (std::size_t d = 0; d < 3; ++d) gap = std::max(gap, std::abs(zg[d] - chk.Z[d]));
    probe_gap = std::max(probe_gap, gap);
    probe_res = std::max({probe_res, chk.residual_x, chk.residual_y});
    probes.push_back({{"point", {q[0], q[1], q[2]}},
                      {"Z", {chk.Z[0], chk.Z[1], chk.Z[2]}},
                      {"residual_x", chk.residual_x},
                      {"residual_y", chk.residual_y},
                      {"grid_gap", gap}});
  }
  json body{{"grid", {c.grid[0], c.grid[1], c.grid[2]}},
            {"spacing", grid.max_spacing()},
            {"reeb",
             {{"residual_x", s.reeb.residual_x},
              {"residual_y", s.reeb.residual_y},
              {"tolerance", s.reeb.tolerance},
              {"success", s.reeb.success},
              {"one_sided_boundary", s.reeb.one_sided_boundary}}},
            {"contact_form",
             {{"max_dalpha_deviation", s.form.max_dalpha_deviation}, {"max_alpha_z_deviation", s.form.max_alpha_z_deviation}}},
            {"popp", {{"total_mass", s.popp.total_mass}, {"max_route_gap", s.popp.max_route_gap}}},
            {"probes", probes},
            {"probe_max_residual", probe_res},
            {"probe_max_grid_gap", probe_gap}};
  run.write_json("residuals.json", body);
  log << "reeb residuals " << s.reeb.residual_x << ", " << s.reeb.residual_y << " (tolerance " << s.reeb.tolerance
      << ")\npopp total mass " << detail::fmt(s.popp.total_mass) << "\n";
  if (!s.reeb.success) {
    log << "reeb residual above tolerance\n";
    return budget_error;
  }
  return ok;
}

// ---------------------------------------------------------------------------------------------

namespace detail {

inline int spectrum_heisenberg(const ExperimentConfig& c, const RunOptions& opt, RunManifest& run, std::ostream& log) {
  const auto key = spectrum_key(c);
  const auto cached = heisenberg::cached_exact_spectrum(key, cache_dir(c, opt), opt.force_recompute);
  run.note_external(cached.file, cached.hit ? "spectrum cache (hit)" : "spectrum cache (written)");
  const auto& t = cached.table;
  run.write("spectrum.csv", heisenberg::spectrum_csv(t, key));

  const double target = std::numbers::pi * std::numbers::pi / 8;
  const double L = c.lambda_max;
  const auto fit = heisenberg::weyl_constant_fit(t, L / 3, L);
  const double ratio = static_cast<double>(heisenberg::counting_function(t, L)) / (L * L);

  std::ostringstream counts;
  counts << "lambda,count\n";
  for (double l : cutoff_grid(L, c.samples))
    counts << fmt(l) << ',' << heisenberg::counting_function(t, l) << '\n';
  run.write_csv("counting.csv", counts.str());

  json body{{"model", "heisenberg"},
            {"lambda_max", L},
            {"rows", t.size()},
            {"N", heisenberg::counting_function(t, L)},
            {"ratio", ratio},
            {"fit", {{"window", {L / 3, L}}, {"c", fit.c}, {"relative_rms", fit.relative_rms}}},
            {"target", {{"law", "c lambda^2"}, {"c", target}}},
            {"fit_relative_error", std::abs(fit.c - target) / target},
            {"ratio_relative_error", std::abs(ratio - target) / target}};

  if (c.sector_check > 0) {
    heisenberg::SectorOptions so;
    so.intervals = c.intervals;
    so.levels = c.levels;
    so.half_width = c.half_width;
    std::ostringstream os;
    os << "m,ell,residue,numeric,exact,relative_error,odd_residual\n";
    double worst = 0, spread = 0, odd = 0;
    for (int m = 1; m <= c.sector_check; ++m) {
      const int count = std::min(11, static_cast<int>((L / m - 1) / 2) + 1);
      if (count < 1) continue;
      const auto sec = heisenberg::sector_operator(m, count, so);
      spread = std::max(spread, sec.relative_spread());
      for (const auto& e : sec.pairs()) {
        const double ex = heisenberg::sector_eigenvalue(e.ell, m);
        const double rel = std::abs(e.lambda - ex) / ex;
        const auto f = heisenberg::factorization_check(e);
        worst = std::max(worst, rel);
        odd = std::max(odd, f.odd_residual);
        os << m << ',' << e.ell << ',' << e.residue << ',' << fmt(e.lambda) << ',' << fmt(ex) << ',' << fmt(rel) << ','
           << fmt(f.odd_residual) << '\n';
      }
    }
    run.write_csv("sector_check.csv", os.str());
    body["sector_check"] = {{"m_max", c.sector_check},
                            {"max_relative_error", worst},
                            {"max_relative_spread", spread},
                            {"max_odd_residual", odd}};
    log << "sector check |m| <= " << c.sector_check << ": max relative error " << worst << "\n";
  }
  run.write_json("fit.json", body);
  log << "N(" << L << ")/lambda^2 = " << ratio << "\nfitted c = " << fit.c << " on [" << L / 3 << ", " << L
      << "] (target pi^2/8 = " << target << ")\n";
  return ok;
}

inline json fits_json(const std::vector<singular::LogLawFit>& fits) {
  json a = json::array();
  for (const auto& f : fits)
    a.push_back({{"window", {f.lo, f.hi}}, {"a", f.a}, {"b", f.b}, {"relative_rms", f.relative_rms}});
  return a;
}

inline void fit_log(std::ostream& log, const std::vector<singular::LogLawFit>& fits, double stability, const char* law) {
  for (const auto& f : fits) log << "[" << f.lo << ", " << f.hi << "]: a = " << f.a << ", b = " << f.b << "\n";
  log << "window stability " << stability << " (fit law " << law << ")\n";
}

inline int spectrum_singular(const ExperimentConfig& c, RunManifest& run, std::ostream& log) {
  if (c.model == "grushin") {
    singular::GrushinModel m;
    m.half_width = c.box_half_width;
    singular::GrushinOptions o;
    o.samples = c.samples;
    const auto r = singular::grushin_counting(m, c.lambda_max, c.fit_tops, o);
    run.write_csv("counting.csv", singular::counting_csv(r.samples));
    run.write_json("fit.json", {{"model", "grushin"},
                                {"lambda_max", c.lambda_max},
                                {"half_width", m.half_width},
                                {"law", "a lambda log lambda + b lambda"},
                                {"fits", fits_json(r.fits)},
                                {"stability", r.stability},
                                {"completeness_bound", r.samples.completeness_bound},
                                {"ratio_linear", {r.ratio_linear.front(), r.ratio_linear.back()}},
                                {"ratio_1_3", {r.ratio_13.front(), r.ratio_13.back()}}});
    fit_log(log, r.fits, r.stability, "a lambda log lambda + b lambda");
    log << "N/lambda " << r.ratio_linear.front() << " -> " << r.ratio_linear.back() << ", N/lambda^1.3 "
        << r.ratio_13.front() << " -> " << r.ratio_13.back() << "\n";
    return ok;
  }
  singular::MartinetModel m;
  m.half_width = c.box_half_width;
  singular::MartinetOptions o;
  o.samples = c.samples;
  const auto r = singular::martinet_counting(m, c.lambda_max, c.fit_tops, o);
  run.write_csv("counting.csv", singular::counting_csv(r.samples));
  run.write_json("fit.json", {{"model", "martinet"},
                              {"lambda_max", c.lambda_max},
                              {"half_width", m.half_width},
                              {"law", "a lambda^2 log lambda + b lambda^2"},
                              {"fits", fits_json(r.fits)},
                              {"stability", r.stability},
                              {"completeness_bound", r.samples.completeness_bound},
                              {"sectors_enumerated", r.spectrum.sectors_enumerated},
                              {"sectors_nonempty", r.spectrum.sectors_nonempty},
                              {"sectors_skipped", r.spectrum.sectors_skipped},
                              {"flat_count", r.spectrum.flat_count},
                              {"ratio_log", {r.ratio_log.front(), r.ratio_log.back()}},
                              {"ratio_square", {r.ratio_square.front(), r.ratio_square.back()}}});
  fit_log(log, r.fits, r.stability, "a lambda^2 log lambda + b lambda^2");
  return ok;
}

}  // namespace detail

inline int cmd_spectrum(const ExperimentConfig& c, const RunOptions& opt, RunManifest& run, std::ostream& log) {
  if (c.model == "heisenberg") return detail::spectrum_heisenberg(c, opt, run, log);
  if (c.model == "grushin" || c.model == "martinet") return detail::spectrum_singular(c, run, log);
  throw ConfigError("spectrum needs model = heisenberg, grushin or martinet");
}

// ---------------------------------------------------------------------------------------------

namespace detail {

inline std::string kvn_csv(const ergodic::DensityOneSet& s) {
  std::ostringstream os;
  os << "block_end,threshold,density,certificate,running_mean,kept_sup\n";
  for (std::size_t j = 0; j < s.block_ends.size(); ++j)
    os << s.block_ends[j] << ',' << fmt(s.thresholds[j]) << ',' << fmt(s.density[j]) << ',' << fmt(s.certificate[j])
       << ',' << fmt(s.running_mean[j]) << ',' << fmt(s.kept_sup[j]) << '\n';
  return os.str();
}

inline json kvn_json(const ergodic::DensityOneSet& s) {
  return {{"length", s.length},
          {"kept", s.indices.size()},
          {"final_density", s.density.empty() ? 1.0 : s.density.back()},
          {"final_certificate", s.certificate.empty() ? 1.0 : s.certificate.back()},
          {"n0", s.n0},
          {"tail_sup", s.tail_sup}};
}

inline int ql_heisenberg(const ExperimentConfig& c, const RunOptions& opt, RunManifest& run, std::ostream& log) {
  const auto key = spectrum_key(c);
  const auto dir = cache_dir(c, opt);
  const auto file = dir / ("heisenberg_" + key.hash() + ".csv");
  if (c.require_cache && !opt.force_recompute && !std::filesystem::exists(file))
    throw IncompletenessError("ql: no cached spectrum at " + file.string() + " (run spectrum first)");
  const auto cached = heisenberg::cached_exact_spectrum(key, dir, opt.force_recompute);
  run.note_external(cached.file, cached.hit ? "spectrum cache (hit)" : "spectrum cache (written)");
  const auto& t = cached.table;
  const double L = c.lambda_max;
  const auto cutoffs = cutoff_grid(L, c.cutoffs);

  json observables = json::array();
  std::vector<std::string> sources = c.observables;
  if (sources.empty()) sources = {"1", "cos(sqrt2pi*y)", "cos(sqrt2pi*x)", "sin(sqrt2pi*(x+y))"};
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto f = project_trig(sources[i], c.seed + i);
    const double mean = f.mean();
    const auto masses = heisenberg::eigenfunction_masses(t, f, L);
    const auto centered_sq = project_trig("(" + sources[i] + "-(" + fmt(mean) + "))^2", c.seed + i);
    const auto sq = heisenberg::eigenfunction_masses(t, centered_sq, L);
    const ergodic::SpectralSequence s{masses.lambdas, masses.values, {}};
    const ergodic::SpectralSequence s2{sq.lambdas, sq.values, {}};
    const auto rep = ergodic::variance(s, cutoffs, mean, s2);
    std::vector<double> dev(masses.values.size());
    for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = std::abs(masses.values[k] - mean);
    const auto kvn = ergodic::koopman_von_neumann(dev);

    std::ostringstream os;
    os << "cutoff,N,E,V,E_sq\n";
    for (std::size_t k = 0; k < cutoffs.size(); ++k)
      os << fmt(cutoffs[k]) << ',' << rep.counts[k] << ',' << fmt(rep.E[k]) << ',' << fmt(rep.V[k]) << ','
         << fmt(rep.E_squared[k]) << '\n';
    const std::string stem = "observable_" + std::to_string(i + 1);
    run.write_csv(stem + ".csv", os.str());
    run.write_csv(stem + "_kvn.csv", kvn_csv(kvn));
    observables.push_back({{"expression", sources[i]},
                           {"modes", f.terms.size()},
                           {"target", mean},
                           {"E", rep.E.back()},
                           {"V", rep.V.back()},
                           {"variance_bound_holds", rep.variance_bound_holds},
                           {"deviation", std::abs(rep.E.back() - mean)},
                           {"kvn", kvn_json(kvn)}});
    log << sources[i] << ": E = " << rep.E.back() << " (target " << mean << "), V = " << rep.V.back() << "\n";
  }

  // Concentration statistic s = m^2 / (lambda + m^2).
  const auto conc = heisenberg::concentration_profile(t, cutoffs, [](double s) { return s; });
  std::ostringstream cs;
  cs << "cutoff,N,mean_s,sum_one_minus_s\n";
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    const auto n = heisenberg::counting_function(t, cutoffs[k]);
    cs << fmt(cutoffs[k]) << ',' << n << ',' << fmt(conc[k]) << ',' << fmt((1 - conc[k]) * static_cast<double>(n)) << '\n';
  }
  run.write_csv("concentration.csv", cs.str());

  auto u = heisenberg::expanded_stat(t, L);
  for (auto& v : u) v = 1 - v;
  const auto kvn = ergodic::koopman_von_neumann(u);
  run.write_csv("kvn.csv", kvn_csv(kvn));
  {
    // The extracted set is nearly everything; its complement is the short list.
    std::ostringstream ex;
    ex << "excluded_index\n";
    std::size_t j = 0;
    for (std::size_t n = 1; n <= kvn.length; ++n) {
      if (j < kvn.indices.size() && kvn.indices[j] == n) ++j;
      else ex << n << '\n';
    }
    run.write_csv("kvn_excluded.csv", ex.str());
  }

  ergodic::SpectralSequence stat;
  for (const auto& e : t.entries()) {
    stat.lambdas.push_back(e.lambda);
    stat.values.push_back(heisenberg::concentration_stat(e));
    stat.multiplicities.push_back(e.multiplicity);
  }
  const auto ql = ergodic::ql_decomposition_stat(stat, cutoffs, c.theta);
  std::ostringstream qs;
  qs << "cutoff,theta,beta0,betainf\n";
  for (const auto* split : [&] {
         std::vector<const ergodic::QlSplit*> v{&ql.main};
         for (const auto& s : ql.sweep) v.push_back(&s);
         return v;
       }())
    for (std::size_t k = 0; k < cutoffs.size(); ++k)
      qs << fmt(cutoffs[k]) << ',' << fmt(split->theta) << ',' << fmt(split->beta0[k]) << ',' << fmt(split->betainf[k])
         << '\n';
  run.write_csv("ql.csv", qs.str());

  run.write_json("ql.json", {{"model", "heisenberg"},
                             {"lambda_max", L},
                             {"observables", observables},
                             {"concentration", {{"mean_s", conc.back()}}},
                             {"kvn_one_minus_s", kvn_json(kvn)},
                             {"ql", {{"theta", c.theta}, {"beta0", ql.main.beta0.back()}, {"betainf", ql.main.betainf.back()}}}});
  log << "mean s at " << L << " = " << conc.back() << "\nKvN on 1 - s: density " << kvn.density.back()
      << ", tail sup " << kvn.tail_sup << "\n";
  return ok;
}

inline int ql_grushin(const ExperimentConfig& c, RunManifest& run, std::ostream& log) {
  singular::GrushinModel m;
  m.half_width = c.box_half_width;
  const auto cutoffs = cutoff_grid(c.lambda_max, c.cutoffs);
  std::vector<std::string> sources = c.observables;
  if (sources.empty()) sources = {"1"};
  json observables = json::array();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const geometry::Expression e(sources[i]);
    const auto E = singular::grushin_mass_near_singular_set(m, [&](double x) { return e(x, 0.0, 0.0); }, cutoffs);
    std::ostringstream os;
    os << "cutoff,E\n";
    for (std::size_t k = 0; k < cutoffs.size(); ++k) os << fmt(cutoffs[k]) << ',' << fmt(E[k]) << '\n';
    run.write_csv("observable_" + std::to_string(i + 1) + ".csv", os.str());
    observables.push_back({{"expression", sources[i]}, {"E", E.back()}, {"E_first", E.front()}});
    log << sources[i] << ": E " << E.front() << " -> " << E.back() << "\n";
  }
  run.write_json("ql.json", {{"model", "grushin"}, {"lambda_max", c.lambda_max}, {"half_width", m.half_width},
                             {"observables", observables}});
  return ok;
}

}  // namespace detail

inline int cmd_ql(const ExperimentConfig& c, const RunOptions& opt, RunManifest& run, std::ostream& log) {
  if (c.model == "heisenberg") return detail::ql_heisenberg(c, opt, run, log);
  if (c.model == "grushin") return detail::ql_grushin(c, run, log);
  throw ConfigError("ql needs model = heisenberg or grushin");
}

// ---------------------------------------------------------------------------------------------

inline int cmd_flow(const ExperimentConfig& c, RunManifest& run, std::ostream& log) {
  ergodic::Field V;
  ergodic::ChartBox chart;
  std::vector<std::string> sources = c.observables;
  const double two_pi = 2 * std::numbers::pi;
  if (c.flow == "reeb") {
    V = [](const geometry::Point&) { return geometry::Point{0, 0, 1}; };
    chart.hi = {geometry::sqrt2pi, geometry::sqrt2pi, two_pi};
    if (sources.empty()) sources = {"cos(z)", "cos(sqrt2pi*x)"};
  } else if (c.flow == "line") {
    const double a0 = c.a0;
    V = [a0](const geometry::Point&) { return geometry::Point{1, 0, -a0}; };
    chart.hi = {two_pi, two_pi, two_pi};
    if (sources.empty()) sources = {"cos(x)*cos(z)"};
  } else {
    V = detail::vector_expression(c.field);
    chart = detail::chart_box(detail::chart_grid(c));
    if (sources.empty()) sources = {"1"};
  }
  const auto tr = ergodic::integrate_flow(V, c.q0, c.T, c.dt, chart);
  const auto stride = static_cast<std::size_t>(c.stride);

  std::ostringstream ts;
  ts << "t,x,y,z\n";
  for (std::size_t i = 0; i < tr.points.size(); i += stride)
    ts << detail::fmt(tr.times[i]) << ',' << detail::fmt(tr.points[i][0]) << ',' << detail::fmt(tr.points[i][1]) << ','
       << detail::fmt(tr.points[i][2]) << '\n';
  run.write_csv("trajectory.csv", ts.str());

  std::vector<ergodic::BirkhoffAverage> avgs;
  json obs = json::array();
  for (const auto& src : sources) {
    const geometry::Expression e(src);
    avgs.push_back(ergodic::birkhoff_average(e.function(), tr));
    obs.push_back({{"expression", src}, {"average", avgs.back().value}, {"initial_value", e(c.q0)}});
    log << src << ": Birkhoff average " << avgs.back().value << " at T = " << tr.times.back() << "\n";
  }
  std::ostringstream bs;
  bs << "t";
  for (std::size_t j = 0; j < sources.size(); ++j) bs << ",avg_" << j + 1;
  bs << '\n';
  for (std::size_t i = 0; i < tr.points.size(); i += stride) {
    bs << detail::fmt(tr.times[i]);
    for (const auto& a : avgs) bs << ',' << detail::fmt(a.running[i]);
    bs << '\n';
  }
  run.write_csv("birkhoff.csv", bs.str());
  const auto& fin = tr.points.back();
  run.write_json("flow.json", {{"kind", c.flow},
                               {"T", tr.times.back()},
                               {"dt", tr.step},
                               {"steps", tr.points.size() - 1},
                               {"final_point", {fin[0], fin[1], fin[2]}},
                               {"final_unreduced", {tr.final_unreduced[0], tr.final_unreduced[1], tr.final_unreduced[2]}},
                               {"error_estimate", tr.error_estimate},
                               {"observables", obs}});
  log << "final point (" << fin[0] << ", " << fin[1] << ", " << fin[2] << "), error estimate " << tr.error_estimate << "\n";
  return ok;
}

}  // namespace srlab::cli
