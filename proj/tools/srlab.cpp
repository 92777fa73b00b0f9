#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "srlab/cli/commands.hpp"

namespace {

using namespace srlab;

int run(const std::string& command, cli::ExperimentConfig cfg, const cli::RunOptions& opt) {
  cfg.validate();
  cli::RunManifest manifest(command, cfg, cfg.output_dir);
  int code = cli::ok;
  try {
    if (command == "geom-check") code = cli::cmd_geom_check(cfg, manifest, std::cout);
    else if (command == "spectrum") code = cli::cmd_spectrum(cfg, opt, manifest, std::cout);
    else if (command == "ql") code = cli::cmd_ql(cfg, opt, manifest, std::cout);
    else code = cli::cmd_flow(cfg, manifest, std::cout);
  } catch (...) {
    manifest.finish(cli::exit_code_for(std::current_exception()));
    throw;
  }
  manifest.finish(code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srlab: sub-Riemannian spectral experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned threads = 0;
  std::optional<double> lambda_max;
  bool force = false;
  app.add_option("--config", config_path, "experiment config (key = value lines)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_option("--lambda-max", lambda_max, "spectral cutoff (overrides lambda_max)");
  app.add_flag("--force-recompute", force, "ignore cached spectra");

  std::string command;
  const std::pair<const char*, const char*> subcommands[] = {
      {"geom-check", "Reeb field, contact form and Popp density of a custom frame"},
      {"spectrum", "eigenvalue counts and Weyl-law fits"},
      {"ql", "Cesaro means, variances, concentration and density-one sets"},
      {"flow", "Reeb or line flow with Birkhoff averages"}};
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : srlab::cli::config_error;
  }

  try {
    srlab::set_thread_count(threads);
    srlab::cli::ExperimentConfig cfg;
    if (!config_path.empty()) {
      try {
        cfg = srlab::cli::ExperimentConfig::parse(srlab::read_file(config_path));
      } catch (const srlab::ConfigError& e) {
        throw srlab::ConfigError(config_path + ": " + e.what());
      } catch (const srlab::Error& e) {
        throw srlab::ConfigError(e.what());
      }
    }
    if (lambda_max) cfg.lambda_max = *lambda_max;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    srlab::cli::RunOptions opt;
    opt.force_recompute = force;
    opt.cache_fallback = std::filesystem::path(cfg.output_dir) / "cache";
    return run(command, cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return srlab::cli::exit_code_for(std::current_exception());
  }
}
