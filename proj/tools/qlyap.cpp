#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "qlyap/qlyap.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "qlyap: trace-based growth diagnostics for kicked quantum maps on the "
      "2-torus"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("qlyap ") + qlyap::kVersion);

  qlyap::RunOptions opt;
  app.add_option("-o,--out-dir", opt.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("-j,--workers", opt.workers,
                 "worker threads for sweeps (results are order-independent)")
      ->capture_default_str()
      ->check(CLI::Range(1, 256));
  app.add_flag("--plot,!--no-plot", opt.plot, "write SVG plots")
      ->capture_default_str();
  app.add_option("--seed", opt.seed,
                 "recorded in summaries; the computation is deterministic");
  app.add_flag("-q,--quiet", opt.quiet, "suppress per-run output lines");

  std::string run_cfg, sweep_cfg, spectrum_cfg;
  std::vector<std::string> check_cfgs;

  auto* run = app.add_subcommand(
      "run", "evolve one configuration and fit its growth law");
  run->add_option("config", run_cfg, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand(
      "sweep", "run a configuration across its sweep.values");
  sweep->add_option("config", sweep_cfg, "JSON configuration with sweep block")
      ->required()
      ->check(CLI::ExistingFile);

  auto* spectrum = app.add_subcommand(
      "spectrum",
      "eigenvalue diagnostics, kernel profile, and eigenmode reconstruction");
  spectrum->add_option("config", spectrum_cfg, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* check = app.add_subcommand(
      "check", "validate configurations and their basic invariants");
  check->add_option("configs", check_cfgs, "JSON configuration files")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      qlyap::run_one(qlyap::load_config(run_cfg), opt);
    } else if (sweep->parsed()) {
      qlyap::run_sweep(qlyap::load_config(sweep_cfg), opt);
    } else if (spectrum->parsed()) {
      qlyap::run_spectrum(qlyap::load_config(spectrum_cfg), opt);
    } else if (check->parsed()) {
      const int failures = qlyap::run_check(check_cfgs, opt);
      if (failures > 0) {
        std::fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
      }
    }
  } catch (const qlyap::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
