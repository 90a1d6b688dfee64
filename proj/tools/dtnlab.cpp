#include "dtnlab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"dtnlab: DtN map and linearization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run the experiments named in a config file");
  run->add_option("config", config_path, "config file (key = value lines)")->required();
  auto* out_opt = run->add_option("--out", out_dir, "artifact directory");
  auto* seed_opt = run->add_option("--seed", seed, "seed override");
  run->add_option("--jobs", jobs, "OpenMP threads")->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "summarize the artifacts of a run");
  report->add_option("dir", report_dir, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) {
    try {
      dtnlab::ExperimentConfig cfg = dtnlab::ExperimentConfig::load(config_path);
      if (*seed_opt) cfg.seed = seed;
      dtnlab::RunOptions opts;
      opts.out_dir = *out_opt ? out_dir : cfg.text("output", "out");
      opts.jobs = jobs;
      return dtnlab::run_experiments(cfg, opts, std::cout);
    } catch (const dtnlab::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  try {
    const dtnlab::ReportSummary s = dtnlab::report_directory(report_dir);
    std::cout << s.table;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
