#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dimred/experiment.hpp"

namespace {

int exit_code_for(const dimred::Error& e) {
  switch (e.code()) {
    case dimred::Err::ConfigError:
    case dimred::Err::SchemaMismatch:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensionality-reduction benchmark harness"};
  app.require_subcommand(0, 1);

  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "Print the experiment config schema and exit");

  std::string config_path, out_dir, label, method, path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "Run the full detection experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
    seed_given = true;
  });
  run->add_option("--out", out_dir, "Override the config output directory");
  run->add_option("--jobs", jobs, "Parallel cells (does not change results)")
      ->check(CLI::PositiveNumber);

  auto* timing = app.add_subcommand("timing", "Run the per-method timing harness");
  timing->add_option("--config", config_path, "Experiment config (JSON, for seed/out)");
  timing->add_option("--seed", seed, "Seed for the synthetic timing data")
      ->each([&](const std::string&) { seed_given = true; });
  timing->add_option("--out", out_dir, "Output directory");
  int timing_n = 3300, timing_d = 128, timing_reps = 3;
  bool no_scaling = false;
  timing->add_option("--n", timing_n, "Sample count for the timing table");
  timing->add_option("--d", timing_d, "Feature dimension for the timing table");
  timing->add_option("--reps", timing_reps, "Repetitions per method (median reported)");
  timing->add_flag("--no-scaling", no_scaling, "Skip the kernel-method scaling sweep");

  auto* roc = app.add_subcommand("roc", "Re-emit one stored ROC curve");
  roc->add_option("--out", out_dir, "Directory written by `run`")->required();
  roc->add_option("--label", label, "Label of the cell")->required();
  roc->add_option("--method", method, "Method of the cell")->required();
  roc->add_option("--path", path, "Destination file")->required();

  auto* validate = app.add_subcommand("validate-config", "Check a config and exit");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  if (print_schema) {
    std::cout << dimred::config_schema();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    if (validate->parsed()) {
      dimred::load_config(config_path);
      std::cout << "ok\n";
      return 0;
    }

    if (run->parsed()) {
      dimred::ExperimentConfig config = dimred::load_config(config_path);
      if (seed_given) config.seed = seed;
      if (!out_dir.empty()) config.out_dir = out_dir;
      const dimred::EvalReport report = dimred::run_experiment(config, jobs);
      dimred::write_report(report, config.out_dir);
      for (const auto& c : report.cells) {
        std::printf("%-10s %-6s auc %.3f  f1 %.3f  kappa %.3f\n", c.label.c_str(),
                    c.method_name.c_str(), c.auc, c.f1, c.kappa);
        std::fprintf(stderr, "  [%s/%s] %.2fs, cost %g\n", c.label.c_str(),
                     c.method_name.c_str(), c.wall_seconds, c.chosen_cost);
        for (const auto& w : c.warnings)
          std::fprintf(stderr, "  [%s/%s] warning: %s\n", c.label.c_str(),
                       c.method_name.c_str(), w.c_str());
      }
      std::printf("report written to %s\n", config.out_dir.c_str());
      return 0;
    }

    if (timing->parsed()) {
      dimred::TimingConfig tc;
      if (!config_path.empty()) {
        const dimred::ExperimentConfig config = dimred::load_config(config_path);
        tc.seed = config.seed;
        if (out_dir.empty()) out_dir = config.out_dir;
      }
      if (seed_given) tc.seed = seed;
      if (out_dir.empty()) out_dir = "out";
      tc.n = timing_n;
      tc.d = timing_d;
      tc.reps = timing_reps;
      if (no_scaling) tc.scaling_n.clear();
      const auto rows = dimred::run_timing(tc);
      std::filesystem::create_directories(out_dir);
      dimred::write_timing(rows, (std::filesystem::path(out_dir) / "timing.csv").string());
      for (const auto& r : rows)
        std::printf("%-6s n=%-5d d=%-4d %10.3fs  %s\n", r.method.c_str(), r.n, r.d,
                    r.seconds, r.complexity.c_str());
      return 0;
    }

    if (roc->parsed()) {
      const std::filesystem::path src =
          std::filesystem::path(out_dir) / "roc" / (label + "_" + method + ".csv");
      if (!std::filesystem::exists(src))
        dimred::fail(dimred::Err::MissingCell, "no stored curve at " + src.string());
      std::filesystem::copy_file(src, path,
                                 std::filesystem::copy_options::overwrite_existing);
      return 0;
    }
  } catch (const dimred::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
