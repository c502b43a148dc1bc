#include <CLI11.hpp>

#include "affbench/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Affine BBOB combination benchmarking"};
  app.require_subcommand(1);

  affbench::cli::RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a TOML config");
  run_cmd->add_option("--config", run.config, "Experiment config (TOML)")->required();
  run_cmd->add_option("--workers", run.workers, "Concurrent runs")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory for trace CSVs")->capture_default_str();

  affbench::cli::AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute AUC, ERT, rankings and trajectories");
  analyze_cmd->add_option("--traces", analyze.traces, "Directory of trace CSVs")->required();
  analyze_cmd->add_option("--out", analyze.out, "Output directory")->capture_default_str();
  analyze_cmd->add_option("--target", analyze.target, "ERT target precision")->capture_default_str();
  analyze_cmd->add_option("--axis", analyze.axis, "AUC evaluation axis: log or linear")->capture_default_str();

  affbench::cli::LandscapeArgs land;
  std::string overlay;
  auto* land_cmd = app.add_subcommand("landscape", "Emit log10 value grids of a 2-D combination");
  land_cmd->add_option("--f1", land.f1, "First function id (weight alpha)")->capture_default_str();
  land_cmd->add_option("--f2", land.f2, "Second function id (weight 1 - alpha)")->capture_default_str();
  land_cmd->add_option("--i1", land.i1, "Instance of the first function")->capture_default_str();
  land_cmd->add_option("--alpha", land.alphas, "Alpha values")->delimiter(',')->capture_default_str();
  land_cmd->add_option("--dim", land.dim, "Dimension (must be 2)")->capture_default_str();
  land_cmd->add_option("--resolution", land.resolution, "Grid points per axis")->capture_default_str();
  land_cmd->add_option("--overlay", overlay, "Trace file or directory with best points to overlay");
  land_cmd->add_option("--out", land.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : affbench::cli::kConfigError;
  }

  if (*run_cmd) return affbench::cli::cmd_run(run);
  if (*analyze_cmd) return affbench::cli::cmd_analyze(analyze);
  if (!overlay.empty()) land.overlay = overlay;
  return affbench::cli::cmd_landscape(land);
}
