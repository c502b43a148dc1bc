#pragma once

// Subcommand implementations behind tools/affbench. Each returns the process
// exit code: 0 success, 2 configuration error, 3 I/O or parse error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "affbench/analysis.hpp"
#include "affbench/config.hpp"
#include "affbench/landscape.hpp"
#include "affbench/runner.hpp"
#include "affbench/trace_io.hpp"

namespace affbench::cli {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kIoError = 3;

struct RunArgs {
  std::filesystem::path config;
  int workers = 1;
  std::filesystem::path out = "traces";
};

struct AnalyzeArgs {
  std::filesystem::path traces;
  std::filesystem::path out = "analysis";
  double target = 1e-8;
  std::string axis = "log";
};

struct LandscapeArgs {
  int f1 = 21;
  int f2 = 1;
  int i1 = 1;
  std::vector<double> alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  int dim = 2;
  int resolution = 201;
  std::optional<std::filesystem::path> overlay;
  std::filesystem::path out = "landscape";
};

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedFunction& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
}

inline int cmd_run(const RunArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    if (args.workers < 1) throw ConfigError("--workers must be >= 1");
    const auto config = load_config(args.config);
    const auto set = run_experiment(config, args.out, {args.workers, false});
    out << "wrote " << config.trace_count() << " traces ("
        << config.algorithms.size() * config.pairs.size() << " files) to " << args.out.string() << '\n';
    return kOk;
  });
}

inline int cmd_analyze(const AnalyzeArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    AnalysisOptions opt;
    opt.target = args.target;
    if (args.axis == "log")
      opt.axis = AucAxis::log;
    else if (args.axis == "linear")
      opt.axis = AucAxis::linear;
    else
      throw ConfigError("--axis must be 'log' or 'linear'");
    if (!(opt.target > 0.0)) throw ConfigError("--target must be positive");
    const auto set = read_trace_dir(args.traces);
    if (set.traces.empty()) throw ConfigError("no traces found in " + args.traces.string());
    write_analysis(set, args.out, opt);
    out << "analyzed " << set.traces.size() << " traces into " << args.out.string() << '\n';
    return kOk;
  });
}

inline int cmd_landscape(const LandscapeArgs& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    if (args.dim != 2) throw ConfigError("landscapes are only defined for --dim 2");
    if (args.alphas.empty()) throw ConfigError("--alpha needs at least one value");
    for (double a : args.alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha " + format_real(a) + " outside [0, 1]");

    std::optional<TraceSet> overlay;
    if (args.overlay) {
      overlay.emplace();
      if (std::filesystem::is_directory(*args.overlay))
        overlay = read_trace_dir(*args.overlay);
      else
        read_trace_file(*args.overlay, *overlay);
    }

    const auto first = make_problem({args.f1, args.i1, args.dim});
    const auto second = make_problem({args.f2, 1, args.dim});
    std::filesystem::create_directories(args.out);
    for (double alpha : args.alphas) {
      auto grid = landscape_grid(CombinedProblem(first, second, alpha), args.resolution);
      if (overlay) {
        const double a = canonical_alpha(alpha);
        for (const auto& [k, tr] : overlay->traces) {
          if (k.f_first != args.f1 || k.f_second != args.f2 || k.instance != args.i1 || k.alpha != a) continue;
          if (tr.final_best_point.size() != 2)
            throw ConfigError("overlay traces must come from 2-dimensional runs");
          grid.overlay.push_back(tr.final_best_point);
        }
      }
      const auto path = args.out / landscape_file_name(args.f1, args.f2, args.i1, alpha);
      write_landscape(grid, path);
      out << "wrote " << path.string() << '\n';
    }
    return kOk;
  });
}

}  // namespace affbench::cli
