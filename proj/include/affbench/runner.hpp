#pragma once

// Expands an ExperimentConfig into its (algorithm x pair x alpha x instance x
// run) grid and executes it. Seeds depend only on grid coordinates, so the
// output is identical for any worker count or execution order.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "affbench/combine.hpp"
#include "affbench/config.hpp"
#include "affbench/error.hpp"
#include "affbench/format.hpp"
#include "affbench/optim.hpp"
#include "affbench/rng.hpp"
#include "affbench/trace_io.hpp"

namespace affbench {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kIncompleteMarker = "_INCOMPLETE";

// Per-coordinate multipliers: the 16-bit prefixes 0x9E37, 0x85EB, 0xC2B2,
// 0x27D4, 0x1657 widened to the 64-bit golden-ratio and xxHash64 primes that
// start with them.
inline constexpr std::uint64_t kSeedAlg = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kSeedPair = 0x85EBCA77C2B2AE63ULL;
inline constexpr std::uint64_t kSeedAlpha = 0xC2B2AE3D27D4EB4FULL;
inline constexpr std::uint64_t kSeedInstance = 0x27D4EB2F165667C5ULL;
inline constexpr std::uint64_t kSeedRun = 0x165667B19E3779F9ULL;

/// Per-run seed from grid coordinates. Arithmetic wraps modulo 2^64.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t alg_index, std::uint64_t pair_index,
                                    std::uint64_t alpha_index, std::uint64_t instance,
                                    std::uint64_t run_index) noexcept {
  const std::uint64_t acc = alg_index * kSeedAlg + pair_index * kSeedPair + alpha_index * kSeedAlpha +
                            instance * kSeedInstance + run_index * kSeedRun;
  return mix64(master ^ acc);
}

struct GridCell {
  std::size_t alg_index = 0;
  std::size_t pair_index = 0;
  std::size_t alpha_index = 0;
  std::size_t instance_index = 0;
  int run_index = 0;
};

/// Runs one grid cell and returns its trace.
inline RunTrace run_cell(const ExperimentConfig& config, const GridCell& cell) {
  const auto [f1, f2] = config.pairs[cell.pair_index];
  const int instance = config.instances_first[cell.instance_index];
  auto first = make_problem({f1, instance, config.dimension}, config.placement_for(f1));
  auto second = make_problem({f2, config.instance_second, config.dimension}, config.placement_for(f2));
  const CombinedProblem problem(std::move(first), std::move(second), config.alphas[cell.alpha_index]);
  const auto seed = derive_seed(config.master_seed, cell.alg_index, cell.pair_index, cell.alpha_index,
                                static_cast<std::uint64_t>(instance), static_cast<std::uint64_t>(cell.run_index));
  return run_algorithm(config.algorithms[cell.alg_index], problem, config.budget(), seed);
}

inline std::string placement_text(const PlacementPolicy& p) {
  if (p.mode == PlacementPolicy::Mode::uniform) return "uniform";
  return "fixed_norm(" + format_real(p.norm) + ")";
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Executes `fn(i)` for i in [0, n) on up to `workers` threads. The first
/// exception is rethrown after all threads finish.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  if (count == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(count, n); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

struct RunOptions {
  int workers = 1;
  bool keep_traces = true;  // also return traces in memory
};

/// Runs the whole grid and writes one trace file per (algorithm, pair) into
/// `out_dir`. A `_INCOMPLETE` marker exists in `out_dir` until every file has
/// been written.
inline TraceSet run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                               const RunOptions& options = {}) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto marker = out_dir / kIncompleteMarker;
  {
    std::ofstream m(marker);
    if (!m) throw IoError("cannot write " + marker.string());
    m << "run started " << utc_timestamp() << '\n';
  }

  TraceSet set;
  set.metadata = {{"version", std::string(kVersion)},
                  {"dimension", std::to_string(config.dimension)},
                  {"budget", std::to_string(config.budget())},
                  {"instance_second", std::to_string(config.instance_second)}};

  const std::size_t per_file = config.alphas.size() * config.instances_first.size() *
                               static_cast<std::size_t>(config.runs_per_instance);
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    const auto& alg = config.algorithms[a];
    const auto label = alg.display_name();
    for (std::size_t p = 0; p < config.pairs.size(); ++p) {
      const auto [f1, f2] = config.pairs[p];
      std::vector<GridCell> cells;
      cells.reserve(per_file);
      for (std::size_t ai = 0; ai < config.alphas.size(); ++ai)
        for (std::size_t ii = 0; ii < config.instances_first.size(); ++ii)
          for (int r = 0; r < config.runs_per_instance; ++r) cells.push_back({a, p, ai, ii, r});

      std::vector<RunTrace> results(cells.size());
      parallel_for(cells.size(), options.workers, [&](std::size_t i) { results[i] = run_cell(config, cells[i]); });

      const auto path = out_dir / trace_file_name(label, f1, f2);
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoError("cannot write " + path.string());
      out << "# affbench trace file\n";
      out << "# version: " << kVersion << '\n';
      out << "# created: " << utc_timestamp() << '\n';
      out << "# dimension: " << config.dimension << '\n';
      out << "# budget: " << config.budget() << '\n';
      out << "# budget_multiplier: " << config.budget_multiplier << '\n';
      out << "# instance_second: " << config.instance_second << '\n';
      out << "# runs_per_instance: " << config.runs_per_instance << '\n';
      out << "# master_seed: " << config.master_seed << '\n';
      out << "# algorithm: " << label << " name=" << to_string(alg.name) << " population_size=" << alg.population_size
          << " sigma0=" << format_real(alg.sigma0) << " init=" << to_string(alg.init) << '\n';
      out << "# placement_first: " << placement_text(config.placement_for(f1)) << '\n';
      out << "# placement_second: " << placement_text(config.placement_for(f2)) << '\n';
      out << kTraceHeader << '\n';
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        TraceKey key{label, f1, f2, canonical_alpha(config.alphas[c.alpha_index]),
                     config.instances_first[c.instance_index], c.run_index};
        write_trace_rows(out, key, results[i]);
        if (options.keep_traces) set.traces.emplace(std::move(key), std::move(results[i]));
      }
      out.flush();
      if (!out) throw IoError("write failed for " + path.string());
    }
  }
  std::filesystem::remove(marker, ec);
  return set;
}

}  // namespace affbench
