#pragma once

// Trace CSV files: one per (algorithm, pair).
//
//   # <key>: <value>                    metadata, before the header
//   alg,f_first,f_second,alpha,instance,run,evals,best
//   <one row per improvement event>
//   # final_point: <alpha> <instance> <run> <x_1> ... <x_D>   after each run
//
// Reals use 17 significant digits, alpha 6 decimals. The `created` metadata
// line is the only non-deterministic content.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "affbench/error.hpp"
#include "affbench/format.hpp"
#include "affbench/optim.hpp"

namespace affbench {

inline constexpr std::string_view kTraceHeader = "alg,f_first,f_second,alpha,instance,run,evals,best";

struct TraceKey {
  std::string alg;
  int f_first = 0;
  int f_second = 0;
  double alpha = 0;  // canonical (6 decimals)
  int instance = 0;
  int run = 0;

  friend auto operator<=>(const TraceKey&, const TraceKey&) = default;
};

struct TraceSet {
  std::map<std::string, std::string> metadata;  // from the first file read / the config echo
  std::map<TraceKey, RunTrace> traces;
};

inline std::string trace_file_name(const std::string& alg, int f_first, int f_second) {
  return alg + "__f" + std::to_string(f_first) + "_f" + std::to_string(f_second) + ".csv";
}

/// Writes the event rows and the final-point comment for one run.
inline void write_trace_rows(std::ostream& out, const TraceKey& key, const RunTrace& trace) {
  const std::string prefix = key.alg + "," + std::to_string(key.f_first) + "," + std::to_string(key.f_second) + "," +
                             format_alpha(key.alpha) + "," + std::to_string(key.instance) + "," +
                             std::to_string(key.run) + ",";
  for (const auto& e : trace.events) out << prefix << e.evaluations << ',' << format_real(e.best_value) << '\n';
  out << "# final_point: " << format_alpha(key.alpha) << ' ' << key.instance << ' ' << key.run;
  for (double v : trace.final_best_point) out << ' ' << format_real(v);
  out << '\n';
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::filesystem::path& file, std::size_t line, const std::string& what) {
  throw ParseError(file.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

/// Reads one trace file into `set`. Throws ParseError naming file and line.
inline void read_trace_file(const std::filesystem::path& file, TraceSet& set) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());

  std::map<std::string, std::string> meta;
  std::vector<std::pair<TraceKey, Vector>> final_points;
  std::vector<TraceKey> touched;
  bool header_seen = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      sv.remove_prefix(1);
      sv = trim(sv);
      const auto colon = sv.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string key(trim(sv.substr(0, colon)));
      const std::string_view value = trim(sv.substr(colon + 1));
      if (key == "final_point") {
        const auto parts = split(value, ' ');
        if (parts.size() < 3) detail::parse_fail(file, lineno, "malformed final_point");
        const auto a = parse_real(parts[0]);
        const auto inst = parse_int(parts[1]);
        const auto run = parse_int(parts[2]);
        if (!a || !inst || !run) detail::parse_fail(file, lineno, "malformed final_point");
        Vector x(static_cast<Eigen::Index>(parts.size() - 3));
        for (std::size_t i = 3; i < parts.size(); ++i) {
          const auto v = parse_real(parts[i]);
          if (!v) detail::parse_fail(file, lineno, "malformed final_point coordinate");
          x[static_cast<Eigen::Index>(i - 3)] = *v;
        }
        final_points.push_back({TraceKey{"", 0, 0, *a, static_cast<int>(*inst), static_cast<int>(*run)}, x});
      } else {
        meta[key] = std::string(value);
      }
      continue;
    }
    if (!header_seen) {
      if (sv != kTraceHeader) detail::parse_fail(file, lineno, "expected header '" + std::string(kTraceHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(sv, ',');
    if (f.size() != 8) detail::parse_fail(file, lineno, "expected 8 fields, got " + std::to_string(f.size()));
    const auto f1 = parse_int(f[1]);
    const auto f2 = parse_int(f[2]);
    const auto alpha = parse_real(f[3]);
    const auto inst = parse_int(f[4]);
    const auto run = parse_int(f[5]);
    const auto evals = parse_int(f[6]);
    const auto best = parse_real(f[7]);
    if (f[0].empty() || !f1 || !f2 || !alpha || !inst || !run || !evals || !best)
      detail::parse_fail(file, lineno, "malformed field");
    if (*evals < 1) detail::parse_fail(file, lineno, "evals must be positive");
    TraceKey key{std::string(f[0]), static_cast<int>(*f1), static_cast<int>(*f2), *alpha, static_cast<int>(*inst),
                 static_cast<int>(*run)};
    auto& tr = set.traces[key];
    if (!tr.events.empty()) {
      const auto& last = tr.events.back();
      if (*evals <= last.evaluations || *best >= last.best_value)
        detail::parse_fail(file, lineno, "events must strictly improve");
    } else {
      touched.push_back(key);
    }
    tr.events.push_back({*evals, *best});
    tr.final_best = *best;
  }
  if (!header_seen) detail::parse_fail(file, lineno, "missing header");

  std::int64_t budget = 0;
  if (auto it = meta.find("budget"); it != meta.end()) {
    if (auto b = parse_int(it->second); b && *b > 0) budget = *b;
  }
  if (budget == 0) detail::parse_fail(file, lineno, "missing or invalid '# budget:' metadata");
  for (const auto& k : touched) {
    auto& tr = set.traces[k];
    tr.budget = budget;
    if (tr.events.back().evaluations > budget) detail::parse_fail(file, lineno, "event beyond budget");
  }
  // Final points share (alpha, instance, run) with the rows of this file.
  for (auto& [partial, x] : final_points) {
    for (const auto& k : touched) {
      if (k.alpha == partial.alpha && k.instance == partial.instance && k.run == partial.run) {
        set.traces[k].final_best_point = x;
      }
    }
  }
  if (set.metadata.empty()) set.metadata = std::move(meta);
}

/// Reads every *.csv trace file in a directory (sorted by name).
inline TraceSet read_trace_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  TraceSet set;
  for (const auto& f : files) read_trace_file(f, set);
  return set;
}

}  // namespace affbench
