#pragma once

// Turns a TraceSet into the metric CSVs: auc.csv, ert.csv, rank.csv, traj.csv.
// AUC and ERT rows are emitted per instance and pooled (instance = `all`).

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "affbench/error.hpp"
#include "affbench/format.hpp"
#include "affbench/metrics.hpp"
#include "affbench/trace_io.hpp"

namespace affbench {

struct AnalysisOptions {
  double target = 1e-8;
  AucAxis axis = AucAxis::log;
};

struct TraceGroup {
  std::vector<RunTrace> runs;
  std::int64_t budget = 0;
};

struct GroupedTraces {
  std::map<std::pair<std::string, CellKey>, TraceGroup> pooled;
  std::map<std::tuple<std::string, CellKey, int>, TraceGroup> per_instance;
};

inline GroupedTraces group_traces(const TraceSet& set) {
  GroupedTraces g;
  auto add = [](TraceGroup& grp, const RunTrace& tr, const std::string& what) {
    if (grp.runs.empty())
      grp.budget = tr.budget;
    else if (grp.budget != tr.budget)
      throw ParseError("traces of " + what + " disagree on the budget");
    grp.runs.push_back(tr);
  };
  for (const auto& [k, tr] : set.traces) {
    const CellKey cell{k.f_first, k.f_second, k.alpha};
    const std::string what = k.alg + " f" + std::to_string(k.f_first) + "/f" + std::to_string(k.f_second) +
                             " alpha " + format_alpha(k.alpha);
    add(g.pooled[{k.alg, cell}], tr, what);
    add(g.per_instance[{k.alg, cell, k.instance}], tr, what);
  }
  return g;
}

/// AUC per (alg, cell, instance) and pooled per (alg, cell).
inline AucTable auc_table(const GroupedTraces& g, AucAxis axis = AucAxis::log) {
  const auto grid = target_grid();
  AucTable table;
  for (const auto& [key, grp] : g.per_instance) {
    const auto& [alg, cell, inst] = key;
    table[{alg, cell, inst}] = ecdf_auc(grp.runs, grid, grp.budget, axis);
  }
  for (const auto& [key, grp] : g.pooled) table[{key.first, key.second, std::nullopt}] = ecdf_auc(grp.runs, grid, grp.budget, axis);
  return table;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

inline std::string cell_prefix(const std::string& alg, const CellKey& c) {
  return alg + "," + std::to_string(c.f_first) + "," + std::to_string(c.f_second) + "," + format_alpha(c.alpha);
}

}  // namespace detail

/// Writes the four metric CSVs into `out_dir`.
inline void write_analysis(const TraceSet& set, const std::filesystem::path& out_dir, const AnalysisOptions& opt = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const auto groups = group_traces(set);
  const auto table = auc_table(groups, opt.axis);

  {
    auto out = detail::open_output(out_dir / "auc.csv");
    out << "alg,f_first,f_second,alpha,instance,auc\n";
    for (const auto& [key, auc] : table) {
      out << detail::cell_prefix(key.alg, key.cell) << ','
          << (key.instance ? std::to_string(*key.instance) : std::string("all")) << ',' << format_real(auc) << '\n';
    }
    if (!out) throw IoError("write failed for auc.csv");
  }
  {
    auto out = detail::open_output(out_dir / "ert.csv");
    out << "alg,f_first,f_second,alpha,instance,target,ert\n";
    for (const auto& [key, grp] : groups.per_instance) {
      const auto& [alg, cell, inst] = key;
      out << detail::cell_prefix(alg, cell) << ',' << inst << ',' << format_real(opt.target) << ','
          << format_real(ert(grp.runs, opt.target, grp.budget)) << '\n';
    }
    for (const auto& [key, grp] : groups.pooled) {
      out << detail::cell_prefix(key.first, key.second) << ",all," << format_real(opt.target) << ','
          << format_real(ert(grp.runs, opt.target, grp.budget)) << '\n';
    }
    if (!out) throw IoError("write failed for ert.csv");
  }
  {
    std::set<CellKey> cells;
    for (const auto& [key, grp] : groups.pooled) cells.insert(key.second);
    auto out = detail::open_output(out_dir / "rank.csv");
    out << "f_first,f_second,alpha,alg,rank,tied\n";
    for (const auto& cell : cells) {
      for (const auto& r : rank_algorithms(table, cell)) {
        out << cell.f_first << ',' << cell.f_second << ',' << format_alpha(cell.alpha) << ',' << r.alg << ','
            << r.rank << ',' << (r.tied ? "true" : "false") << '\n';
      }
    }
    if (!out) throw IoError("write failed for rank.csv");
  }
  {
    auto out = detail::open_output(out_dir / "traj.csv");
    out << "alg,f_first,f_second,alpha,evals,geomean\n";
    for (const auto& [key, grp] : groups.pooled) {
      const auto evals = geometric_eval_grid(grp.budget);
      const auto curve = geomean_trajectory(grp.runs, evals);
      for (std::size_t i = 0; i < evals.size(); ++i)
        out << detail::cell_prefix(key.first, key.second) << ',' << evals[i] << ',' << format_real(curve[i]) << '\n';
    }
    if (!out) throw IoError("write failed for traj.csv");
  }
}

}  // namespace affbench
