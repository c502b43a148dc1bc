#pragma once

// Fixed-target performance measures over improvement traces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "affbench/optim.hpp"

namespace affbench {

inline constexpr int kTargetCount = 51;

/// 51 targets 10^2 ... 10^-8, five per decade.
struct TargetGrid {
  std::array<double, kTargetCount> targets{};

  std::size_t size() const noexcept { return targets.size(); }
  double operator[](std::size_t i) const noexcept { return targets[i]; }
};

inline TargetGrid target_grid() {
  TargetGrid g;
  for (int i = 0; i < kTargetCount; ++i) g.targets[i] = std::pow(10.0, (10.0 - i) / 5.0);
  return g;
}

enum class AucAxis { log, linear };

using HittingTimes = std::array<std::optional<std::int64_t>, kTargetCount>;

/// First evaluation at which the best-so-far value reaches each target.
inline HittingTimes hitting_times(const RunTrace& trace, const TargetGrid& grid) {
  HittingTimes hits{};
  std::size_t next = 0;
  for (const auto& e : trace.events) {
    while (next < grid.size() && e.best_value <= grid[next]) hits[next++] = e.evaluations;
    if (next == grid.size()) break;
  }
  return hits;
}

/// Best-so-far value after `t` evaluations; +inf before the first event.
inline double best_so_far(const RunTrace& trace, std::int64_t t) {
  auto it = std::upper_bound(trace.events.begin(), trace.events.end(), t,
                             [](std::int64_t v, const TraceEvent& e) { return v < e.evaluations; });
  if (it == trace.events.begin()) return std::numeric_limits<double>::infinity();
  return std::prev(it)->best_value;
}

/// Weight of a hit at evaluation t in the normalized AUC.
inline double auc_weight(std::int64_t t, std::int64_t budget, AucAxis axis) {
  if (t < 1 || t > budget) return 0.0;
  if (axis == AucAxis::linear) return 1.0 - static_cast<double>(t - 1) / static_cast<double>(budget);
  if (budget == 1) return 1.0;
  return 1.0 - std::log(static_cast<double>(t)) / std::log(static_cast<double>(budget));
}

/// Normalized area under the ECDF of (run, target) hitting times. 1 means
/// every target was hit at the first evaluation.
inline double ecdf_auc(std::span<const RunTrace> traces, const TargetGrid& grid, std::int64_t budget,
                       AucAxis axis = AucAxis::log) {
  if (traces.empty()) throw std::invalid_argument("ecdf_auc: empty trace set");
  if (budget < 1) throw std::invalid_argument("ecdf_auc: budget must be positive");
  double sum = 0.0;
  for (const auto& tr : traces) {
    for (const auto& h : hitting_times(tr, grid))
      if (h) sum += auc_weight(*h, budget, axis);
  }
  return sum / (static_cast<double>(traces.size()) * static_cast<double>(grid.size()));
}

/// Evaluation counts 1 .. budget spaced `per_decade` per factor of ten.
inline std::vector<std::int64_t> geometric_eval_grid(std::int64_t budget, int per_decade = 10) {
  std::vector<std::int64_t> grid;
  for (int k = 0;; ++k) {
    const auto t = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
    if (t >= budget) break;
    if (grid.empty() || grid.back() != t) grid.push_back(t);
  }
  grid.push_back(budget);
  return grid;
}

struct ECDFCurve {
  std::int64_t budget = 0;
  std::vector<std::pair<std::int64_t, double>> points;  // (evaluations, fraction of pairs hit)
};

inline ECDFCurve ecdf_curve(std::span<const RunTrace> traces, const TargetGrid& grid, std::int64_t budget) {
  if (traces.empty()) throw std::invalid_argument("ecdf_curve: empty trace set");
  std::vector<std::int64_t> hits;
  for (const auto& tr : traces)
    for (const auto& h : hitting_times(tr, grid))
      if (h && *h <= budget) hits.push_back(*h);
  std::sort(hits.begin(), hits.end());

  std::vector<std::int64_t> ts = geometric_eval_grid(budget);
  ts.insert(ts.end(), hits.begin(), hits.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  const double pairs = static_cast<double>(traces.size()) * static_cast<double>(grid.size());
  ECDFCurve curve{budget, {}};
  curve.points.reserve(ts.size());
  for (auto t : ts) {
    const auto n = std::upper_bound(hits.begin(), hits.end(), t) - hits.begin();
    curve.points.emplace_back(t, static_cast<double>(n) / pairs);
  }
  return curve;
}

/// Expected running time to `target`; +inf when no run hits it.
inline double ert(std::span<const RunTrace> traces, double target, std::int64_t budget) {
  if (traces.empty()) throw std::invalid_argument("ert: empty trace set");
  double spent = 0.0;
  int successes = 0;
  for (const auto& tr : traces) {
    std::optional<std::int64_t> hit;
    for (const auto& e : tr.events) {
      if (e.evaluations > budget) break;
      if (e.best_value <= target) {
        hit = e.evaluations;
        break;
      }
    }
    if (hit) {
      spent += static_cast<double>(*hit);
      ++successes;
    } else {
      spent += static_cast<double>(budget);
    }
  }
  if (successes == 0) return std::numeric_limits<double>::infinity();
  return spent / successes;
}

/// Geometric mean over runs of the floored best-so-far value at each grid point.
inline std::vector<double> geomean_trajectory(std::span<const RunTrace> traces,
                                              std::span<const std::int64_t> eval_grid, double floor = 1e-12) {
  if (traces.empty()) throw std::invalid_argument("geomean_trajectory: empty trace set");
  std::vector<double> out;
  out.reserve(eval_grid.size());
  for (auto t : eval_grid) {
    double acc = 0.0;
    for (const auto& tr : traces) acc += std::log(std::max(best_so_far(tr, t), floor));
    out.push_back(std::exp(acc / static_cast<double>(traces.size())));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rankings

struct CellKey {
  int f_first = 0;
  int f_second = 0;
  double alpha = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct AucKey {
  std::string alg;
  CellKey cell;
  std::optional<int> instance;  // nullopt: pooled over instances

  friend auto operator<=>(const AucKey&, const AucKey&) = default;
};

using AucTable = std::map<AucKey, double>;

struct RankEntry {
  std::string alg;
  double auc = 0;
  int rank = 0;
  bool tied = false;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

/// Ranks algorithms on one cell by pooled AUC, highest first. Exact ties share
/// the lowest rank and are flagged.
inline std::vector<RankEntry> rank_algorithms(const AucTable& table, const CellKey& cell) {
  std::vector<RankEntry> entries;
  for (const auto& [key, auc] : table)
    if (!key.instance && key.cell == cell) entries.push_back({key.alg, auc, 0, false});
  if (entries.empty())
    throw std::out_of_range("rank_algorithms: no AUC for cell f" + std::to_string(cell.f_first) + "/f" +
                            std::to_string(cell.f_second) + " alpha " + std::to_string(cell.alpha));
  std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    return std::tie(b.auc, a.alg) < std::tie(a.auc, b.alg);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].rank = (i > 0 && entries[i].auc == entries[i - 1].auc) ? entries[i - 1].rank : static_cast<int>(i) + 1;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool same_prev = i > 0 && entries[i - 1].rank == entries[i].rank;
    const bool same_next = i + 1 < entries.size() && entries[i + 1].rank == entries[i].rank;
    entries[i].tied = same_prev || same_next;
  }
  return entries;
}

}  // namespace affbench
