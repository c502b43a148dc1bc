#pragma once

// Declarative experiment description and its TOML form. Keys match the
// field names of ExperimentConfig; unknown keys are rejected.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "affbench/error.hpp"
#include "affbench/format.hpp"
#include "affbench/optim.hpp"
#include "affbench/suite.hpp"

namespace affbench {

/// 0, 0.05, ..., 1.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int k = 0; k <= 20; ++k) a.push_back(k / 20.0);
  return a;
}

struct ExperimentConfig {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> alphas = default_alpha_grid();
  std::vector<int> instances_first = {1, 2, 3, 4, 5};
  int instance_second = 1;
  int runs_per_instance = 5;
  int dimension = 5;
  int budget_multiplier = 2000;
  std::vector<AlgorithmConfig> algorithms = {AlgorithmConfig::defaults(Algorithm::dcma)};
  std::uint64_t master_seed = 0;
  std::map<int, PlacementPolicy> placement_policy;  // absent ids use uniform placement

  std::int64_t budget() const { return static_cast<std::int64_t>(budget_multiplier) * dimension; }

  PlacementPolicy placement_for(int function_id) const {
    auto it = placement_policy.find(function_id);
    return it == placement_policy.end() ? PlacementPolicy{} : it->second;
  }

  std::size_t trace_count() const {
    return algorithms.size() * pairs.size() * alphas.size() * instances_first.size() *
           static_cast<std::size_t>(runs_per_instance);
  }

  void validate() const;
};

inline bool is_safe_label(const std::string& s) {
  if (s.empty()) return false;
  return std::ranges::all_of(s, [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.';
  });
}

inline void ExperimentConfig::validate() const {
  if (pairs.empty()) throw ConfigError("pairs must not be empty");
  std::set<std::pair<int, int>> seen_pairs;
  for (auto [a, b] : pairs) {
    if (!is_supported_function(a) || !is_supported_function(b))
      throw ConfigError("unsupported function in pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    if (!seen_pairs.insert({a, b}).second)
      throw ConfigError("duplicate pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  if (alphas.empty()) throw ConfigError("alphas must not be empty");
  std::set<std::string> seen_alphas;
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha " + format_real(a) + " outside [0, 1]");
    if (!seen_alphas.insert(format_alpha(a)).second) throw ConfigError("duplicate alpha " + format_alpha(a));
  }
  if (instances_first.empty()) throw ConfigError("instances_first must not be empty");
  std::set<int> seen_instances;
  for (int i : instances_first) {
    if (i < 1) throw ConfigError("instance ids must be >= 1");
    if (!seen_instances.insert(i).second) throw ConfigError("duplicate instance " + std::to_string(i));
  }
  if (instance_second < 1) throw ConfigError("instance_second must be >= 1");
  if (runs_per_instance < 1) throw ConfigError("runs_per_instance must be >= 1");
  if (dimension < 2) throw ConfigError("dimension must be >= 2");
  if (budget_multiplier < 1) throw ConfigError("budget_multiplier must be >= 1");
  if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
  std::set<std::string> labels;
  for (const auto& alg : algorithms) {
    alg.validate();
    const auto name = alg.display_name();
    if (!is_safe_label(name)) throw ConfigError("algorithm label '" + name + "' must match [A-Za-z0-9_.-]+");
    if (!labels.insert(name).second) throw ConfigError("duplicate algorithm label '" + name + "'");
    if (budget() < minimum_budget(alg, dimension))
      throw ConfigError(name + ": budget " + std::to_string(budget()) + " below its minimum " +
                        std::to_string(minimum_budget(alg, dimension)));
  }
  for (const auto& [f, p] : placement_policy) {
    if (!is_supported_function(f)) throw ConfigError("placement_policy for unsupported function " + std::to_string(f));
    p.validate();
  }
}

namespace detail {

inline void reject_unknown_keys(const toml::table& t, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& [k, v] : t) {
    if (std::ranges::find(allowed, k.str()) == allowed.end())
      throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

inline std::int64_t as_int(const toml::node& n, const std::string& what) {
  if (auto v = n.value_exact<std::int64_t>()) return *v;
  throw ConfigError(what + " must be an integer");
}

inline double as_real(const toml::node& n, const std::string& what) {
  if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
  if (auto v = n.value_exact<double>()) return *v;
  throw ConfigError(what + " must be a number");
}

inline const toml::array& as_array(const toml::node& n, const std::string& what) {
  if (const auto* a = n.as_array()) return *a;
  throw ConfigError(what + " must be an array");
}

inline int as_small_int(const toml::node& n, const std::string& what) {
  const auto v = as_int(n, what);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(what + " out of range");
  return static_cast<int>(v);
}

inline AlgorithmConfig parse_algorithm_table(const toml::table& t, std::size_t index) {
  const std::string where = "algorithms[" + std::to_string(index) + "]";
  reject_unknown_keys(t,
                      {"name", "label", "population_size", "sigma0", "init", "de_f", "de_cr", "pso_w", "pso_c1",
                       "pso_c2", "emna_selection"},
                      where);
  const auto name = t["name"].value<std::string>();
  if (!name) throw ConfigError(where + ".name is required");
  const auto alg = parse_algorithm(*name);
  if (!alg) throw ConfigError(where + ": unknown algorithm '" + *name + "'");
  auto c = AlgorithmConfig::defaults(*alg);
  if (auto n = t.get("label")) {
    auto s = n->value<std::string>();
    if (!s) throw ConfigError(where + ".label must be a string");
    c.label = *s;
  }
  if (auto n = t.get("population_size")) c.population_size = as_small_int(*n, where + ".population_size");
  if (auto n = t.get("sigma0")) c.sigma0 = as_real(*n, where + ".sigma0");
  if (auto n = t.get("init")) {
    auto s = n->value<std::string>();
    auto init = s ? parse_init(*s) : std::nullopt;
    if (!init) throw ConfigError(where + ".init must be \"origin_gaussian\" or \"uniform\"");
    c.init = *init;
  }
  if (auto n = t.get("de_f")) c.de_f = as_real(*n, where + ".de_f");
  if (auto n = t.get("de_cr")) c.de_cr = as_real(*n, where + ".de_cr");
  if (auto n = t.get("pso_w")) c.pso_w = as_real(*n, where + ".pso_w");
  if (auto n = t.get("pso_c1")) c.pso_c1 = as_real(*n, where + ".pso_c1");
  if (auto n = t.get("pso_c2")) c.pso_c2 = as_real(*n, where + ".pso_c2");
  if (auto n = t.get("emna_selection")) c.emna_selection = as_real(*n, where + ".emna_selection");
  return c;
}

inline PlacementPolicy parse_placement(const toml::node& n, const std::string& where) {
  PlacementPolicy p;
  std::optional<std::string> mode;
  if (n.is_string()) {
    mode = n.value<std::string>();
  } else if (const auto* t = n.as_table()) {
    reject_unknown_keys(*t, {"mode", "norm"}, where);
    mode = (*t)["mode"].value<std::string>();
    if (auto nn = t->get("norm")) p.norm = as_real(*nn, where + ".norm");
  } else {
    throw ConfigError(where + " must be a string or a table");
  }
  if (mode == "uniform")
    p.mode = PlacementPolicy::Mode::uniform;
  else if (mode == "fixed_norm")
    p.mode = PlacementPolicy::Mode::fixed_norm;
  else
    throw ConfigError(where + ".mode must be \"uniform\" or \"fixed_norm\"");
  return p;
}

}  // namespace detail

/// Parses and validates a TOML experiment description.
inline ExperimentConfig parse_config(std::string_view text, std::string_view source = "config") {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (" << e.source() << ")";
    throw ConfigError(msg.str());
  }
  detail::reject_unknown_keys(root,
                              {"pairs", "alphas", "instances_first", "instance_second", "runs_per_instance",
                               "dimension", "budget_multiplier", "algorithms", "master_seed", "placement_policy"},
                              "config");
  ExperimentConfig c;
  if (auto n = root.get("pairs")) {
    for (const auto& p : detail::as_array(*n, "pairs")) {
      const auto& pa = detail::as_array(p, "pairs entry");
      if (pa.size() != 2) throw ConfigError("each pair must have exactly two function ids");
      c.pairs.emplace_back(detail::as_small_int(*pa.get(0), "pair function id"),
                           detail::as_small_int(*pa.get(1), "pair function id"));
    }
  }
  if (auto n = root.get("alphas")) {
    c.alphas.clear();
    for (const auto& a : detail::as_array(*n, "alphas")) c.alphas.push_back(detail::as_real(a, "alpha"));
  }
  if (auto n = root.get("instances_first")) {
    c.instances_first.clear();
    for (const auto& i : detail::as_array(*n, "instances_first"))
      c.instances_first.push_back(detail::as_small_int(i, "instance id"));
  }
  if (auto n = root.get("instance_second")) c.instance_second = detail::as_small_int(*n, "instance_second");
  if (auto n = root.get("runs_per_instance")) c.runs_per_instance = detail::as_small_int(*n, "runs_per_instance");
  if (auto n = root.get("dimension")) c.dimension = detail::as_small_int(*n, "dimension");
  if (auto n = root.get("budget_multiplier")) c.budget_multiplier = detail::as_small_int(*n, "budget_multiplier");
  if (auto n = root.get("master_seed")) c.master_seed = static_cast<std::uint64_t>(detail::as_int(*n, "master_seed"));
  if (auto n = root.get("algorithms")) {
    c.algorithms.clear();
    const auto& arr = detail::as_array(*n, "algorithms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto* t = arr.get(i)->as_table();
      if (!t) throw ConfigError("algorithms must be an array of tables");
      c.algorithms.push_back(detail::parse_algorithm_table(*t, i));
    }
  }
  if (auto n = root.get("placement_policy")) {
    const auto* t = n->as_table();
    if (!t) throw ConfigError("placement_policy must be a table keyed by function id");
    for (const auto& [k, v] : *t) {
      std::string_view key = k.str();
      if (key.starts_with('f') || key.starts_with('F')) key.remove_prefix(1);
      const auto id = parse_int(key);
      if (!id) throw ConfigError("placement_policy key '" + std::string(k.str()) + "' is not a function id");
      c.placement_policy[static_cast<int>(*id)] = detail::parse_placement(v, "placement_policy." + std::string(k.str()));
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace affbench
