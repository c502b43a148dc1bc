#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "affbench/runner.hpp"

namespace affbench {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("affbench_runner_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the creation timestamp, which legitimately differs between runs.
std::string without_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (!line.starts_with("# created:")) out += line + '\n';
  return out;
}

ExperimentConfig small_config() {
  return parse_config(R"(
pairs = [[21, 1], [3, 9]]
alphas = [0.0, 0.5, 1.0]
instances_first = [1, 2]
runs_per_instance = 2
dimension = 2
budget_multiplier = 50
master_seed = 7
[[algorithms]]
name = "dcma"
[[algorithms]]
name = "de"
population_size = 10
)");
}

TEST(DeriveSeed, GoldenValues) {
  static_assert(derive_seed(0, 0, 0, 0, 0, 0) == 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(derive_seed(0, 0, 0, 0, 0, 1), 0x38B8170FABFD0419ULL);
  EXPECT_EQ(derive_seed(42, 1, 2, 3, 4, 5), 0x66DB0FCF222DCAEEULL);
}

TEST(DeriveSeed, DistinctAcrossGrid) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 3; ++a)
    for (std::uint64_t p = 0; p < 7; ++p)
      for (std::uint64_t al = 0; al < 21; ++al)
        for (std::uint64_t i = 1; i <= 5; ++i)
          for (std::uint64_t r = 0; r < 5; ++r) seen.insert(derive_seed(0, a, p, al, i, r));
  EXPECT_EQ(seen.size(), 3u * 7 * 21 * 5 * 5);
}

TEST(Config, FullFile) {
  const auto c = parse_config(R"(
pairs = [[21, 1], [21, 9]]
alphas = [0.0, 0.25, 1.0]
instances_first = [3, 4]
instance_second = 2
runs_per_instance = 3
dimension = 10
budget_multiplier = 100
master_seed = 123
[[algorithms]]
name = "de"
label = "de-small"
population_size = 12
de_f = 0.7
[[algorithms]]
name = "dcma"
sigma0 = 0.5
init = "uniform"
[placement_policy]
21 = { mode = "fixed_norm", norm = 1.0 }
f9 = "uniform"
)");
  EXPECT_EQ(c.pairs, (std::vector<std::pair<int, int>>{{21, 1}, {21, 9}}));
  EXPECT_EQ(c.alphas, (std::vector<double>{0.0, 0.25, 1.0}));
  EXPECT_EQ(c.instances_first, (std::vector<int>{3, 4}));
  EXPECT_EQ(c.instance_second, 2);
  EXPECT_EQ(c.runs_per_instance, 3);
  EXPECT_EQ(c.dimension, 10);
  EXPECT_EQ(c.budget(), 1000);
  EXPECT_EQ(c.master_seed, 123u);
  ASSERT_EQ(c.algorithms.size(), 2u);
  EXPECT_EQ(c.algorithms[0].display_name(), "de-small");
  EXPECT_EQ(c.algorithms[0].population_size, 12);
  EXPECT_EQ(c.algorithms[0].de_f, 0.7);
  EXPECT_EQ(c.algorithms[1].display_name(), "dcma");
  EXPECT_EQ(c.algorithms[1].sigma0, 0.5);
  EXPECT_EQ(c.algorithms[1].init, Init::uniform);
  EXPECT_EQ(c.placement_for(21).mode, PlacementPolicy::Mode::fixed_norm);
  EXPECT_EQ(c.placement_for(21).norm, 1.0);
  EXPECT_EQ(c.placement_for(9).mode, PlacementPolicy::Mode::uniform);
  EXPECT_EQ(c.placement_for(1).mode, PlacementPolicy::Mode::uniform);
  EXPECT_EQ(c.trace_count(), 2u * 2 * 3 * 2 * 3);
}

TEST(Config, Defaults) {
  const auto c = parse_config("pairs = [[1, 2]]");
  ASSERT_EQ(c.alphas.size(), 21u);
  for (int k = 0; k <= 20; ++k) EXPECT_DOUBLE_EQ(c.alphas[k], k / 20.0);
  EXPECT_EQ(c.instances_first, (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.instance_second, 1);
  EXPECT_EQ(c.runs_per_instance, 5);
  EXPECT_EQ(c.dimension, 5);
  EXPECT_EQ(c.budget(), 10000);
  EXPECT_EQ(c.master_seed, 0u);
  ASSERT_EQ(c.algorithms.size(), 1u);
  EXPECT_EQ(c.algorithms[0].name, Algorithm::dcma);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\nbudget = 3"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\nalphas = [0.5, 1.5]"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\nalphas = [0.5, 0.5]"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2"), ConfigError);
  EXPECT_THROW(parse_config("pairs = []"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 4]]"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2, 3]]"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\ndimension = 1"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\ninstances_first = [0]"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[[algorithms]]\nname = \"cobyla\""), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[[algorithms]]\nname = \"de\"\nspeed = 2"), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[[algorithms]]\nname = \"de\"\n[[algorithms]]\nname = \"de\""),
               ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[[algorithms]]\nname = \"de\"\nlabel = \"a/b\""), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\nbudget_multiplier = 2\n[[algorithms]]\nname = \"de\""), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[placement_policy]\n21 = \"gaussian\""), ConfigError);
  EXPECT_THROW(parse_config("pairs = [[1, 2]]\n[placement_policy]\n21 = { mode = \"fixed_norm\", norm = 5.0 }"),
               ConfigError);
  EXPECT_NO_THROW(parse_config("pairs = [[1, 2]]\n[[algorithms]]\nname = \"de\"\n[[algorithms]]\nname = \"de\"\n"
                               "label = \"de2\""));
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/affbench.toml"), IoError);
}

TEST(Config, TraceCountArithmetic) {
  auto c = parse_config("pairs = [[21, 1]]\nalphas = [0.0]\ninstances_first = [1]\nruns_per_instance = 2");
  EXPECT_EQ(c.trace_count(), 2u);
  c = parse_config(R"(
pairs = [[21, 1], [21, 9], [9, 21], [3, 1], [11, 16], [16, 11], [2, 10]]
instances_first = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
)");
  EXPECT_EQ(c.trace_count(), 7350u);
}

TEST(RunExperiment, MinimalGridProducesTwoTraces) {
  const auto dir = scratch("minimal");
  const auto c = parse_config(
      "pairs = [[21, 1]]\nalphas = [0.5]\ninstances_first = [1]\nruns_per_instance = 2\ndimension = 2\n"
      "budget_multiplier = 20");
  const auto set = run_experiment(c, dir);
  EXPECT_EQ(set.traces.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "dcma__f21_f1.csv"));
  EXPECT_FALSE(fs::exists(dir / kIncompleteMarker));
  for (const auto& [k, tr] : set.traces) {
    EXPECT_EQ(tr.budget, 40);
    EXPECT_EQ(tr.events.front().evaluations, 1);
  }
}

TEST(RunExperiment, ByteIdenticalRerunAndWorkerIndependence) {
  const auto c = small_config();
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  run_experiment(c, a, {1, false});
  run_experiment(c, b, {4, false});
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const auto other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(without_timestamp(slurp(e.path())), without_timestamp(slurp(other)));
  }
  EXPECT_EQ(files, 4u);
}

TEST(RunExperiment, CellsAreOrderIndependent) {
  const auto c = small_config();
  const auto dir = scratch("order");
  const auto set = run_experiment(c, dir);
  // Re-run a few cells in reverse grid order, standalone.
  const GridCell cells[] = {{1, 1, 2, 1, 1}, {0, 0, 1, 0, 0}, {1, 0, 0, 1, 0}, {0, 1, 2, 0, 1}};
  for (const auto& cell : cells) {
    const auto [f1, f2] = c.pairs[cell.pair_index];
    const TraceKey key{c.algorithms[cell.alg_index].display_name(), f1, f2, c.alphas[cell.alpha_index],
                       c.instances_first[cell.instance_index], cell.run_index};
    const auto& stored = set.traces.at(key);
    const auto fresh = run_cell(c, cell);
    EXPECT_EQ(fresh.events, stored.events);
    EXPECT_EQ(fresh.final_best_point, stored.final_best_point);
  }
}

TEST(RunExperiment, MasterSeedChangesResults) {
  auto c = small_config();
  const auto a = run_cell(c, {0, 0, 1, 0, 0});
  c.master_seed = 8;
  EXPECT_NE(a.events, run_cell(c, {0, 0, 1, 0, 0}).events);
}

TEST(RunExperiment, BlockedOutputLeavesMarker) {
  const auto dir = scratch("blocked");
  fs::create_directories(dir / "dcma__f21_f1.csv");
  const auto c = parse_config(
      "pairs = [[21, 1]]\nalphas = [0.5]\ninstances_first = [1]\nruns_per_instance = 1\ndimension = 2\n"
      "budget_multiplier = 20");
  EXPECT_THROW(run_experiment(c, dir), IoError);
  EXPECT_TRUE(fs::exists(dir / kIncompleteMarker));
}

TEST(TraceIo, RoundTrip) {
  const auto c = small_config();
  const auto dir = scratch("roundtrip");
  const auto written = run_experiment(c, dir);
  const auto read = read_trace_dir(dir);
  ASSERT_EQ(read.traces.size(), c.trace_count());
  ASSERT_EQ(read.traces.size(), written.traces.size());
  for (const auto& [k, tr] : written.traces) {
    const auto it = read.traces.find(k);
    ASSERT_NE(it, read.traces.end());
    EXPECT_EQ(it->second, tr);
  }
  EXPECT_EQ(read.metadata.at("budget"), "100");
  EXPECT_EQ(read.metadata.at("dimension"), "2");
  EXPECT_EQ(read.metadata.at("master_seed"), "7");
  EXPECT_EQ(read.metadata.at("version"), std::string(kVersion));
}

TEST(TraceIo, ParseErrorNamesFileAndLine) {
  const auto dir = scratch("corrupt");
  run_experiment(parse_config("pairs = [[1, 2]]\nalphas = [0.5]\ninstances_first = [1]\nruns_per_instance = 1\n"
                              "dimension = 2\nbudget_multiplier = 20"),
                 dir);
  const auto file = dir / "dcma__f1_f2.csv";
  auto text = slurp(file);
  const auto header = text.find(std::string(kTraceHeader));
  const auto row = text.find('\n', header) + 1;
  text.insert(row, "dcma,1,2,0.500000,1,0,oops,3\n");
  std::ofstream(file, std::ios::binary) << text;
  std::size_t line = 1;
  for (std::size_t i = 0; i < row; ++i) line += text[i] == '\n';
  try {
    read_trace_dir(dir);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(file.string() + ":" + std::to_string(line) + ":"), std::string::npos)
        << e.what();
  }
}

TEST(TraceIo, RejectsNonMonotoneRowsAndMissingBudget) {
  const auto dir = scratch("nonmono");
  fs::create_directories(dir);
  std::ofstream(dir / "a.csv") << "# budget: 10\n"
                               << kTraceHeader << "\nde,1,2,0.5,1,0,1,5\nde,1,2,0.5,1,0,2,6\n";
  TraceSet set;
  EXPECT_THROW(read_trace_file(dir / "a.csv", set), ParseError);
  std::ofstream(dir / "b.csv") << kTraceHeader << "\nde,1,2,0.5,1,0,1,5\n";
  EXPECT_THROW(read_trace_file(dir / "b.csv", set), ParseError);
  EXPECT_THROW(read_trace_file(dir / "missing.csv", set), IoError);
}

}  // namespace
}  // namespace affbench
