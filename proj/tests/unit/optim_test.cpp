#include <gtest/gtest.h>

#include <cmath>

#include "affbench/combine.hpp"
#include "affbench/optim.hpp"

namespace affbench {
namespace {

const Algorithm kAll[] = {Algorithm::de, Algorithm::pso, Algorithm::emna, Algorithm::dcma, Algorithm::nelder_mead};

/// Plain sphere around a chosen center that counts its evaluations.
struct CountingSphere {
  Vector center;
  mutable long calls = 0;

  int dimension() const { return static_cast<int>(center.size()); }
  double operator()(const Vector& x) const {
    ++calls;
    return (x - center).squaredNorm();
  }
};

struct Constant {
  int d = 3;
  mutable long calls = 0;
  int dimension() const { return d; }
  double operator()(const Vector&) const {
    ++calls;
    return 1.0;
  }
};

void expect_valid_trace(const RunTrace& tr, std::int64_t budget) {
  ASSERT_FALSE(tr.events.empty());
  EXPECT_EQ(tr.events.front().evaluations, 1);
  EXPECT_EQ(tr.budget, budget);
  for (std::size_t i = 1; i < tr.events.size(); ++i) {
    EXPECT_GT(tr.events[i].evaluations, tr.events[i - 1].evaluations);
    EXPECT_LT(tr.events[i].best_value, tr.events[i - 1].best_value);
  }
  EXPECT_LE(tr.events.back().evaluations, budget);
  EXPECT_EQ(tr.events.back().best_value, tr.final_best);
}

class EachAlgorithm : public ::testing::TestWithParam<Algorithm> {};

TEST_P(EachAlgorithm, MonotoneTraceWithinBudget) {
  const auto f1 = make_problem({1, 1, 2});
  const auto cfg = AlgorithmConfig::defaults(GetParam());
  const auto tr = run_algorithm(cfg, f1, 100, 42);
  expect_valid_trace(tr, 100);
  EXPECT_LE(tr.final_best, tr.events.front().best_value);
  EXPECT_EQ(tr.final_best_point.size(), 2);
  EXPECT_DOUBLE_EQ(f1(tr.final_best_point), tr.final_best);
}

TEST_P(EachAlgorithm, UsesExactlyTheBudget) {
  for (std::int64_t budget : {50, 137, 1000}) {
    CountingSphere sphere{Vector::Constant(3, 1.5)};
    run_algorithm(AlgorithmConfig::defaults(GetParam()), sphere, budget, 7);
    EXPECT_EQ(sphere.calls, budget);
  }
}

TEST_P(EachAlgorithm, TerminatesOnFlatFunction) {
  Constant flat;
  const auto tr = run_algorithm(AlgorithmConfig::defaults(GetParam()), flat, 500, 1);
  EXPECT_EQ(flat.calls, 500);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_EQ(tr.events[0], (TraceEvent{1, 1.0}));
}

TEST_P(EachAlgorithm, ReplayIsBitIdentical) {
  const auto p = combine(make_problem({21, 1, 3}), make_problem({9, 1, 3}), 0.5);
  const auto cfg = AlgorithmConfig::defaults(GetParam());
  EXPECT_EQ(run_algorithm(cfg, p, 2000, 99), run_algorithm(cfg, p, 2000, 99));
  EXPECT_NE(run_algorithm(cfg, p, 2000, 99).events, run_algorithm(cfg, p, 2000, 100).events);
}

TEST_P(EachAlgorithm, MakesProgressOnSphere) {
  const auto p = combine(make_problem({1, 3, 2}), make_problem({1, 3, 2}), 1.0);
  const auto tr = run_algorithm(AlgorithmConfig::defaults(GetParam()), p, 4000, 5);
  EXPECT_LT(tr.final_best, 1e-2);
}

INSTANTIATE_TEST_SUITE_P(Portfolio, EachAlgorithm, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(RunAlgorithm, RejectsTooSmallBudgets) {
  const auto p = make_problem({1, 1, 5});
  EXPECT_THROW(run_algorithm(AlgorithmConfig::defaults(Algorithm::de), p, 29, 0), ConfigError);
  EXPECT_THROW(run_algorithm(AlgorithmConfig::defaults(Algorithm::pso), p, 39, 0), ConfigError);
  EXPECT_THROW(run_algorithm(AlgorithmConfig::defaults(Algorithm::dcma), p, dcma_lambda(5) - 1, 0), ConfigError);
  EXPECT_THROW(run_algorithm(AlgorithmConfig::defaults(Algorithm::nelder_mead), p, 5, 0), ConfigError);
  EXPECT_NO_THROW(run_algorithm(AlgorithmConfig::defaults(Algorithm::nelder_mead), p, 6, 0));
}

TEST(RunAlgorithm, RejectsInvalidConfigs) {
  const auto p = make_problem({1, 1, 2});
  auto de = AlgorithmConfig::defaults(Algorithm::de);
  de.population_size = 3;
  EXPECT_THROW(run_algorithm(de, p, 100, 0), ConfigError);
  auto cma = AlgorithmConfig::defaults(Algorithm::dcma);
  cma.sigma0 = 0.0;
  EXPECT_THROW(run_algorithm(cma, p, 100, 0), ConfigError);
}

TEST(Dcma, LambdaFormula) {
  EXPECT_EQ(dcma_lambda(2), 6);
  EXPECT_EQ(dcma_lambda(5), 8);
  EXPECT_EQ(dcma_lambda(10), 10);
}

// 50 seeded runs on the pure sphere; at least 90% must reach 1e-8.
TEST(Dcma, SolvesSphereInFiveDimensions) {
  const auto cfg = AlgorithmConfig::defaults(Algorithm::dcma);
  ASSERT_EQ(cfg.sigma0, 0.3);
  const auto p = make_problem({1, 1, 5});
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) solved += run_algorithm(cfg, p, 10000, seed).final_best < 1e-8;
  EXPECT_GE(solved, 45);
}

// Sign test on final precision with the optimum at o versus -o. Origin
// initialization may bias early progress, so only gross bias is rejected.
TEST(Dcma, NoGrossTranslationBias) {
  const auto p = make_problem({1, 2, 5});
  CountingSphere plus{p.optimum_location()};
  CountingSphere minus{Vector(-p.optimum_location())};
  const auto cfg = AlgorithmConfig::defaults(Algorithm::dcma);
  int wins = 0, trials = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double a = run_algorithm(cfg, plus, 10000, seed).final_best;
    const double b = run_algorithm(cfg, minus, 10000, seed).final_best;
    EXPECT_LT(a, 1e-8);
    EXPECT_LT(b, 1e-8);
    if (a != b) {
      ++trials;
      wins += a < b;
    }
  }
  // two-sided binomial(trials, 1/2) p-value
  auto cdf = [&](int k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += std::exp(std::lgamma(trials + 1.0) - std::lgamma(i + 1.0) -
                                               std::lgamma(trials - i + 1.0) - trials * std::log(2.0));
    return s;
  };
  const double p_value = std::min(1.0, 2.0 * std::min(cdf(wins), cdf(trials - wins)));
  EXPECT_GT(p_value, 0.01) << wins << "/" << trials;
}

TEST(Dcma, LargerInitialStepSizeIsHonoured) {
  auto small = AlgorithmConfig::defaults(Algorithm::dcma);
  auto large = small;
  large.sigma0 = 2.0;
  const auto p = make_problem({1, 1, 5});
  // The first generation's spread scales with sigma0.
  const auto a = run_algorithm(small, p, dcma_lambda(5), 3);
  const auto b = run_algorithm(large, p, dcma_lambda(5), 3);
  EXPECT_NE(a.final_best_point, b.final_best_point);
  EXPECT_NEAR(b.final_best_point.norm() / a.final_best_point.norm(), 2.0 / 0.3, 1e-9);
}

TEST(AlgorithmConfig, ParseNames) {
  for (auto a : kAll) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("cobyla").has_value());
  EXPECT_EQ(parse_init("uniform"), Init::uniform);
  EXPECT_FALSE(parse_init("gaussian").has_value());
}

}  // namespace
}  // namespace affbench
