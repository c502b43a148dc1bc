#include <gtest/gtest.h>

#include <cmath>

#include "affbench/rng.hpp"

namespace affbench {
namespace {

// Golden values from tests/oracles/golden.py.
TEST(Mix64, GoldenValueAtZero) { EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL); }

TEST(InstanceStream, GoldenFirstDraws) {
  EXPECT_EQ(instance_stream(1, 1, 0).next_u64(), 0x59D3137D729AE4D3ULL);
  EXPECT_EQ(instance_stream(1, 2, 0).next_u64(), 0x5D53E3B16FFD16D2ULL);
  EXPECT_DOUBLE_EQ(instance_stream(1, 1, 0).uniform(), 0.35087701618850131);
}

TEST(InstanceStream, SameKeyRepeatsFirstHundredDraws) {
  auto a = instance_stream(21, 7, 3);
  auto b = instance_stream(21, 7, 3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(InstanceStream, DifferentInstanceDiffers) {
  EXPECT_NE(instance_stream(1, 1, 0).next_u64(), instance_stream(1, 2, 0).next_u64());
  EXPECT_NE(instance_stream(1, 1, 0).next_u64(), instance_stream(1, 1, 1).next_u64());
}

TEST(Stream, UniformStaysInUnitInterval) {
  Stream s(42);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Stream, BelowStaysInRange) {
  Stream s(3);
  for (int i = 0; i < 10000; ++i) ASSERT_LT(s.below(7), 7u);
}

TEST(Stream, GaussianMoments) {
  Stream s(11);
  constexpr int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.gaussian();
    ASSERT_TRUE(std::isfinite(g));
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.015);
}

}  // namespace
}  // namespace affbench
