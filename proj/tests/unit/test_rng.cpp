#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "herdselect/rng.hpp"

using herdselect::Rng;

TEST(Rng, MatchesReferenceSplitMix64Sequence) {
  Rng rng(0);
  EXPECT_EQ(rng(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng(), 0x06C45D188009454FULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, UniformStaysInHalfOpenUnitInterval) {
  Rng rng(7);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1 - 1e-3);
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng rng(11);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Rng, NormalHasUnitMoments) {
  Rng rng(5);
  double s = 0.0, s2 = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(3);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  rng.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(SeedDerivation, MixMatchesDefinition) {
  using namespace herdselect;
  const std::uint64_t parent = 0x1234, label = 99;
  EXPECT_EQ(mix64(parent, label), finalize64(parent ^ finalize64(label + kGoldenGamma)));
  EXPECT_EQ(derive_seed(parent, {1, 2}), mix64(mix64(parent, 1), 2));
  EXPECT_EQ(derive_seed(parent, {}), parent);
}

TEST(SeedDerivation, StreamLabelIsFnv1a) {
  // Reference FNV-1a 64 values.
  EXPECT_EQ(herdselect::stream_label(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(herdselect::stream_label("a"), 0xAF63DC4C8601EC8CULL);
}

TEST(SeedDerivation, ChildrenAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(herdselect::mix64(42, r));
  EXPECT_EQ(seen.size(), 1000u);
}
