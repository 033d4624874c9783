#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "slidenorm/ams.hpp"
#include "slidenorm/errors.hpp"
#include "slidenorm/streamlab.hpp"
#include "slidenorm/suffix_l2.hpp"

using namespace slidenorm;

TEST(Ams, MedianOfMeansEvenGroups) {
  // groups of one rep each: values squared are 1,4,9,16 -> median (4+9)/2
  double acc[4] = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(ams_median_of_means(acc, 4, 4), 6.5);
  double six[48];
  for (int k = 0; k < 48; ++k) six[k] = (k / 8) + 1;  // group g has value g+1
  EXPECT_DOUBLE_EQ(ams_median_of_means(six, 48, 6), (9.0 + 16.0) / 2);
}

TEST(Ams, F2WithinFactor) {
  int ok = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    AmsSketch s(seed);
    std::map<uint64_t, int> f;
    std::mt19937_64 g(seed);
    for (int t = 0; t < 5000; ++t) {
      uint64_t x = g() % 300 + 1;
      s.update(x);
      ++f[x];
    }
    double f2 = 0;
    for (auto& [_, c] : f) f2 += static_cast<double>(c) * c;
    ok += std::fabs(s.f2_estimate() / f2 - 1.0) < 0.5;
  }
  EXPECT_GE(ok, 19);
}

TEST(SuffixL2, SingleUpdate) {
  SuffixL2Estimator fe(3);
  fe.update(5);
  ASSERT_EQ(fe.timestamps().size(), 1u);
  EXPECT_DOUBLE_EQ(fe.estimates()[0], 1.0);
  EXPECT_NEAR(fe.query(1), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(fe.invariant_holds());
}

TEST(SuffixL2, BoundAndInvariantEveryUpdate) {
  SyntheticSpec sp;
  sp.m = 4096;
  sp.n = 65536;
  auto s = gen_appendix_c(sp);
  SuffixL2Estimator::Options o;
  o.window = 1024;
  SuffixL2Estimator fe(9, o);
  for (uint64_t x : s) {
    fe.update(x);
    ASSERT_LE(fe.timestamps().size(), fe.timestamp_bound());
    ASSERT_TRUE(fe.invariant_holds());
  }
}

TEST(SuffixL2, SandwichOnWindows) {
  SyntheticSpec sp;
  sp.m = 2048;
  sp.n = 4096;
  sp.variant = Variant::Zipf;
  auto s = generate(sp);
  SuffixL2Estimator fe(4);
  for (uint64_t x : s) fe.update(x);
  int ok = 0, total = 0;
  for (uint64_t W = 1; W <= s.size(); W = W * 3 / 2 + 1) {
    double exact = 0;
    for (double v : window_frequency_values(s, W)) exact += v * v;
    exact = std::sqrt(exact);
    double F = fe.query(W);
    ok += F <= exact * (1 + 1e-12) && exact <= 2 * F * (1 + 1e-12);
    ++total;
  }
  EXPECT_GE(ok, total - 1);
}

TEST(SuffixL2, KeepMaskShape) {
  SuffixL2Estimator fe(1);
  for (int i = 0; i < 100; ++i) {
    size_t before = fe.timestamps().size();
    const auto& keep = fe.update(static_cast<uint64_t>(i % 7 + 1));
    ASSERT_EQ(keep.size(), before + 1);
    ASSERT_EQ(keep.back(), 1);  // newest timestamp is never dropped
  }
}

TEST(SuffixL2, GlobalPositionsWithGaps) {
  // Updates at positions 10, 20, ..., 1000; windows are in positions.
  SuffixL2Estimator fe(9);
  for (uint64_t k = 1; k <= 100; ++k) fe.update_at(k % 7 + 1, 10 * k);
  EXPECT_EQ(fe.length(), 100u);
  EXPECT_EQ(fe.now(), 1000u);
  EXPECT_THROW(fe.update_at(1, 1000), ParameterError);
  // a window past the latest update is empty
  EXPECT_EQ(fe.query_at(5, 1009), 0.0);
  // exact suffix norms over the positions in the window
  for (uint64_t W : {15ull, 95ull, 400ull, 1000ull, 1200ull}) {
    const uint64_t now = 1200, start = now - W + 1;
    std::map<uint64_t, double> f;
    for (uint64_t k = 1; k <= 100; ++k)
      if (10 * k >= start) f[k % 7 + 1] += 1;
    double l2 = 0;
    for (auto& [key, v] : f) l2 += v * v;
    l2 = std::sqrt(l2);
    double F = fe.query_at(W, now);
    if (l2 == 0) {
      EXPECT_EQ(F, 0.0) << W;
    } else {
      EXPECT_LE(F, l2) << W;
      EXPECT_LE(l2, 2 * F) << W;
    }
  }
}
