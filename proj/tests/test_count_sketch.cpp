#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "slidenorm/count_sketch.hpp"
#include "slidenorm/errors.hpp"

using namespace slidenorm;

TEST(CountSketch, WidthFormula) {
  EXPECT_EQ(count_sketch_width(0.1), 100u);
  EXPECT_EQ(count_sketch_width(0.5), 4u);
  EXPECT_EQ(count_sketch_width(1e-12), kMaxSparseWidth);
}

TEST(CountSketch, MedianOfRows) {
  std::vector<int64_t> v{5, -1, 3};
  EXPECT_EQ(median_of_rows(v), 3);
  std::vector<int64_t> w{1, 2, 3, 4};
  EXPECT_EQ(median_of_rows(w), 3);  // upper median
}

TEST(CountSketch, SingleItemExact) {
  CountSketch cs(1000, 5, 64, 0.1, 3);
  for (int i = 0; i < 17; ++i) cs.update(42, 1);
  EXPECT_EQ(cs.estimate(42), 17);
}

TEST(CountSketch, ErrorWithinNuL2) {
  // |est - f| <= nu ||f||_2 with high probability per item
  const double nu = 0.1;
  CountSketch cs(5000, 5, count_sketch_width(nu), nu, 11);
  std::map<uint64_t, int64_t> f;
  uint64_t x = 1;
  for (int t = 0; t < 20000; ++t) {
    x = (x * 48271) % 4999 + 1;
    uint64_t item = t % 3 == 0 ? 7 : x;
    cs.update(item, 1);
    ++f[item];
  }
  double l2 = 0;
  for (auto& [_, c] : f) l2 += static_cast<double>(c) * c;
  l2 = std::sqrt(l2);
  int bad = 0;
  for (auto& [i, c] : f) bad += std::fabs(static_cast<double>(cs.estimate(i) - c)) > nu * l2;
  EXPECT_LE(bad, static_cast<int>(f.size() / 100));
  auto hh = cs.heavy_hitters(l2);
  EXPECT_NE(std::find(hh.begin(), hh.end(), 7u), hh.end());
}

TEST(CountSketch, MergeEqualsJointStream) {
  CountSketch a(100, 3, 16, 0.25, 5), b(100, 3, 16, 0.25, 5), ab(100, 3, 16, 0.25, 5);
  for (uint64_t i = 1; i <= 50; ++i) {
    a.update(i, 1);
    ab.update(i, 1);
  }
  for (uint64_t i = 25; i <= 100; ++i) {
    b.update(i, 2);
    ab.update(i, 2);
  }
  a.merge(b);
  EXPECT_EQ(a.table(), ab.table());
  CountSketch other(100, 3, 16, 0.25, 6);
  EXPECT_THROW(a.merge(other), ParameterError);
}

TEST(CountSketch, RangeErrors) {
  CountSketch cs(10, 3, 8, 0.4, 1);
  EXPECT_THROW(cs.update(0, 1), RangeError);
  EXPECT_THROW(cs.update(11, 1), RangeError);
}
