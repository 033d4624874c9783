#include <gtest/gtest.h>

#include <cmath>

#include "slidenorm/errors.hpp"
#include "slidenorm/sliding_hh.hpp"
#include "slidenorm/streamlab.hpp"

using namespace slidenorm;

namespace {

HHConfig config(uint64_t W, uint64_t n) {
  HHConfig c;
  c.window = W;
  c.eta = 0.1;
  c.nu = 0.2;
  c.universe = n;
  return c;
}

}  // namespace

TEST(SlidingHH, ConfigValidation) {
  HHConfig c = config(10, 100);
  c.nu = 0.3;
  EXPECT_THROW(c.validate(), ParameterError);
  c = config(0, 100);
  EXPECT_THROW(c.validate(), ParameterError);
  c = config(10, 100);
  EXPECT_FALSE(c.nonconforming());
  c.report_factor = 0.25;
  EXPECT_TRUE(c.nonconforming());
  // 2 (32 / (nu eta))^2 = 2 * 1600^2
  EXPECT_EQ(config(10, 100).candidate_cap(), 5120000u);
}

TEST(SlidingHH, RangeError) {
  SlidingHeavyHitters hh(config(8, 10), 1);
  EXPECT_THROW(hh.update(0), RangeError);
  EXPECT_THROW(hh.update(11), RangeError);
}

TEST(SlidingHH, SingleHeavyItemExact) {
  SlidingHeavyHitters hh(config(100, 1000), 3);
  for (int i = 0; i < 300; ++i) hh.update(7);
  auto r = hh.report();
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].item, 7u);
  EXPECT_LE(r[0].f_hat, 100.0);
  EXPECT_GE(r[0].f_hat * 1.2, 100.0);
}

TEST(SlidingHH, ExpiredItemDropsOut) {
  SlidingHeavyHitters hh(config(64, 1000), 5);
  for (int i = 0; i < 64; ++i) hh.update(3);
  for (int i = 0; i < 64; ++i) hh.update(static_cast<uint64_t>(100 + i));
  for (const auto& r : hh.report()) EXPECT_NE(r.item, 3u);
}

TEST(SlidingHH, AppendixCContract) {
  // item 1 is the only eta-heavy item once W=m; exact oracle check
  SyntheticSpec sp;
  sp.m = 8192;
  sp.n = 65536;
  auto s = generate(sp);
  for (uint64_t W : {sp.m, sp.m / 2}) {
    SlidingHeavyHitters hh(config(W, sp.n), 17);
    for (uint64_t x : s) {
      hh.update(x);
      ASSERT_LE(hh.timestamp_count(), hh.timestamp_bound());
    }
    auto f = window_frequencies(s, W);
    double l2 = 0;
    for (auto& [_, c] : f) l2 += static_cast<double>(c) * c;
    l2 = std::sqrt(l2);
    auto rep = hh.report();
    for (auto& [i, c] : f) {
      if (c >= 0.1 * l2) {
        bool found = false;
        for (auto& r : rep) found |= r.item == i;
        EXPECT_TRUE(found) << "missing heavy item " << i;
      }
    }
    for (auto& r : rep) {
      double fi = static_cast<double>(f[r.item]);
      EXPECT_GE(fi, 0.1 / 8 * l2);
      EXPECT_LE(r.f_hat, fi);
      EXPECT_LE(fi, 1.2 * r.f_hat);
    }
    EXPECT_TRUE(hh.invariants_hold());
  }
}

TEST(SlidingHH, ShorterQueryWindow) {
  SlidingHeavyHitters hh(config(200, 1000), 2);
  for (int i = 0; i < 150; ++i) hh.update(static_cast<uint64_t>(i % 50 + 10));
  for (int i = 0; i < 50; ++i) hh.update(5);
  auto r = hh.report(50);
  ASSERT_FALSE(r.empty());
  bool found = false;
  for (auto& h : r) {
    found |= h.item == 5;
    if (h.item == 5) EXPECT_LE(h.f_hat, 50.0);
  }
  EXPECT_TRUE(found);
  EXPECT_THROW(hh.report(201), ParameterError);
}

TEST(SlidingHH, DiagnosticsText) {
  SlidingHeavyHitters hh(config(16, 100), 4);
  for (uint64_t i = 1; i <= 40; ++i) hh.update(i % 5 + 1);
  auto d = hh.diagnostics();
  std::string kv = d.to_kv();
  EXPECT_NE(kv.find("timestamps="), std::string::npos);
  EXPECT_NE(kv.find("space_entries=" + std::to_string(d.space_entries())), std::string::npos);
}
