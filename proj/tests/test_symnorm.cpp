#include <gtest/gtest.h>

#include <cmath>

#include "slidenorm/errors.hpp"
#include "slidenorm/streamlab.hpp"
#include "slidenorm/symnorm.hpp"

using namespace slidenorm;

namespace {

SymNormParams small_params(uint64_t n, uint64_t R = 3) {
  PracticalOverrides ov;
  ov.R = R;
  return param_select(0.2, 16, n, Mode::Practical, ov);
}

}  // namespace

TEST(ParamSelect, ProvableFormulas) {
  // unit constants at eps=0.1, n=2^16, mmc=1
  auto p = param_select(0.1, 1, 1 << 16, Mode::Provable);
  EXPECT_NEAR(p.nu, 6.25e-4, 1e-15);
  EXPECT_NEAR(p.R_formula, std::pow(16.0, 10) / 1e-5, 1e3);
  EXPECT_FALSE(p.nonconforming);
  // eta is proportional to 1/mmc
  auto q = param_select(0.1, 2, 1 << 16, Mode::Provable);
  EXPECT_NEAR(q.eta, p.eta / 2, 1e-18);
  EXPECT_EQ(q.nu, p.nu);
  EXPECT_THROW(param_select(0.5, 1, 16, Mode::Provable), ParameterError);
  EXPECT_THROW(param_select(0.1, 0.5, 16, Mode::Provable), ParameterError);
}

TEST(ParamSelect, PracticalClipsAndFlags) {
  auto p = param_select(0.1, 1, 1 << 16, Mode::Practical);
  EXPECT_EQ(p.R, 64u);
  EXPECT_TRUE(p.nonconforming);
  EXPECT_GE(p.nu, 1e-3);
  EXPECT_GE(p.eta, 1e-3);
}

TEST(LayerGrid, ProvableGridTooLarge) {
  auto p = param_select(0.1, 1, 1 << 16, Mode::Provable);
  EXPECT_THROW(LayerGrid(p, GridOptions{}, 1), CapacityError);
}

TEST(LayerGrid, AdmissionRates) {
  // expected admitted cells per update <= 2R, within 5% of R * sum 2^-i
  const uint64_t n = 1 << 16;
  auto p = small_params(n, 4);
  GridOptions go;
  go.window = 16;
  LayerGrid g(p, go, 7);
  EXPECT_EQ(g.levels(), 17u);
  double expect = 0;
  for (size_t i = 0; i < g.levels(); ++i) expect += g.reps() * std::ldexp(1.0, -static_cast<int>(i));
  double total = 0;
  for (uint64_t j = 1; j <= 10000; ++j)
    for (size_t i = 0; i < g.levels(); ++i)
      for (size_t r = 0; r < g.reps(); ++r) total += g.admits(i, r, j * 6 + 1);
  EXPECT_NEAR(total / 10000, expect, 0.05 * expect);
  for (size_t r = 0; r < g.reps(); ++r) EXPECT_TRUE(g.admits(0, r, 12345));
  EXPECT_EQ(g.admits(5, 1, 999), g.admits(5, 1, 999));
}

TEST(LayerGrid, BatchMatchesSerial) {
  const uint64_t n = 4096;
  auto p = small_params(n, 2);
  GridOptions go;
  go.window = 512;
  SyntheticSpec sp;
  sp.m = 1024;
  sp.n = n;
  sp.variant = Variant::Zipf;
  auto s = generate(sp);
  LayerGrid a(p, go, 3), b(p, go, 3);
  for (uint64_t x : s) a.update(x);
  b.update_batch(std::span<const uint64_t>(s.data(), 300));
  b.update_batch(std::span<const uint64_t>(s.data() + 300, s.size() - 300));
  ASSERT_EQ(a.length(), b.length());
  for (size_t i = 0; i < a.levels(); ++i)
    for (size_t r = 0; r < a.reps(); ++r) {
      auto ra = a.cell(i, r).report(), rb = b.cell(i, r).report();
      ASSERT_EQ(ra.size(), rb.size());
      for (size_t k = 0; k < ra.size(); ++k) {
        EXPECT_EQ(ra[k].item, rb[k].item);
        EXPECT_EQ(ra[k].f_hat, rb[k].f_hat);
      }
    }
  auto l2 = make_lp(2);
  EXPECT_EQ(symnorm_estimate(a, 512, *l2), symnorm_estimate(b, 512, *l2));
}

TEST(LayerGrid, RangeError) {
  auto p = small_params(100, 1);
  LayerGrid g(p, GridOptions{}, 1);
  EXPECT_THROW(g.update(101), RangeError);
  EXPECT_THROW(g.update(0), RangeError);
}

TEST(LevelSizes, EqualFrequencies) {
  // 1000 coordinates of frequency 8: one level, b within [950, 1000]
  const uint64_t n = 1 << 12;
  PracticalOverrides ov;
  ov.R = 5;
  ov.alpha_scale = 0.5;        // alpha = 1.1 at eps = 0.2
  ov.eps_prime_scale = 0.25;   // eps' = 0.05
  auto p = param_select(0.2, 12, n, Mode::Practical, ov);
  GridOptions go;
  go.window = 8000;
  LayerGrid g(p, go, 21);
  std::vector<uint64_t> s;
  for (int rep = 0; rep < 8; ++rep)
    for (uint64_t j = 1; j <= 1000; ++j) s.push_back(j);
  g.update_batch(s);
  auto rep = estimate_level_sizes(g, 8000);
  ASSERT_EQ(rep.levels.buckets().size(), 1u);
  const auto& b = rep.levels.buckets()[0];
  EXPECT_EQ(b.level, rep.levels.level_of(8.0));
  EXPECT_GE(b.count, 950);
  EXPECT_LE(b.count, 1000);
}

TEST(LevelSizes, OneSparse) {
  auto p = small_params(1000, 3);
  GridOptions go;
  go.window = 50;
  LayerGrid g(p, go, 2);
  for (int i = 0; i < 50; ++i) g.update(77);
  auto rep = estimate_level_sizes(g, 50);
  ASSERT_EQ(rep.levels.buckets().size(), 1u);
  EXPECT_EQ(rep.levels.buckets()[0].count, 1.0);
  EXPECT_EQ(rep.chosen_rate[0], 0);
}

TEST(Reconstruct, BetaZeroKeepsAll) {
  auto l1 = make_lp(1);
  LevelVector lv(1.1, 0.0, 100);
  lv.add(1, 50);
  lv.add(40, 1);
  EXPECT_DOUBLE_EQ(reconstruct_norm(lv, *l1, 0.0), l1->evaluate(lv));
  EXPECT_DOUBLE_EQ(reconstruct_norm(LevelVector(1.1, 0.0, 10), *l1, 0.1), 0.0);
  // 55 vs 45.3 in L1: only the single-entry bucket falls below half
  EXPECT_NEAR(reconstruct_norm(lv, *l1, 0.5), 50 * lv.value(1), 1e-9);
}

TEST(Symnorm, CapacityErrorForLargeMmc) {
  auto p = param_select(0.2, 2.0, 1 << 10, Mode::Practical, [] {
    PracticalOverrides o;
    o.R = 1;
    return o;
  }());
  LayerGrid g(p, GridOptions{}, 1);
  g.update(3);
  auto l2 = make_lp(2);  // mmc 10 > 2
  EXPECT_THROW(symnorm_estimate(g, 1, *l2), CapacityError);
  auto top = make_topk(1 << 9);  // sqrt(2)
  EXPECT_NO_THROW(symnorm_estimate(g, 1, *top));
}

TEST(Symnorm, AppendixCL2AndDeterminism) {
  SyntheticSpec sp;
  sp.m = 4096;
  sp.n = 1 << 14;
  auto s = generate(sp);
  auto p = small_params(sp.n, 3);
  GridOptions go;
  go.window = sp.m;
  LayerGrid g(p, go, 5), h(p, go, 5);
  g.update_batch(s);
  h.update_batch(s);
  auto l2 = make_lp(2);
  double est = symnorm_estimate(g, sp.m, *l2);
  double exact = l2->evaluate_values(window_frequency_values(s, sp.m));
  EXPECT_LT(relative_error(est, exact), 0.2);
  EXPECT_EQ(est, symnorm_estimate(h, sp.m, *l2));
}

TEST(Symnorm, CsvRow) {
  EXPECT_EQ(estimate_csv_header(), "norm,W,eps,mode,estimate,exact,relative_error,seed");
  auto row = estimate_csv_row("L2", 64, 0.2, Mode::Practical, 9, 10.0, 3);
  EXPECT_EQ(row, "L2,64,0.2,practical,9,10,0.1,3");
  EXPECT_EQ(estimate_csv_row("L1", 8, 0.2, Mode::Provable, 1, std::nullopt, 1), "L1,8,0.2,provable,1,,,1");
}

TEST(LevelSizes, SampledCellsUseGlobalWindow) {
  // First half: 200 items twice each; second half: 400 fresh singletons.
  // The half window must see only singletons at every sampling rate.
  const uint64_t n = 1 << 12;
  std::vector<uint64_t> s;
  for (int rep = 0; rep < 2; ++rep)
    for (uint64_t k = 1; k <= 200; ++k) s.push_back(k);
  for (uint64_t k = 1; k <= 400; ++k) s.push_back(1000 + k);
  GridOptions go;
  go.window = s.size();
  LayerGrid g(small_params(n), go, 21);
  g.update_batch(s);
  for (size_t i = 1; i < g.levels(); ++i) {
    for (size_t r = 0; r < g.reps(); ++r) {
      for (const auto& h : g.cell(i, r).report_at(400, g.length())) EXPECT_GT(h.item, 1000u);
    }
  }
  auto rep = estimate_level_sizes(g, 400);
  ASSERT_EQ(rep.levels.buckets().size(), 1u);
  EXPECT_EQ(rep.levels.buckets()[0].count, 400.0);
}
