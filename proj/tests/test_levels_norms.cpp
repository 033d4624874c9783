#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "slidenorm/errors.hpp"
#include "slidenorm/levels.hpp"
#include "slidenorm/norms.hpp"

using namespace slidenorm;

TEST(Levels, BinningEdges) {
  LevelVector lv(2.0, 0.0, 100);
  // value(j) = 2^j, covers [2^(j-1), 2^j)
  EXPECT_EQ(lv.level_of(1.0), 1);
  EXPECT_EQ(lv.level_of(1.999), 1);
  EXPECT_EQ(lv.level_of(2.0), 2);
  for (double v : {0.3, 1.0, 7.5, 1e6, 123.456}) {
    int j = lv.level_of(v);
    EXPECT_LE(lv.lower_edge(j), v);
    EXPECT_LT(v, lv.value(j));
  }
  LevelVector off(1.1, 0.37, 100);
  for (double v = 0.5; v < 500; v *= 1.013) {
    int j = off.level_of(v);
    ASSERT_LE(off.lower_edge(j), v);
    ASSERT_LT(v, off.value(j));
  }
}

TEST(Levels, FromValuesAndValidate) {
  std::vector<double> x{1, 1, 3, 0, -3, 8};
  auto lv = LevelVector::from_values(x, 2.0, 0.0, 10);
  EXPECT_DOUBLE_EQ(lv.total_count(), 5.0);
  EXPECT_NO_THROW(lv.validate());
  LevelVector bad(2.0, 0.0, 2);
  bad.add(1, 3);
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW(LevelVector(1.0, 0.0, 1), ParameterError);
}

TEST(Norms, LpClosedFormMatchesExpansion) {
  auto l3 = make_lp(3);
  LevelVector lv(1.1, 0.2, 1000);
  lv.add(3, 10);
  lv.add(20, 2);
  auto e = lv.expand();
  double direct = 0;
  for (double v : e) direct += v * v * v;
  direct = std::cbrt(direct);
  EXPECT_NEAR(l3->evaluate(lv), direct, 1e-10 * direct);
}

TEST(Norms, TopKEqualEntries) {
  // one bucket of b >= k equal entries: k * value
  auto tk = make_topk(5);
  LevelVector lv(1.5, 0.0, 100);
  lv.add(4, 12);
  EXPECT_NEAR(tk->evaluate(lv), 5 * lv.value(4), 1e-9);
}

TEST(Norms, KSupportSpecialCases) {
  std::vector<double> x{3, 1, 2};
  auto k1 = make_ksupport(1);
  auto k3 = make_ksupport(3);
  EXPECT_NEAR(k1->evaluate_values(x), 6.0, 1e-12);              // k=1 is L1
  EXPECT_NEAR(k3->evaluate_values(x), std::sqrt(14.0), 1e-12);  // k=d is L2
}

TEST(Norms, NormAxiomsOnRandomVectors) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<std::unique_ptr<NormDescriptor>> ns;
  ns.push_back(make_lp(1));
  ns.push_back(make_lp(2));
  ns.push_back(make_lp(3.5));
  ns.push_back(make_topk(3));
  ns.push_back(make_ksupport(4));
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(12), b(12), s(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = u(g);
      b[i] = u(g);
      s[i] = a[i] + b[i];
    }
    for (auto& n : ns) {
      double na = n->evaluate_values(a), nb = n->evaluate_values(b);
      EXPECT_LE(n->evaluate_values(s), (na + nb) * (1 + 1e-12)) << n->name();
      std::vector<double> a2(a);
      for (double& v : a2) v *= 2.5;
      EXPECT_NEAR(n->evaluate_values(a2), 2.5 * na, 1e-9 * na) << n->name();
      std::vector<double> p(a);
      std::shuffle(p.begin(), p.end(), g);
      EXPECT_NEAR(n->evaluate_values(p), na, 1e-9 * na) << n->name();
    }
  }
}

TEST(Norms, MmcPresets) {
  const uint64_t n = 1 << 16;
  EXPECT_DOUBLE_EQ(mmc::lp(n, 1), 16.0);
  EXPECT_DOUBLE_EQ(mmc::lp(n, 2), 16.0);
  EXPECT_NEAR(mmc::lp(n, 4), std::pow(2.0, 16 * 0.25), 1e-9);
  EXPECT_NEAR(mmc::topk(n, n / 2), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(mmc::qprime(n), 16.0);
}

TEST(Norms, Registry) {
  auto reg = NormRegistry::with_defaults();
  EXPECT_TRUE(reg.contains("lp"));
  EXPECT_TRUE(reg.contains("topk"));
  EXPECT_TRUE(reg.contains("ksupport"));
  auto n = reg.create("lp", NormParams{3.0, 1});
  EXPECT_EQ(n->params(), "p=3");
  EXPECT_THROW(reg.create("box", NormParams{}), ParameterError);
  reg.add("linf", [](const NormParams&) { return make_topk(1); });
  EXPECT_TRUE(reg.contains("linf"));
}
