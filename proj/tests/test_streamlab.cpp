#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "slidenorm/errors.hpp"
#include "slidenorm/stream_io.hpp"
#include "slidenorm/streamlab.hpp"

using namespace slidenorm;

TEST(Streamlab, AppendixCShape) {
  SyntheticSpec sp;
  sp.m = 1 << 12;
  sp.n = 1 << 16;
  auto s = gen_appendix_c(sp);
  ASSERT_EQ(s.size(), sp.m);
  EXPECT_EQ(appendix_c_tail(sp.m), 4u);
  for (size_t i = s.size() - 4; i < s.size(); ++i) EXPECT_EQ(s[i], 1u);
  EXPECT_EQ(generate(sp), s);
  sp.m = 1000;
  EXPECT_THROW(sp.validate(), ParameterError);
  sp.m = 1024;
  sp.n = 256;
  EXPECT_THROW(sp.validate(), ParameterError);
}

TEST(Streamlab, GeneratorsDeterministicAndInRange) {
  for (Variant v : {Variant::Zipf, Variant::Uniform}) {
    SyntheticSpec sp;
    sp.m = 2000;
    sp.n = 300;
    sp.variant = v;
    auto a = generate(sp), b = generate(sp);
    EXPECT_EQ(a, b);
    for (uint64_t x : a) {
      ASSERT_GE(x, 1u);
      ASSERT_LE(x, 300u);
    }
  }
  EXPECT_EQ(variant_from_string("appendix-c"), Variant::AppendixC);
  EXPECT_EQ(to_string(Variant::Zipf), "zipf");
  EXPECT_THROW(variant_from_string("caida"), ParameterError);
}

TEST(Streamlab, OracleSelfCheck) {
  ExactWindowOracle o(5);
  for (uint64_t x : {1, 2, 1, 3, 1, 1, 2}) o.push(x);
  EXPECT_EQ(o.frequency(1), 3u);  // window is 1 3 1 1 2
  EXPECT_EQ(o.frequency(2), 1u);
  EXPECT_TRUE(o.self_check());
  EXPECT_NEAR(o.l2(), std::sqrt(11.0), 1e-12);
  auto f = window_frequencies(std::vector<uint64_t>{1, 2, 1, 3, 1, 1, 2}, 5);
  EXPECT_EQ(f[1], 3u);
}

TEST(Streamlab, BaselinesAtRateOne) {
  std::vector<uint64_t> s{1, 2, 2, 3, 3, 3};
  auto l2 = make_lp(2);
  double exact = std::sqrt(1 + 4 + 9.0);
  EXPECT_NEAR(baseline_uniform(s, 1.0, BaselineMode::Stream, 6, *l2, 1).estimate, exact, 1e-12);
  EXPECT_NEAR(baseline_uniform(s, 1.0, BaselineMode::Universe, 6, *l2, 1).estimate, exact, 1e-12);
  auto top = make_topk(2);
  EXPECT_TRUE(baseline_uniform(s, 0.5, BaselineMode::Universe, 6, *top, 1).unscaled);
  EXPECT_DOUBLE_EQ(relative_error(9, 10), 0.1);
}

TEST(StreamIo, RoundTripAndErrors) {
  auto dir = std::filesystem::temp_directory_path() / "slidenorm_io_test";
  std::filesystem::create_directories(dir);
  StreamFile s{100, 3, 7, {5, 1, 100}};
  auto p = (dir / "s.txt").string();
  write_stream(p, s);
  auto r = read_stream(p);
  EXPECT_EQ(r.items, s.items);
  EXPECT_EQ(r.n, 100u);
  EXPECT_EQ(r.seed, 7u);
  EXPECT_THROW(read_stream((dir / "missing.txt").string()), IoError);
  {
    FILE* f = std::fopen(p.c_str(), "w");
    std::fputs("#n=10 m=2 seed=1\n3\n11\n", f);
    std::fclose(f);
  }
  EXPECT_THROW(read_stream(p), InputError);

  RowFile rf;
  rf.d = 2;
  rf.response = true;
  rf.rows = gen_gaussian_rows(5, 2, 1, true);
  auto rp = (dir / "rows.txt").string();
  write_rows(rp, rf);
  auto back = read_rows(rp);
  ASSERT_EQ(back.rows.size(), 5u);
  EXPECT_TRUE(back.response);
  for (size_t i = 0; i < 5; ++i) EXPECT_TRUE(back.rows[i].isApprox(rf.rows[i], 1e-15));
  std::filesystem::remove_all(dir);
}
