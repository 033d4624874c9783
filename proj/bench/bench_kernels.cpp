// OpenMP kernels against their serial reference paths.
#include <benchmark/benchmark.h>

#include <random>

#include "slidenorm/hashing.hpp"
#include "slidenorm/norms.hpp"
#include "slidenorm/orlicz.hpp"
#include "slidenorm/streamlab.hpp"
#include "slidenorm/symnorm.hpp"

using namespace slidenorm;

namespace {

constexpr uint64_t kUniverse = 1 << 16;

std::vector<uint64_t> zipf_stream(uint64_t m) {
  SyntheticSpec s;
  s.m = m;
  s.n = kUniverse;
  s.seed = 1;
  s.variant = Variant::Zipf;
  return generate(s);
}

SymNormParams grid_params(uint64_t R) {
  PracticalOverrides ov;
  ov.R = R;
  return param_select(0.2, make_lp(2.0)->mmc_bound(kUniverse), kUniverse, Mode::Practical, ov);
}

void BM_GridSerial(benchmark::State& st) {
  const uint64_t m = static_cast<uint64_t>(st.range(0));
  auto stream = zipf_stream(m);
  auto params = grid_params(2);
  GridOptions go;
  go.window = m;
  for (auto _ : st) {
    LayerGrid g(params, go, 7);
    for (uint64_t x : stream) g.update(x);
    benchmark::DoNotOptimize(g.length());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(m));
}

void BM_GridBatch(benchmark::State& st) {
  const uint64_t m = static_cast<uint64_t>(st.range(0));
  auto stream = zipf_stream(m);
  auto params = grid_params(2);
  GridOptions go;
  go.window = m;
  for (auto _ : st) {
    LayerGrid g(params, go, 7);
    g.update_batch(stream);
    benchmark::DoNotOptimize(g.length());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(m));
}

void embedding_case(benchmark::State& st, bool parallel) {
  auto rows = gen_gaussian_rows(1024, 4, 3);
  auto core = stream_sample(rows, 0.25, 1.0, 0.05, 4);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<Eigen::VectorXd> dirs(static_cast<size_t>(st.range(0)), Eigen::VectorXd(4));
  for (auto& v : dirs)
    for (int i = 0; i < 4; ++i) v[i] = nd(rng);
  auto h = g_huber();
  for (auto _ : st) benchmark::DoNotOptimize(embedding_ratios(core, rows, dirs, h, parallel));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_EmbeddingSerial(benchmark::State& st) { embedding_case(st, false); }
void BM_EmbeddingParallel(benchmark::State& st) { embedding_case(st, true); }

}  // namespace

BENCHMARK(BM_GridSerial)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridBatch)->Arg(1 << 12)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbeddingSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmbeddingParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
