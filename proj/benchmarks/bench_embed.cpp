#include <benchmark/benchmark.h>

#include <string>

#include "corpsim/embed.hpp"
#include "corpsim/rng.hpp"

using namespace corpsim;

namespace {

EmbeddingSet random_set(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingSet e(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = rng.uniform01() - 0.5;
    e.add("w" + std::to_string(i), v);
  }
  return e;
}

}  // namespace

static void BM_NeighborQuery(benchmark::State& state) {
  const auto e = random_set(static_cast<std::size_t>(state.range(0)), 100, 1);
  const NeighborIndex index(e);
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.query(e.tokens()[q], 10));
    q = (q + 1) % e.size();
  }
}
BENCHMARK(BM_NeighborQuery)->Arg(5000)->Arg(20000);

static void BM_EmbeddingOverlap1000Targets(benchmark::State& state) {
  const auto a = random_set(10000, 100, 1), b = random_set(10000, 100, 2);
  const std::vector<std::string> targets(a.tokens().begin(), a.tokens().begin() + 1000);
  for (auto _ : state) benchmark::DoNotOptimize(embedding_overlap(a, b, targets, 10));
}
BENCHMARK(BM_EmbeddingOverlap1000Targets)->Unit(benchmark::kMillisecond);

static void BM_FormatParseRoundTrip(benchmark::State& state) {
  const auto e = random_set(2000, 100, 3);
  for (auto _ : state) benchmark::DoNotOptimize(parse_embeddings(format_embeddings(e)));
}
BENCHMARK(BM_FormatParseRoundTrip)->Unit(benchmark::kMillisecond);
