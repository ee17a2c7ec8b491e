#include <benchmark/benchmark.h>

#include "corpsim/features.hpp"
#include "corpsim/rng.hpp"
#include "corpsim/simcore.hpp"
#include "synthetic.hpp"

using namespace corpsim;

namespace {

std::vector<std::uint64_t> zipf_counts(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(20000 / (i + 1) + 1);
  return v;
}

}  // namespace

static void BM_SpearmanRho(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = zipf_counts(n, 1), y = zipf_counts(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spearman_rho(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SpearmanRho)->Arg(100)->Arg(1000)->Arg(5000);

static void BM_Vectorize(benchmark::State& state) {
  const auto type = static_cast<FeatureType>(state.range(0));
  const testing::Source src(testing::make_lexicon(3000), {});
  const auto tokens = testing::Register{{&src}, {1.0}}.generate(kDefaultChunkSize, 3);
  const auto vocab = vocabulary_from_counts(extract_grams(tokens, type).counts, type, 5000, "bench");
  for (auto _ : state) benchmark::DoNotOptimize(vectorize(tokens, vocab));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens.size()));
  state.SetLabel(std::string(to_string(type)));
}
BENCHMARK(BM_Vectorize)->DenseRange(0, 2);

static void BM_CorpusSimilarity200Pairs(benchmark::State& state) {
  std::vector<FrequencyVector> a, b;
  for (std::uint64_t i = 0; i < 20; ++i) {
    a.push_back({zipf_counts(5000, 10 + i), 1});
    b.push_back({zipf_counts(5000, 50 + i), 1});
  }
  for (auto _ : state) benchmark::DoNotOptimize(corpus_similarity(a, b, {.pairs = 200, .seed = 4}));
}
BENCHMARK(BM_CorpusSimilarity200Pairs)->Unit(benchmark::kMillisecond);
