#include <benchmark/benchmark.h>

#include "corpsim/sgns.hpp"
#include "synthetic.hpp"

using namespace corpsim;

static void BM_TrainOneEpoch(benchmark::State& state) {
  const testing::Source src(testing::make_lexicon(2000), {});
  const auto tokens = testing::Register{{&src}, {1.0}}.generate(100000, 1);
  TrainParams p;
  p.dim = static_cast<std::size_t>(state.range(0));
  p.negatives = static_cast<std::size_t>(state.range(1));
  p.epochs = 1;
  p.buckets = 20000;
  p.subsample = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(train_embeddings(tokens, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tokens.size()));
}
BENCHMARK(BM_TrainOneEpoch)->Args({32, 5})->Args({100, 50})->Unit(benchmark::kMillisecond);
