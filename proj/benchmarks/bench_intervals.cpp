#include <benchmark/benchmark.h>

#include <variant>

#include "roml/intervals.hpp"
#include "roml/params.hpp"

using namespace roml;

static void BM_sample_and_stats(benchmark::State& state) {
  const Params p = derive_params(1'000'000, 3, Ratio{1, 2}, Ratio{1, 1000},
                                 Ratio{1, 200}, 100);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto drawn = sample_intervals(p, seed++);
    if (std::holds_alternative<SortedIntervals>(drawn)) {
      benchmark::DoNotOptimize(intersection_stats(std::get<SortedIntervals>(drawn)));
    }
  }
}
BENCHMARK(BM_sample_and_stats);

static void BM_decompose(benchmark::State& state) {
  const Params p = derive_params(1'000'000, 3, Ratio{1, 2}, Ratio{1, 1000},
                                 Ratio{1, 200}, 100);
  SortedIntervals iv;
  for (std::uint64_t seed = 0;; ++seed) {
    auto drawn = sample_intervals(p, seed);
    if (std::holds_alternative<SortedIntervals>(drawn)) {
      auto cand = std::get<SortedIntervals>(std::move(drawn));
      if (!intersection_stats(cand).triple_exists) {
        iv = std::move(cand);
        break;
      }
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose(iv));
  }
}
BENCHMARK(BM_decompose);

static void BM_lemma1_trial_batch(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_lemma1(1'000'000, 3, Ratio{1, 20}, 100, 1));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_lemma1_trial_batch);
