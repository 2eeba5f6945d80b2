#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cmpgen/metrics.hpp"
#include "cmpgen/random.hpp"

using namespace cmpgen;

namespace {

std::vector<TokenSequence> random_texts(std::size_t count, std::size_t len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenSequence> out(count);
  for (auto& t : out)
    for (std::size_t i = 0; i < len; ++i) t.push_back("w" + std::to_string(rng.below(300)));
  return out;
}

void BM_Distinct(benchmark::State& state) {
  const auto gens = random_texts(static_cast<std::size_t>(state.range(0)), 30, 1);
  for (auto _ : state) benchmark::DoNotOptimize(distinct_n(gens, 2));
}
BENCHMARK(BM_Distinct)->Arg(100)->Arg(1000);

void BM_Bleu2(benchmark::State& state) {
  const auto a = random_texts(1, static_cast<std::size_t>(state.range(0)), 2)[0];
  const auto b = random_texts(1, static_cast<std::size_t>(state.range(0)), 3)[0];
  for (auto _ : state) benchmark::DoNotOptimize(bleu_n(a, b, 2));
}
BENCHMARK(BM_Bleu2)->Arg(30)->Arg(300);

void BM_RougeL(benchmark::State& state) {
  const auto a = random_texts(1, static_cast<std::size_t>(state.range(0)), 4)[0];
  const auto b = random_texts(1, static_cast<std::size_t>(state.range(0)), 5)[0];
  for (auto _ : state) benchmark::DoNotOptimize(rouge_l_precision(a, b));
}
BENCHMARK(BM_RougeL)->Arg(30)->Arg(300);

}  // namespace
