#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cmpgen/decoding.hpp"
#include "cmpgen/lm.hpp"
#include "cmpgen/random.hpp"

using namespace cmpgen;

namespace {

std::vector<TokenSequence> random_corpus(std::size_t words, std::size_t sentences,
                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenSequence> corpus;
  for (std::size_t s = 0; s < sentences; ++s) {
    TokenSequence t;
    const std::size_t len = 5 + rng.below(15);
    for (std::size_t i = 0; i < len; ++i) {
      // Skewed toward low ranks so the model has structure.
      const double u = rng.uniform();
      t.push_back("w" + std::to_string(static_cast<std::size_t>(u * u * static_cast<double>(words))));
    }
    corpus.push_back(std::move(t));
  }
  return corpus;
}

struct Model {
  std::shared_ptr<const ReferenceLM> lm;
  std::vector<TokenId> prefix;
  std::vector<TokenId> aspects;
};

const Model& model(std::size_t words) {
  static std::map<std::size_t, Model> cache;
  auto it = cache.find(words);
  if (it != cache.end()) return it->second;
  const auto corpus = random_corpus(words, 4 * words, 7);
  auto ngram = std::make_shared<const NGramLM>(NGramLM::train(corpus, 3, 0.75));
  auto emb = std::make_shared<const EmbeddingTable>(
      train_embeddings(corpus, ngram->vocabulary(), 16, 3));
  Model m;
  m.lm = std::make_shared<const ReferenceLM>(ngram, emb);
  m.prefix = m.lm->vocabulary().encode(TokenSequence(corpus[0].begin(), corpus[0].begin() + 5));
  m.aspects = resolve_aspects({"w1", "w3", "w5"}, m.lm->vocabulary()).ids;
  return cache.emplace(words, std::move(m)).first->second;
}

void BM_GreedyStep(benchmark::State& state) {
  const auto& m = model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(greedy_step(*m.lm, m.prefix));
}
BENCHMARK(BM_GreedyStep)->Arg(200)->Arg(2000);

void BM_AggStep(benchmark::State& state) {
  const auto& m = model(2000);
  DecodeConfig cfg;
  cfg.k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(agg_step(*m.lm, m.prefix, m.aspects, cfg));
}
BENCHMARK(BM_AggStep)->Arg(5)->Arg(10)->Arg(50);

void BM_BowRescoreStep(benchmark::State& state) {
  const auto& m = model(2000);
  DecodeConfig cfg;
  cfg.mode = DecodeMode::bow_rescore;
  cfg.bow_weight = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(bow_rescore_step(*m.lm, m.prefix, m.aspects, cfg));
}
BENCHMARK(BM_BowRescoreStep);

void BM_Generate(benchmark::State& state) {
  const auto& m = model(2000);
  DecodeConfig cfg;
  cfg.mode = DecodeMode::agg;
  cfg.max_len = static_cast<std::size_t>(state.range(0));
  const TokenSequence prompt = {"w0", "w1"};
  for (auto _ : state) benchmark::DoNotOptimize(generate(*m.lm, prompt, {"w1", "w3"}, cfg));
}
BENCHMARK(BM_Generate)->Arg(20)->Arg(40);

void BM_TrainNGram(benchmark::State& state) {
  const auto corpus = random_corpus(static_cast<std::size_t>(state.range(0)), 2000, 9);
  for (auto _ : state) benchmark::DoNotOptimize(NGramLM::train(corpus, 3, 0.75));
}
BENCHMARK(BM_TrainNGram)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
