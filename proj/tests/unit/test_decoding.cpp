#include <cmath>
#include <limits>

#include "cmpgen/decoding.hpp"
#include "cmpgen/error.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "table_lm.hpp"

using namespace cmpgen;
using cmpgen::testing::make_table_lm;
using cmpgen::testing::TableLM;

namespace {

// Vocabulary ids: a=3, b=4, c=5.
constexpr TokenId A = 3, B = 4, C = 5;

const std::vector<std::vector<double>> kOrthonormal = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

TableLM abc_lm() { return make_table_lm({"a", "b", "c"}, {0.5, 0.3, 0.2}, kOrthonormal); }

DecodeConfig agg(double alpha, double beta, std::size_t k) {
  DecodeConfig cfg;
  cfg.mode = DecodeMode::agg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.k = k;
  return cfg;
}

const ScoredCandidate& row(const StepTrace& t, TokenId id) {
  for (const auto& r : t.candidates)
    if (r.token == id) return r;
  FAIL("candidate not in trace");
  return t.candidates.front();
}

// Random model: distribution depends on the last prefix token.
TableLM random_lm(Rng& rng, std::size_t words, std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < words; ++i) names.push_back("w" + std::to_string(i));
  Vocabulary vocab(names);
  const std::size_t v = vocab.size();
  std::vector<Distribution> rows(v, Distribution(v, 0.0));
  for (auto& r : rows) {
    double total = 0.0;
    for (std::size_t i = 1; i < v; ++i) {
      // Coarse values so that ties actually occur.
      r[i] = static_cast<double>(rng.below(5));
      total += r[i];
    }
    if (total == 0.0) {
      r[1] = 1.0;
      total = 1.0;
    }
    for (auto& x : r) x /= total;
  }
  std::vector<std::vector<double>> vectors(v, std::vector<double>(dim, 0.0));
  for (std::size_t i = 1; i < v; ++i)
    for (auto& x : vectors[i]) x = static_cast<double>(rng.below(5)) - 2.0;
  return TableLM(
      vocab,
      [rows](std::span<const TokenId> prefix) {
        return rows[prefix.empty() ? 0 : prefix.back()];
      },
      vectors);
}

}  // namespace

TEST_CASE("DecodeConfig validation") {
  CHECK_NOTHROW(DecodeConfig{}.validate());
  auto bad = agg(0.6, 0.5, 3);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(agg(-0.1, 0.0, 3).validate(), ConfigError);
  CHECK_THROWS_AS(agg(0.1, 0.1, 0).validate(), ConfigError);
  DecodeConfig len;
  len.max_len = 0;
  CHECK_THROWS_AS(len.validate(), ConfigError);
  DecodeConfig bow;
  bow.bow_weight = -1;
  CHECK_THROWS_AS(bow.validate(), ConfigError);
  CHECK(parse_mode("bow_rescore") == DecodeMode::bow_rescore);
  CHECK(mode_name(DecodeMode::contrastive) == "contrastive");
  CHECK_THROWS_AS(parse_mode("beam"), ConfigError);
}

TEST_CASE("candidate_set") {
  const std::vector<double> dist = {0, 0, 0, 0.5, 0.3, 0.2};
  const std::vector<TokenId> c_only = {C};
  CHECK(candidate_set(dist, 2, c_only) == std::vector<TokenId>{A, B, C});
  const std::vector<TokenId> a_only = {A};
  CHECK(candidate_set(dist, 2, a_only) == candidate_set(dist, 2, {}));
  CHECK(candidate_set(dist, 6, {}) == std::vector<TokenId>{1, 2, A, B, C});
  CHECK(candidate_set(dist, 100, {}) == std::vector<TokenId>{1, 2, A, B, C});
  // Ties go to the lower id.
  const std::vector<double> tied = {0, 0.25, 0, 0.25, 0.25, 0.25};
  CHECK(candidate_set(tied, 2, {}) == std::vector<TokenId>{1, A});
}

TEST_CASE("resolve_aspects") {
  const Vocabulary v({"keys", "sound", "piano"});
  const auto r = resolve_aspects({"sound", "piano keys", "hiss", "<s>", "sound", "keys"}, v);
  CHECK(r.ids == std::vector<TokenId>{v.id("sound"), v.id("keys")});
  CHECK(r.skipped == std::vector<std::string>{"hiss", "<s>"});
}

TEST_CASE("degeneration_penalty") {
  const auto lm = abc_lm();
  const std::vector<TokenId> has_c = {A, C};
  CHECK(degeneration_penalty(lm, C, has_c) == 1.0);
  CHECK(degeneration_penalty(lm, C, {}) == 0.0);

  // Vectors with s(v, x1) = 0.2 and s(v, x2) = 0.8.
  const auto lm2 = make_table_lm({"v", "x1", "x2"}, {0.4, 0.3, 0.3},
                                 {{1, 0}, {0.2, std::sqrt(1 - 0.04)}, {0.8, 0.6}});
  const std::vector<TokenId> prefix = {4, 5};
  CHECK(degeneration_penalty(lm2, 3, prefix) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("agg_step worked examples") {
  const auto lm = abc_lm();
  const std::vector<TokenId> aspects = {C};

  const auto t1 = agg_step(lm, {}, aspects, agg(0.0, 0.5, 3));
  CHECK(row(t1, A).total == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(row(t1, B).total == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(row(t1, C).total == doctest::Approx(0.60).epsilon(1e-14));
  CHECK(t1.selected == C);

  const std::vector<TokenId> prefix = {C};
  const auto t2 = agg_step(lm, prefix, aspects, agg(0.5, 0.4, 3));
  CHECK(row(t2, C).total == doctest::Approx(-0.08).epsilon(1e-14));
  CHECK(row(t2, A).total == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(row(t2, C).degeneration == 1.0);
  CHECK(row(t2, C).aspect == 1.0);
  CHECK(t2.selected == A);

  const auto greedy = agg_step(lm, {}, aspects, agg(0.0, 0.0, 3));
  CHECK(greedy.selected == A);
}

TEST_CASE("agg_step matches the scoring-rule oracle on random instances") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto lm = random_lm(rng, 2 + rng.below(7), 1 + rng.below(3));
    const std::size_t v = lm.vocabulary().size();
    std::vector<TokenId> prefix, aspects;
    for (std::size_t i = 0; i < rng.below(4); ++i) prefix.push_back(static_cast<TokenId>(3 + rng.below(v - 3)));
    for (std::size_t i = 0; i < rng.below(3); ++i) {
      const auto a = static_cast<TokenId>(3 + rng.below(v - 3));
      if (std::find(aspects.begin(), aspects.end(), a) == aspects.end()) aspects.push_back(a);
    }
    const double alpha = rng.below(4) * 0.25 * 0.5, beta = rng.below(4) * 0.25 * 0.5;
    const std::size_t k = 1 + rng.below(v);

    const auto trace = agg_step(lm, prefix, aspects, agg(alpha, beta, k));
    std::vector<std::vector<double>> vectors;
    for (TokenId i = 0; i < v; ++i) {
      const auto h = lm.representation(prefix, i);
      vectors.emplace_back(h.begin(), h.end());
    }
    const auto expected = oracle::aspect_guided_argmax(
        lm.next_token_distribution(prefix), vectors,
        std::vector<std::size_t>(prefix.begin(), prefix.end()),
        std::vector<std::size_t>(aspects.begin(), aspects.end()), alpha, beta, k);
    CHECK(trace.selected == expected.token);
    REQUIRE(trace.candidates.size() == expected.scores.size());
    for (std::size_t i = 0; i < expected.scores.size(); ++i) {
      CHECK(trace.candidates[i].token == expected.scores[i].first);
      CHECK(std::abs(trace.candidates[i].total - expected.scores[i].second) <= 1e-12);
    }
    // Score decomposition and soundness.
    bool selected_in_set = false;
    for (const auto& r : trace.candidates) {
      CHECK(std::abs(r.total - agg_total(alpha, beta, r.confidence, r.degeneration, r.aspect)) <=
            1e-12);
      selected_in_set |= r.token == trace.selected;
    }
    CHECK(selected_in_set);
  }
}

TEST_CASE("greedy reduction holds for every k") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto lm = random_lm(rng, 2 + rng.below(8), 2);
    const std::size_t v = lm.vocabulary().size();
    std::vector<TokenId> prefix;
    for (std::size_t i = 0; i < rng.below(4); ++i) prefix.push_back(static_cast<TokenId>(1 + rng.below(v - 1)));
    const std::vector<TokenId> aspects = {static_cast<TokenId>(3 + rng.below(v - 3))};
    const std::size_t k = 1 + rng.below(v);

    const auto dist = lm.next_token_distribution(prefix);
    const auto cands = candidate_set(dist, k, aspects);
    TokenId restricted = cands.front();
    for (TokenId c : cands)
      if (dist[c] > dist[restricted]) restricted = c;
    CHECK(agg_step(lm, prefix, aspects, agg(0, 0, k)).selected == restricted);
    CHECK(agg_step(lm, prefix, aspects, agg(0, 0, v)).selected ==
          greedy_step(lm, prefix).selected);
  }
}

TEST_CASE("higher aspect similarity wins between otherwise equal candidates") {
  // p and q have equal probability and zero degeneration; p is closer to the aspect.
  const auto lm = make_table_lm({"p", "q", "asp", "x"}, {0.3, 0.3, 0.1, 0.3},
                                {{0.9, 0.1, 0}, {0.5, 0.5, 0}, {1, 0, 0}, {0, 0, 1}});
  const std::vector<TokenId> aspects = {5};
  const std::vector<TokenId> prefix = {6};
  for (double beta : {0.01, 0.1, 0.3, 0.5}) {
    const auto t = agg_step(lm, prefix, aspects, agg(0.0, beta, 2));
    CHECK(t.selected != 4);
    CHECK(row(t, 3).total > row(t, 4).total);
  }
}

TEST_CASE("contrastive and greedy steps") {
  const auto lm = abc_lm();
  DecodeConfig cfg = agg(0.5, 0.3, 3);
  const auto c = contrastive_step(lm, {}, cfg);
  for (const auto& r : c.candidates) CHECK(r.aspect == 0.0);
  CHECK(c.candidates.size() == 3);
  const std::vector<TokenId> prefix = {A};
  CHECK(contrastive_step(lm, prefix, cfg).selected == B);
  CHECK(greedy_step(lm, prefix).selected == A);
}

TEST_CASE("bow scoring") {
  const std::vector<double> dist = {0, 0, 0, 0.5, 0.3, 0.2};
  const std::vector<TokenId> bc = {B, C};
  CHECK(bow_attribute_score(dist, bc) == doctest::Approx(-0.6931).epsilon(1e-4));
  CHECK(bow_attribute_score(dist, bc) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  const std::vector<TokenId> all = {0, 1, 2, A, B, C};
  CHECK(bow_attribute_score(dist, all) == doctest::Approx(0.0));
  const std::vector<TokenId> eos = {1};
  CHECK(bow_attribute_score(dist, eos) == -std::numeric_limits<double>::infinity());
  CHECK(bow_attribute_score(dist, {}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("bow_rescore_step") {
  const auto lm = make_table_lm({"a", "c", "d"}, {0.5, 0.4, 0.1}, kOrthonormal);
  const std::vector<TokenId> c = {4};
  DecodeConfig cfg;
  cfg.mode = DecodeMode::bow_rescore;
  cfg.k = 3;
  const double threshold = std::log(0.5 / 0.4);
  CHECK(threshold == doctest::Approx(0.2231).epsilon(1e-4));

  cfg.bow_weight = 0.0;
  CHECK(bow_rescore_step(lm, {}, c, cfg).selected == 3);
  cfg.bow_weight = threshold - 1e-6;
  CHECK(bow_rescore_step(lm, {}, c, cfg).selected == 3);
  cfg.bow_weight = threshold + 1e-6;
  CHECK(bow_rescore_step(lm, {}, c, cfg).selected == 4);
  cfg.bow_weight = 5.0;
  CHECK(bow_rescore_step(lm, {}, {}, cfg).selected == 3);
  const auto t = bow_rescore_step(lm, {}, c, cfg);
  CHECK(row(t, 4).aspect == 1.0);
  CHECK(row(t, 4).total == doctest::Approx(std::log(0.4) + 5.0));
}

TEST_CASE("generate") {
  SUBCASE("EOS-certain model yields nothing") {
    const auto lm = make_table_lm({"a"}, {0.0}, {{1}}, 1.0);
    const auto r = generate(lm, {}, {}, DecodeConfig{});
    CHECK(r.tokens.empty());
    CHECK(r.stopped_at_eos);
  }
  SUBCASE("max_len bounds the output and the trace") {
    const auto lm = abc_lm();
    DecodeConfig cfg = agg(0.0, 0.0, 3);
    cfg.max_len = 7;
    const auto r = generate(lm, {"b"}, {"c"}, cfg);
    CHECK(r.tokens.size() == 7);
    CHECK(r.steps.size() == 7);
    CHECK_FALSE(r.stopped_at_eos);
    CHECK(r.tokens == TokenSequence(7, "a"));
  }
  SUBCASE("out-of-vocabulary aspects are reported") {
    const auto r = generate(abc_lm(), {}, {"zither", "c"}, agg(0.2, 0.3, 2));
    CHECK(r.skipped_aspects == std::vector<std::string>{"zither"});
  }
  SUBCASE("anti-repetition after selecting an aspect") {
    const auto lm = abc_lm();
    auto cfg = agg(0.5, 0.4, 3);
    cfg.max_len = 2;
    const std::vector<TokenId> aspects = {C};
    const auto first = agg_step(lm, {}, aspects, cfg);
    REQUIRE(first.selected == C);
    const auto r = generate(lm, {}, {"c"}, cfg);
    REQUIRE(r.ids.size() == 2);
    CHECK(r.ids[0] == C);
    CHECK(r.ids[1] != C);
  }
}

TEST_CASE("generate: greedy mode equals agg with zero weights") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lm = random_lm(rng, 3 + rng.below(8), 2);
    const std::size_t v = lm.vocabulary().size();
    DecodeConfig greedy;
    greedy.mode = DecodeMode::greedy;
    greedy.max_len = 20;
    auto zero = agg(0.0, 0.0, v);
    zero.max_len = 20;
    const TokenSequence prompt = {"w" + std::to_string(rng.below(v - 3))};
    CHECK(generate(lm, prompt, {"w0"}, greedy).ids == generate(lm, prompt, {"w0"}, zero).ids);
  }
}

TEST_CASE("generate is deterministic, stochastic mode included") {
  Rng rng(37);
  const auto lm = random_lm(rng, 8, 3);
  for (DecodeMode mode : {DecodeMode::greedy, DecodeMode::stochastic, DecodeMode::contrastive,
                          DecodeMode::agg, DecodeMode::bow_rescore}) {
    DecodeConfig cfg;
    cfg.mode = mode;
    cfg.k = 4;
    cfg.max_len = 30;
    cfg.seed = 99;
    const auto a = generate(lm, {"w1"}, {"w2", "w3"}, cfg);
    const auto b = generate(lm, {"w1"}, {"w2", "w3"}, cfg);
    CHECK(a.ids == b.ids);
    CHECK(a.steps.size() == a.ids.size());
  }
}

TEST_CASE("stochastic_step samples only from the top-k") {
  const auto lm = abc_lm();
  DecodeConfig cfg;
  cfg.mode = DecodeMode::stochastic;
  cfg.k = 2;
  Rng rng(5);
  std::size_t count_a = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto t = stochastic_step(lm, {}, cfg, rng);
    CHECK((t.selected == A || t.selected == B));
    count_a += t.selected == A;
  }
  // Renormalized top-2: P(a) = 0.5 / 0.8.
  CHECK(static_cast<double>(count_a) / n == doctest::Approx(0.625).epsilon(0.05));
}
