#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "cmpgen/error.hpp"
#include "cmpgen/lm.hpp"
#include "cmpgen/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cmpgen;

namespace {

std::vector<TokenSequence> repeat(const TokenSequence& s, int n) {
  return std::vector<TokenSequence>(static_cast<std::size_t>(n), s);
}

std::vector<TokenSequence> random_corpus(Rng& rng, std::size_t sentences, std::size_t types) {
  std::vector<TokenSequence> corpus;
  for (std::size_t s = 0; s < sentences; ++s) {
    TokenSequence t;
    for (std::size_t i = 0; i < 1 + rng.below(8); ++i) t.push_back("w" + std::to_string(rng.below(types)));
    corpus.push_back(t);
  }
  return corpus;
}

double sum(const Distribution& d) { return std::accumulate(d.begin(), d.end(), 0.0); }

}  // namespace

TEST_CASE("Vocabulary") {
  const Vocabulary v({"b", "a"});
  CHECK(v.size() == 5);
  CHECK(v.token(0) == "<s>");
  CHECK(v.token(1) == "</s>");
  CHECK(v.token(2) == "<unk>");
  CHECK(v.id("b") == 3);
  CHECK(v.id("zzz") == Vocabulary::kUnk);
  CHECK_FALSE(v.find("zzz").has_value());
  CHECK(v.decode(v.encode({"a", "b", "q"})) == TokenSequence{"a", "b", "<unk>"});
  CHECK_THROWS_AS(Vocabulary({"a", "a"}), ConfigError);
  CHECK_THROWS_AS(Vocabulary({"<s>"}), ConfigError);
  CHECK(Vocabulary::build({{"z", "y"}, {"y", "x"}}).tokens() ==
        std::vector<std::string>{"<s>", "</s>", "<unk>", "x", "y", "z"});
  for (TokenId i = 0; i < v.size(); ++i) CHECK(v.id(v.token(i)) == i);
}

TEST_CASE("bigram model on a b x10 matches the discounted-count oracle") {
  const double d = 0.5;
  const auto lm = NGramLM::train(repeat({"a", "b"}, 10), 2, d);
  const auto& v = lm.vocabulary();
  const TokenId a = v.id("a"), b = v.id("b");

  // Unigram level: a, b, </s> seen 10 times each out of 30; 3 types; 4 non-BOS tokens.
  const double uni_backoff = d * 3 / 30.0;
  const double p_uni_seen = (10 - d) / 30.0 + uni_backoff / 4;
  const double p_uni_unk = uni_backoff / 4;
  // Context [a]: b seen 10 times, one type.
  const double ctx_backoff = d * 1 / 10.0;
  const double p_b_a = (10 - d) / 10.0 + ctx_backoff * p_uni_seen;
  const double p_eos_a = ctx_backoff * p_uni_seen;

  const std::vector<TokenId> prefix = {a};
  const auto p = lm.distribution(prefix);
  CHECK(p[b] == doctest::Approx(p_b_a).epsilon(1e-12));
  CHECK(p[Vocabulary::kEos] == doctest::Approx(p_eos_a).epsilon(1e-12));
  CHECK(p[Vocabulary::kUnk] == doctest::Approx(ctx_backoff * p_uni_unk).epsilon(1e-12));
  CHECK(p[Vocabulary::kBos] == 0.0);
  CHECK(p[b] > p[Vocabulary::kEos]);
  CHECK(std::max_element(p.begin(), p.end()) - p.begin() == b);
  CHECK(sum(p) == doctest::Approx(1.0).epsilon(1e-12));

  // Empty prefix conditions on BOS, which was always followed by a.
  const auto start = lm.distribution({});
  CHECK(std::max_element(start.begin(), start.end()) - start.begin() == a);
}

TEST_CASE("unigram model ignores the prefix") {
  const auto lm = NGramLM::train({{"a", "b", "c"}, {"c", "c"}}, 1, 0.4);
  const std::vector<TokenId> p1 = {3, 4}, p2 = {5};
  CHECK(lm.distribution(p1) == lm.distribution(p2));
  CHECK(lm.distribution(p1) == lm.distribution({}));
}

TEST_CASE("n-gram training is deterministic and validates input") {
  Rng rng(1);
  const auto corpus = random_corpus(rng, 30, 12);
  CHECK(NGramLM::train(corpus, 3, 0.7) == NGramLM::train(corpus, 3, 0.7));
  CHECK_THROWS_AS(NGramLM::train({}, 2, 0.5), ConfigError);
  CHECK_THROWS_AS(NGramLM::train(corpus, 0, 0.5), ConfigError);
  CHECK_THROWS_AS(NGramLM::train(corpus, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(NGramLM::train(corpus, 2, 1.0), ConfigError);
}

TEST_CASE("small discount reproduces maximum-likelihood frequencies") {
  const auto lm = NGramLM::train({{"a", "b"}, {"a", "a"}}, 2, 1e-9);
  const auto& v = lm.vocabulary();
  const std::vector<TokenId> prefix = {v.id("a")};
  const auto p = lm.distribution(prefix);
  CHECK(p[v.id("a")] == doctest::Approx(1.0 / 3).epsilon(1e-7));
  CHECK(p[v.id("b")] == doctest::Approx(1.0 / 3).epsilon(1e-7));
  CHECK(p[Vocabulary::kEos] == doctest::Approx(1.0 / 3).epsilon(1e-7));
}

TEST_CASE("every n-gram distribution is valid") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = random_corpus(rng, 5 + rng.below(30), 3 + rng.below(20));
    const int order = 1 + static_cast<int>(rng.below(4));
    const auto lm = NGramLM::train(corpus, order, 0.1 + 0.8 * rng.uniform());
    for (int q = 0; q < 50; ++q) {
      std::vector<TokenId> prefix;
      for (std::size_t i = 0; i < rng.below(6); ++i)
        prefix.push_back(static_cast<TokenId>(rng.below(lm.vocabulary().size() + 2)));
      const auto p = lm.distribution(prefix);
      CHECK(is_valid_distribution(p));
      CHECK(p[Vocabulary::kBos] == 0.0);
    }
  }
}

TEST_CASE("is_valid_distribution") {
  CHECK(is_valid_distribution(std::vector<double>{0.25, 0.75}));
  CHECK_FALSE(is_valid_distribution(std::vector<double>{0.5, 0.6}));
  CHECK_FALSE(is_valid_distribution(std::vector<double>{-0.1, 1.1}));
  CHECK_FALSE(is_valid_distribution(std::vector<double>{NAN, 1.0}));
  CHECK_FALSE(is_valid_distribution(std::vector<double>{}));
}

TEST_CASE("n-gram persistence round trip") {
  Rng rng(3);
  const auto lm = NGramLM::train(random_corpus(rng, 20, 10), 3, 0.6);
  const auto path = std::filesystem::temp_directory_path() / "cmpgen_ngram.json";
  lm.save(path);
  const auto back = NGramLM::load(path);
  CHECK(back == lm);
  const std::vector<TokenId> prefix = {3, 4};
  CHECK(back.distribution(prefix) == lm.distribution(prefix));
  CHECK_THROWS_AS(NGramLM::from_json(R"({"format": "nope"})"), ConfigError);
  CHECK_THROWS_AS(NGramLM::from_json("not json"), ConfigError);
  CHECK_THROWS_AS(NGramLM::load("/nonexistent/lm.json"), IoError);
}

TEST_CASE("cosine_similarity") {
  const std::vector<double> h = {0.3, -1.7, 2.2};
  CHECK(cosine_similarity(h, h) == 1.0);
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{1, 1}) ==
        doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{1}, std::vector<double>{1, 2}),
                  ConfigError);
}

TEST_CASE("cosine_similarity properties") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<double> u(n), v(n);
    for (auto& x : u) x = rng.uniform() * 4 - 2;
    for (auto& x : v) x = rng.uniform() * 4 - 2;
    const double s = cosine_similarity(u, v);
    CHECK(s == doctest::Approx(oracle::cosine(u, v)).epsilon(1e-12));
    CHECK(s == cosine_similarity(v, u));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    const double c = 0.01 + 10 * rng.uniform();
    auto cu = u;
    for (auto& x : cu) x *= c;
    CHECK(cosine_similarity(cu, v) == doctest::Approx(s).epsilon(1e-12));
    CHECK(cosine_similarity(u, u) == 1.0);
  }
}

TEST_CASE("embeddings place co-occurring tokens closer") {
  // x and y share the neighbor c; z and w share d; the two groups never meet.
  std::vector<TokenSequence> corpus;
  for (int i = 0; i < 5; ++i) {
    corpus.push_back({"x", "y", "c"});
    corpus.push_back({"z", "w", "d"});
  }
  const auto table = train_embeddings(corpus, 6, 2);
  const auto& v = table.vocabulary();

  // Hand-built PPMI rows over (c, d, w, x, y, z): each group is a triangle of
  // equal counts, so every nonzero entry is log(5 * 60 / (10 * 10)) = log 3.
  const double e = std::log(3.0);
  const std::vector<double> ppmi_x = {e, 0, 0, 0, e, 0}, ppmi_y = {e, 0, 0, e, 0, 0},
                            ppmi_z = {0, e, e, 0, 0, 0};
  CHECK(oracle::cosine(ppmi_x, ppmi_y) > oracle::cosine(ppmi_x, ppmi_z));

  const double xy = cosine_similarity(table.vector(v.id("x")), table.vector(v.id("y")));
  const double xz = cosine_similarity(table.vector(v.id("x")), table.vector(v.id("z")));
  CHECK(xy > xz);
  CHECK(xz == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("embedding degenerate cases and determinism") {
  const auto single = train_embeddings(repeat({"a", "a", "a"}, 4), 2, 2);
  for (double x : single.vector("a")) CHECK(x == 0.0);
  for (TokenId r = 0; r < 3; ++r)
    for (double x : single.vector(r)) CHECK(x == 0.0);

  Rng rng(5);
  const auto corpus = random_corpus(rng, 40, 15);
  const auto t1 = train_embeddings(corpus, 8, 3);
  CHECK(t1 == train_embeddings(corpus, 8, 3));
  for (TokenId i = 0; i < t1.vocabulary().size(); ++i)
    for (double x : t1.vector(i)) CHECK(std::isfinite(x));

  const auto vsize = Vocabulary::build(corpus).size();
  CHECK_THROWS_AS(train_embeddings(corpus, vsize + 1, 3), ConfigError);
  CHECK_THROWS_AS(train_embeddings(corpus, 0, 3), ConfigError);
  CHECK_THROWS_AS(train_embeddings(corpus, 4, 0), ConfigError);
  CHECK_THROWS_AS(train_embeddings({}, 4, 2), ConfigError);
}

TEST_CASE("embedding persistence round trip") {
  Rng rng(6);
  const auto table = train_embeddings(random_corpus(rng, 30, 10), 5, 2);
  const auto path = std::filesystem::temp_directory_path() / "cmpgen_emb.txt";
  table.save(path);
  CHECK(EmbeddingTable::load(path) == table);
  std::ofstream(path) << "garbage 1 2\n";
  CHECK_THROWS_AS(EmbeddingTable::load(path), ConfigError);
}

TEST_CASE("ReferenceLM and SourceMixtureLM") {
  Rng rng(7);
  const auto corpus = random_corpus(rng, 40, 10);
  auto ngram = std::make_shared<const NGramLM>(NGramLM::train(corpus, 2, 0.5));
  auto emb = std::make_shared<const EmbeddingTable>(
      train_embeddings(corpus, ngram->vocabulary(), 4, 2));
  const ReferenceLM ref(ngram, emb);
  const std::vector<TokenId> prefix = {3};
  CHECK(ref.next_token_distribution(prefix) == ngram->distribution(prefix));
  CHECK(ref.representation(prefix, 4).size() == 4);
  CHECK(next_token_distribution(ref, {"w1"}) ==
        ngram->distribution(std::vector<TokenId>{ngram->vocabulary().id("w1")}));

  auto other = std::make_shared<const EmbeddingTable>(train_embeddings({{"q"}}, 1, 1));
  CHECK_THROWS_AS(ReferenceLM(ngram, other), ConfigError);

  const std::vector<TokenId> source = {Vocabulary::kBos, 3, 3, 4};
  const SourceMixtureLM mix(ref, source, 0.25);
  const auto base = ref.next_token_distribution(prefix);
  const auto p = mix.next_token_distribution(prefix);
  CHECK(is_valid_distribution(p));
  CHECK(p[3] == doctest::Approx(0.75 * base[3] + 0.25 * (2.0 / 3)));
  CHECK(p[4] == doctest::Approx(0.75 * base[4] + 0.25 * (1.0 / 3)));
  CHECK(p[5] == doctest::Approx(0.75 * base[5]));

  const SourceMixtureLM empty(ref, {}, 0.5);
  CHECK(empty.next_token_distribution(prefix) == base);
  CHECK_THROWS_AS(SourceMixtureLM(ref, source, 1.5), ConfigError);
}
