#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cmpgen {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<std::string>;

// Reserved tokens occupy ids 0..2; the rest follow in the order given.
class Vocabulary {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr std::string_view kBosToken = "<s>";
  static constexpr std::string_view kEosToken = "</s>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();
  // `words` must be unique and must not contain reserved tokens.
  explicit Vocabulary(const std::vector<std::string>& words);
  // Every distinct corpus token, sorted lexicographically.
  static Vocabulary build(const std::vector<TokenSequence>& corpus);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> find(std::string_view token) const;
  TokenId id(std::string_view token) const;  // kUnk when absent

  std::vector<TokenId> encode(const TokenSequence& tokens) const;
  TokenSequence decode(std::span<const TokenId> ids) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Probability per vocabulary id.
using Distribution = std::vector<double>;

// Entries nonnegative and finite, sum within `tolerance` of 1.
bool is_valid_distribution(std::span<const double> dist, double tolerance = 1e-9);

// What a decoder needs from a language model: next-token probabilities and a
// vector representation for a token in context.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  // Decoder-side prefix, without BOS.
  virtual Distribution next_token_distribution(std::span<const TokenId> prefix) const = 0;
  // h_token given the preceding `context`. The returned span stays valid for
  // the lifetime of the model.
  virtual std::span<const double> representation(std::span<const TokenId> context,
                                                 TokenId token) const = 0;
};

Distribution next_token_distribution(const LanguageModel& lm, const TokenSequence& prefix);

// Interpolated absolute-discounting n-gram model. Probability mass freed by
// discounting at the unigram level goes uniformly to every token except BOS,
// so BOS always has probability 0 and unseen tokens stay reachable.
class NGramLM {
 public:
  // Throws ConfigError on an empty corpus, order < 1, or discount outside (0, 1).
  static NGramLM train(const std::vector<TokenSequence>& corpus, int order, double discount);
  static NGramLM train(const std::vector<TokenSequence>& corpus, Vocabulary vocabulary,
                       int order, double discount);

  int order() const { return order_; }
  double discount() const { return discount_; }
  const Vocabulary& vocabulary() const { return vocab_; }

  Distribution distribution(std::span<const TokenId> prefix) const;

  std::string to_json() const;
  static NGramLM from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static NGramLM load(const std::filesystem::path& path);

  friend bool operator==(const NGramLM&, const NGramLM&) = default;

 private:
  struct ContextCounts {
    std::size_t total = 0;
    std::map<TokenId, std::size_t> next;
    friend bool operator==(const ContextCounts&, const ContextCounts&) = default;
  };
  using Table = std::map<std::vector<TokenId>, ContextCounts>;

  NGramLM(Vocabulary vocab, int order, double discount);
  void add_sentence(const std::vector<TokenId>& ids);
  void finalize();

  Vocabulary vocab_;
  int order_ = 1;
  double discount_ = 0.5;
  std::vector<Table> tables_;  // tables_[k] has contexts of length k
  Distribution unigram_;
};

// Static token vectors; rows for tokens without co-occurrence are all zero.
class EmbeddingTable {
 public:
  EmbeddingTable(Vocabulary vocab, std::size_t dimension, std::vector<double> values);

  std::size_t dimension() const { return dim_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  std::span<const double> vector(TokenId id) const;
  std::span<const double> vector(std::string_view token) const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::vector<double> values_;  // row-major, vocab.size() x dim
};

// Positive PMI over a symmetric co-occurrence window, factorized by truncated
// SVD; row i is U_i * sqrt(S). Each singular vector is signed so that its
// largest-magnitude entry is positive. Throws ConfigError if dimension is 0 or
// exceeds the vocabulary size, or window is 0.
EmbeddingTable train_embeddings(const std::vector<TokenSequence>& corpus,
                                const Vocabulary& vocab, std::size_t dimension,
                                std::size_t window);
EmbeddingTable train_embeddings(const std::vector<TokenSequence>& corpus,
                                std::size_t dimension, std::size_t window);

// Zero vectors have similarity 0.0 with everything. Throws ConfigError on a
// dimension mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// The reference backend: n-gram probabilities plus static embeddings.
class ReferenceLM final : public LanguageModel {
 public:
  // Both parts must share one vocabulary.
  ReferenceLM(std::shared_ptr<const NGramLM> ngram,
              std::shared_ptr<const EmbeddingTable> embeddings);

  const Vocabulary& vocabulary() const override { return ngram_->vocabulary(); }
  Distribution next_token_distribution(std::span<const TokenId> prefix) const override;
  std::span<const double> representation(std::span<const TokenId> context,
                                         TokenId token) const override;

  const NGramLM& ngram() const { return *ngram_; }
  const EmbeddingTable& embeddings() const { return *embeddings_; }

 private:
  std::shared_ptr<const NGramLM> ngram_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
};

// Conditions a decoder-only model on a source text by mixing in the source's
// unigram distribution: p = (1 - w) p_base + w q_source. Reserved tokens are
// ignored in the source; an empty source leaves the base model unchanged.
class SourceMixtureLM final : public LanguageModel {
 public:
  SourceMixtureLM(const LanguageModel& base, std::span<const TokenId> source, double weight);

  const Vocabulary& vocabulary() const override { return base_.vocabulary(); }
  Distribution next_token_distribution(std::span<const TokenId> prefix) const override;
  std::span<const double> representation(std::span<const TokenId> context,
                                         TokenId token) const override {
    return base_.representation(context, token);
  }

 private:
  const LanguageModel& base_;
  Distribution source_;
  double weight_ = 0.0;
};

}  // namespace cmpgen
