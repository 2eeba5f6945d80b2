#include <algorithm>
#include <cmath>
#include <set>

#include "cmpgen/error.hpp"
#include "cmpgen/lm.hpp"

namespace cmpgen {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  tokens_.reserve(words.size() + 3);
  tokens_.emplace_back(kBosToken);
  tokens_.emplace_back(kEosToken);
  tokens_.emplace_back(kUnkToken);
  tokens_.insert(tokens_.end(), words.begin(), words.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw ConfigError("duplicate vocabulary token: " + tokens_[i]);
  }
}

Vocabulary Vocabulary::build(const std::vector<TokenSequence>& corpus) {
  std::set<std::string> words;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence)
      if (token != kBosToken && token != kEosToken && token != kUnkToken) words.insert(token);
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const { return find(token).value_or(kUnk); }

std::vector<TokenId> Vocabulary::encode(const TokenSequence& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

TokenSequence Vocabulary::decode(std::span<const TokenId> ids) const {
  TokenSequence out;
  out.reserve(ids.size());
  for (TokenId i : ids) out.push_back(token(i));
  return out;
}

bool is_valid_distribution(std::span<const double> dist, double tolerance) {
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < 0.0) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tolerance;
}

Distribution next_token_distribution(const LanguageModel& lm, const TokenSequence& prefix) {
  const auto ids = lm.vocabulary().encode(prefix);
  return lm.next_token_distribution(ids);
}

ReferenceLM::ReferenceLM(std::shared_ptr<const NGramLM> ngram,
                         std::shared_ptr<const EmbeddingTable> embeddings)
    : ngram_(std::move(ngram)), embeddings_(std::move(embeddings)) {
  if (!ngram_ || !embeddings_) throw ConfigError("ReferenceLM needs both an n-gram model and embeddings");
  if (!(ngram_->vocabulary() == embeddings_->vocabulary()))
    throw ConfigError("n-gram model and embeddings use different vocabularies");
}

Distribution ReferenceLM::next_token_distribution(std::span<const TokenId> prefix) const {
  return ngram_->distribution(prefix);
}

std::span<const double> ReferenceLM::representation(std::span<const TokenId>,
                                                    TokenId token) const {
  return embeddings_->vector(token);
}

SourceMixtureLM::SourceMixtureLM(const LanguageModel& base, std::span<const TokenId> source,
                                 double weight)
    : base_(base), source_(base.vocabulary().size(), 0.0), weight_(weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("source weight must be in [0, 1]");
  std::size_t counted = 0;
  for (TokenId t : source) {
    if (t == Vocabulary::kBos || t == Vocabulary::kEos || t == Vocabulary::kUnk) continue;
    if (t >= source_.size()) throw ConfigError("source token id out of range");
    source_[t] += 1.0;
    ++counted;
  }
  if (counted == 0) {
    weight_ = 0.0;
    return;
  }
  for (double& q : source_) q /= static_cast<double>(counted);
}

Distribution SourceMixtureLM::next_token_distribution(std::span<const TokenId> prefix) const {
  Distribution p = base_.next_token_distribution(prefix);
  if (weight_ == 0.0) return p;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - weight_) * p[i] + weight_ * source_[i];
  return p;
}

}  // namespace cmpgen
