#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmpgen/lm.hpp"
#include "cmpgen/random.hpp"

namespace cmpgen {

enum class DecodeMode { greedy, stochastic, contrastive, agg, bow_rescore };

std::string_view mode_name(DecodeMode mode);
DecodeMode parse_mode(std::string_view name);  // throws ConfigError

struct DecodeConfig {
  DecodeMode mode = DecodeMode::agg;
  double alpha = 0.2;       // degeneration weight
  double beta = 0.3;        // aspect-encouragement weight
  std::size_t k = 10;       // top-k candidates
  double bow_weight = 1.0;  // bow_rescore only
  std::size_t max_len = 350;
  std::uint64_t seed = 0;   // stochastic only

  // alpha, beta in [0, 1], alpha + beta <= 1, k >= 1, max_len >= 1,
  // bow_weight >= 0. Throws ConfigError.
  void validate() const;
};

// One scored candidate. For agg and contrastive,
// total = (1 - alpha - beta) * confidence - alpha * degeneration + beta * aspect.
// For bow_rescore, aspect is the 0/1 membership indicator and
// total = log(confidence) + bow_weight * aspect. For greedy and stochastic,
// total is the (renormalized) probability.
struct ScoredCandidate {
  TokenId token = 0;
  double confidence = 0.0;
  double degeneration = 0.0;
  double aspect = 0.0;
  double total = 0.0;
};

// Step totals closer than this to the best are treated as tied, so rounding in
// the similarity terms cannot break a tie toward a higher id.
inline constexpr double kTieTolerance = 1e-12;

struct StepTrace {
  TokenId selected = 0;
  std::vector<ScoredCandidate> candidates;  // ascending token id
};

struct GenerationResult {
  std::vector<TokenId> ids;
  TokenSequence tokens;
  std::vector<StepTrace> steps;  // one per emitted token
  std::vector<std::string> skipped_aspects;  // out-of-vocabulary terms
  bool stopped_at_eos = false;
};

// Aspect terms mapped to decoding tokens: a phrase is represented by its last
// token. Terms whose head is not in the vocabulary (or is reserved) are
// reported in `skipped`. Ids are unique, in first-seen order.
struct AspectTokens {
  std::vector<TokenId> ids;
  std::vector<std::string> skipped;
};
AspectTokens resolve_aspects(const std::vector<std::string>& terms, const Vocabulary& vocab);

// Top-k ids by probability (ties to the lower id) united with `aspects`,
// returned in ascending id order. BOS is never a candidate.
std::vector<TokenId> candidate_set(std::span<const double> dist, std::size_t k,
                                   std::span<const TokenId> aspects);

// max_j s(h_v, h_{x_j}) over the prefix; 0.0 for an empty prefix.
double degeneration_penalty(const LanguageModel& lm, TokenId candidate,
                            std::span<const TokenId> prefix);

// max_i s(h_v, h_{a_i}); 0.0 when there are no aspects.
double aspect_encouragement(const LanguageModel& lm, TokenId candidate,
                            std::span<const TokenId> prefix,
                            std::span<const TokenId> aspects);

double agg_total(double alpha, double beta, double confidence, double degeneration,
                 double aspect);

// Aspect-guided step: argmax over candidate_set of agg_total, ties to the
// lower id.
StepTrace agg_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                   std::span<const TokenId> aspects, const DecodeConfig& cfg);
// agg_step with beta = 0 over the plain top-k set.
StepTrace contrastive_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                           const DecodeConfig& cfg);
StepTrace greedy_step(const LanguageModel& lm, std::span<const TokenId> prefix);
// Draw from the renormalized top-k distribution.
StepTrace stochastic_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                          const DecodeConfig& cfg, Rng& rng);

// log of the probability mass on the aspect tokens; -infinity when that mass
// is zero or no aspect is given.
double bow_attribute_score(std::span<const double> dist, std::span<const TokenId> aspects);

// argmax over top-k of log p(v) + bow_weight * [v in aspects], ties to the
// lower id.
StepTrace bow_rescore_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                           std::span<const TokenId> aspects, const DecodeConfig& cfg);

// Decodes from `prompt` (decoder-side prefix tokens) until EOS or max_len
// emitted tokens. The prompt is not part of the result.
GenerationResult generate(const LanguageModel& lm, const TokenSequence& prompt,
                          const std::vector<std::string>& aspect_terms,
                          const DecodeConfig& cfg);

}  // namespace cmpgen
