#include "cmpgen/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmpgen/corpus.hpp"
#include "cmpgen/error.hpp"

namespace cmpgen {
namespace {

bool is_reserved(TokenId id) {
  return id == Vocabulary::kBos || id == Vocabulary::kEos || id == Vocabulary::kUnk;
}

// Highest total wins. Totals within kTieTolerance of the maximum are ties;
// candidates are in ascending id order so the first of them is the lowest id.
TokenId select_max(const std::vector<ScoredCandidate>& rows) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) best = std::max(best, r.total);
  for (const auto& r : rows)
    if (r.total >= best - kTieTolerance) return r.token;
  return rows.front().token;
}

std::vector<TokenId> top_k(std::span<const double> dist, std::size_t k) {
  std::vector<TokenId> ids;
  ids.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (i != Vocabulary::kBos) ids.push_back(static_cast<TokenId>(i));
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                    [&](TokenId a, TokenId b) {
                      return dist[a] != dist[b] ? dist[a] > dist[b] : a < b;
                    });
  ids.resize(k);
  return ids;
}

StepTrace score_weighted(const LanguageModel& lm, std::span<const TokenId> prefix,
                         std::span<const TokenId> aspects, double alpha, double beta,
                         std::size_t k) {
  const Distribution dist = lm.next_token_distribution(prefix);
  StepTrace trace;
  for (TokenId v : candidate_set(dist, k, aspects)) {
    ScoredCandidate row;
    row.token = v;
    row.confidence = dist[v];
    row.degeneration = degeneration_penalty(lm, v, prefix);
    row.aspect = aspect_encouragement(lm, v, prefix, aspects);
    row.total = agg_total(alpha, beta, row.confidence, row.degeneration, row.aspect);
    trace.candidates.push_back(row);
  }
  trace.selected = select_max(trace.candidates);
  return trace;
}

}  // namespace

std::string_view mode_name(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::greedy: return "greedy";
    case DecodeMode::stochastic: return "stochastic";
    case DecodeMode::contrastive: return "contrastive";
    case DecodeMode::agg: return "agg";
    case DecodeMode::bow_rescore: return "bow_rescore";
  }
  return "agg";
}

DecodeMode parse_mode(std::string_view name) {
  for (DecodeMode m : {DecodeMode::greedy, DecodeMode::stochastic, DecodeMode::contrastive,
                       DecodeMode::agg, DecodeMode::bow_rescore})
    if (mode_name(m) == name) return m;
  throw ConfigError("unknown decoding mode: " + std::string(name));
}

void DecodeConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  if (alpha + beta > 1.0 + 1e-12) throw ConfigError("alpha + beta must not exceed 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (!(bow_weight >= 0.0) || !std::isfinite(bow_weight))
    throw ConfigError("bow_weight must be a finite value >= 0");
}

AspectTokens resolve_aspects(const std::vector<std::string>& terms, const Vocabulary& vocab) {
  AspectTokens out;
  for (const auto& term : terms) {
    const auto tokens = tokenize(term);
    const auto id = tokens.empty() ? std::nullopt : vocab.find(tokens.back());
    if (!id || is_reserved(*id)) {
      out.skipped.push_back(term);
      continue;
    }
    if (std::find(out.ids.begin(), out.ids.end(), *id) == out.ids.end()) out.ids.push_back(*id);
  }
  return out;
}

std::vector<TokenId> candidate_set(std::span<const double> dist, std::size_t k,
                                   std::span<const TokenId> aspects) {
  std::vector<TokenId> ids = top_k(dist, k);
  for (TokenId a : aspects)
    if (a < dist.size() && a != Vocabulary::kBos) ids.push_back(a);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double degeneration_penalty(const LanguageModel& lm, TokenId candidate,
                            std::span<const TokenId> prefix) {
  if (prefix.empty()) return 0.0;
  const auto h_v = lm.representation(prefix, candidate);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    const auto h_j = lm.representation(prefix.first(j), prefix[j]);
    best = std::max(best, cosine_similarity(h_v, h_j));
  }
  return best;
}

double aspect_encouragement(const LanguageModel& lm, TokenId candidate,
                            std::span<const TokenId> prefix,
                            std::span<const TokenId> aspects) {
  if (aspects.empty()) return 0.0;
  const auto h_v = lm.representation(prefix, candidate);
  double best = -std::numeric_limits<double>::infinity();
  for (TokenId a : aspects) best = std::max(best, cosine_similarity(h_v, lm.representation({}, a)));
  return best;
}

double agg_total(double alpha, double beta, double confidence, double degeneration,
                 double aspect) {
  return (1.0 - alpha - beta) * confidence - alpha * degeneration + beta * aspect;
}

StepTrace agg_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                   std::span<const TokenId> aspects, const DecodeConfig& cfg) {
  return score_weighted(lm, prefix, aspects, cfg.alpha, cfg.beta, cfg.k);
}

StepTrace contrastive_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                           const DecodeConfig& cfg) {
  return score_weighted(lm, prefix, {}, cfg.alpha, 0.0, cfg.k);
}

StepTrace greedy_step(const LanguageModel& lm, std::span<const TokenId> prefix) {
  const Distribution dist = lm.next_token_distribution(prefix);
  StepTrace trace;
  trace.candidates.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (i == Vocabulary::kBos) continue;
    ScoredCandidate row;
    row.token = static_cast<TokenId>(i);
    row.confidence = row.total = dist[i];
    trace.candidates.push_back(row);
  }
  trace.selected = select_max(trace.candidates);
  return trace;
}

StepTrace stochastic_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                          const DecodeConfig& cfg, Rng& rng) {
  const Distribution dist = lm.next_token_distribution(prefix);
  StepTrace trace;
  double mass = 0.0;
  for (TokenId v : candidate_set(dist, cfg.k, {})) {
    ScoredCandidate row;
    row.token = v;
    row.confidence = dist[v];
    mass += dist[v];
    trace.candidates.push_back(row);
  }
  for (auto& row : trace.candidates)
    row.total = mass > 0.0 ? row.confidence / mass
                           : 1.0 / static_cast<double>(trace.candidates.size());

  const double u = rng.uniform();
  double cumulative = 0.0;
  trace.selected = trace.candidates.back().token;
  for (const auto& row : trace.candidates) {
    cumulative += row.total;
    if (u < cumulative) {
      trace.selected = row.token;
      break;
    }
  }
  return trace;
}

double bow_attribute_score(std::span<const double> dist, std::span<const TokenId> aspects) {
  double mass = 0.0;
  for (TokenId a : aspects)
    if (a < dist.size()) mass += dist[a];
  return mass > 0.0 ? std::log(mass) : -std::numeric_limits<double>::infinity();
}

StepTrace bow_rescore_step(const LanguageModel& lm, std::span<const TokenId> prefix,
                           std::span<const TokenId> aspects, const DecodeConfig& cfg) {
  const Distribution dist = lm.next_token_distribution(prefix);
  StepTrace trace;
  for (TokenId v : candidate_set(dist, cfg.k, {})) {
    ScoredCandidate row;
    row.token = v;
    row.confidence = dist[v];
    row.aspect = std::find(aspects.begin(), aspects.end(), v) != aspects.end() ? 1.0 : 0.0;
    row.total = std::log(dist[v]) + cfg.bow_weight * row.aspect;
    trace.candidates.push_back(row);
  }
  trace.selected = select_max(trace.candidates);
  return trace;
}

GenerationResult generate(const LanguageModel& lm, const TokenSequence& prompt,
                          const std::vector<std::string>& aspect_terms,
                          const DecodeConfig& cfg) {
  cfg.validate();
  const Vocabulary& vocab = lm.vocabulary();
  const AspectTokens aspects = resolve_aspects(aspect_terms, vocab);

  GenerationResult result;
  result.skipped_aspects = aspects.skipped;
  std::vector<TokenId> prefix = vocab.encode(prompt);
  Rng rng(cfg.seed);

  while (result.ids.size() < cfg.max_len) {
    StepTrace step;
    switch (cfg.mode) {
      case DecodeMode::greedy: step = greedy_step(lm, prefix); break;
      case DecodeMode::stochastic: step = stochastic_step(lm, prefix, cfg, rng); break;
      case DecodeMode::contrastive: step = contrastive_step(lm, prefix, cfg); break;
      case DecodeMode::agg: step = agg_step(lm, prefix, aspects.ids, cfg); break;
      case DecodeMode::bow_rescore: step = bow_rescore_step(lm, prefix, aspects.ids, cfg); break;
    }
    if (step.selected == Vocabulary::kEos) {
      result.stopped_at_eos = true;
      break;
    }
    prefix.push_back(step.selected);
    result.ids.push_back(step.selected);
    result.tokens.push_back(vocab.token(step.selected));
    result.steps.push_back(std::move(step));
  }
  return result;
}

}  // namespace cmpgen
