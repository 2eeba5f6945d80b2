#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cmpgen/corpus.hpp"
#include "cmpgen/extraction.hpp"
#include "cmpgen/lm.hpp"
#include "cmpgen/run.hpp"

namespace cmpgen {

// Unique n-grams over total n-grams, pooled across all generations.
// Throws ConfigError if n < 1 or there are no n-grams at all.
double distinct_n(const std::vector<TokenSequence>& generations, int n);

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

// lcs(candidate, source) / |candidate|. Throws ConfigError on an empty candidate.
double rouge_l_precision(const TokenSequence& candidate, const TokenSequence& source);

// Sentence BLEU against one reference: geometric mean of clipped 1..n-gram
// precisions times min(1, exp(1 - |ref| / |cand|)). Without smoothing any zero
// precision gives 0; with smoothing, orders >= 2 use (matches + 1) / (total + 1).
// Throws ConfigError on an empty candidate or n < 1.
double bleu_n(const TokenSequence& candidate, const TokenSequence& reference, int n,
              bool smoothing = false);

// Fraction labeled comparative. Throws ConfigError on empty input.
double percent_comparative(const std::vector<Sentence>& generations,
                           const Classifier& classifier);

// True if any term's full token sequence occurs contiguously in `tokens`.
bool contains_any_aspect(const TokenSequence& tokens, const std::vector<std::string>& terms);

// Fraction of generations containing at least one of their own aspect terms.
// Throws ConfigError on empty input or mismatched lengths.
double percent_aspect(const std::vector<TokenSequence>& generations,
                      const std::vector<std::vector<std::string>>& aspects);

struct EvalReport {
  double d1 = 0.0;
  double d2 = 0.0;
  double bleu1 = 0.0;
  double bleu2 = 0.0;
  double rouge_l_p = 0.0;
  double pct_comparative = 0.0;
  double pct_aspect = 0.0;
  std::size_t n_samples = 0;

  // Keys in column order: d1, d2, bleu1, bleu2, rouge_l_p, pct_comparative,
  // pct_aspect, n_samples.
  std::string to_json() const;
};

// Model | D-1 | D-2 | B-1 | B-2 | RL-P | % Comp. | % Asp.
std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

struct MetricOptions {
  bool bleu_smoothing = false;
};

// BLEU is macro-averaged per sample against references.at(item_id); RL-P uses
// the sample's prompt tokens followed by its aspect terms as the source. An
// empty generation scores 0 on BLEU and RL-P. Throws ConfigError on an empty
// run or a sample whose item has no reference.
EvalReport evaluate_all(const std::vector<GenerationRecord>& run,
                        const std::map<std::string, TokenSequence>& references,
                        const Classifier& classifier, const MetricOptions& options = {});

}  // namespace cmpgen
