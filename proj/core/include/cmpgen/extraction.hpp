#pragma once

#include <cstdint>
#include <filesystem>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmpgen/corpus.hpp"
#include "cmpgen/dataset.hpp"

namespace cmpgen {

// Marker words plus a product-code regex ("FX-3200", "NWZ-A855").
class PatternSet {
 public:
  static const std::set<std::string>& default_marker_words();
  static constexpr const char* kDefaultModelNumberPattern = R"(\b[a-z]+-?[0-9]+\b)";

  PatternSet();
  // Throws ConfigError on an empty marker list or an invalid regex.
  PatternSet(std::set<std::string> marker_words, std::string model_number_pattern);

  const std::set<std::string>& marker_words() const { return marker_words_; }
  const std::string& model_number_pattern() const { return pattern_text_; }

  bool is_marker(const std::string& token) const { return marker_words_.contains(token); }
  bool matches_model_number(const std::string& raw_text) const;

 private:
  std::set<std::string> marker_words_;
  std::string pattern_text_;
  std::regex pattern_;
};

// True iff a marker word occurs as a token or the model-number pattern
// matches the raw sentence text (case-insensitive).
bool match_comparative_candidates(const Sentence& sentence, const PatternSet& patterns);

struct FeaturizerConfig {
  std::vector<int> orders = {1, 2};
  std::uint32_t dimension = 1u << 18;
  std::set<std::string> marker_words = PatternSet::default_marker_words();
};

// Sorted by index, no duplicate indices, no zero values.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

// Hash bucket of an n-gram over `tokens` (order = tokens.size()).
std::uint32_t ngram_feature_index(const std::vector<std::string>& tokens,
                                  std::uint32_t dimension);
std::uint32_t marker_feature_index(const std::string& marker, std::uint32_t dimension);

// Hashed n-gram counts plus one binary feature per marker word present.
SparseVector featurize(const Sentence& sentence, const FeaturizerConfig& config);

struct TrainOptions {
  int epochs = 10;
  double learning_rate = 0.1;
  double l2 = 1e-5;
  std::uint64_t seed = 13;
};

// Logistic regression over featurize(); immutable once built.
class Classifier {
 public:
  explicit Classifier(FeaturizerConfig config);  // all-zero weights
  Classifier(FeaturizerConfig config, std::vector<double> weights, double bias);

  const FeaturizerConfig& config() const { return config_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

  double score(const SparseVector& features) const;
  double score(const Sentence& sentence) const;
  // P(comparative | sentence).
  double probability(const Sentence& sentence) const;

  std::string to_json() const;
  static Classifier from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Classifier load(const std::filesystem::path& path);

 private:
  FeaturizerConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// Seeded SGD on L2-regularized log-loss. Throws ConfigError on empty or
// single-class data, or on nonpositive epochs / learning rate.
Classifier train_classifier(const std::vector<LabeledSentence>& data,
                            const TrainOptions& options,
                            FeaturizerConfig config = {});

// label = comparative iff P(comparative) > 0.5; confidence is the
// probability of the returned label.
LabeledSentence classify(const Classifier& classifier, const Sentence& sentence);

// split_sentences -> pattern filter -> classify -> keep comparative with
// confidence > threshold. Throws ConfigError unless threshold is in [0, 1].
std::vector<ComparativeRecord> build_comparative_dataset(
    const std::vector<Review>& reviews, const Classifier& classifier,
    const PatternSet& patterns, double threshold);

struct PRF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF1 from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

// Scores for the comparative class. Throws ConfigError on an empty test set.
PRF1 evaluate_classifier(const Classifier& classifier,
                         const std::vector<LabeledSentence>& test);

// Labeled seed file: JSONL {"text": ..., "label": "comparative"|"non_comparative"}.
std::vector<LabeledSentence> read_labeled_sentences(const std::filesystem::path& path);

}  // namespace cmpgen
