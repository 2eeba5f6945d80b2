#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmpgen/corpus.hpp"

namespace cmpgen {

// Word -> polarity in [-1, +1].
class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  // Throws ConfigError if a score is not finite or outside [-1, 1].
  explicit SentimentLexicon(std::map<std::string, double> scores);

  // Small built-in seed list of common review opinion words.
  static SentimentLexicon seed();
  // One "word<TAB>score" per line; blank lines and '#' comments ignored.
  static SentimentLexicon load(const std::filesystem::path& path);

  std::optional<double> score(const std::string& word) const;
  bool empty() const { return scores_.empty(); }
  std::size_t size() const { return scores_.size(); }
  const std::map<std::string, double>& entries() const { return scores_; }

 private:
  std::map<std::string, double> scores_;
};

struct Aspect {
  std::string term;  // one token or "tok1 tok2"
  double sentiment = 0.0;
  std::size_t frequency = 0;
  std::string item_id;

  friend bool operator==(const Aspect&, const Aspect&) = default;
};

// Which tokens may be part of an aspect term.
struct AspectFilter {
  std::set<std::string> stopwords = default_stopwords();
  std::set<std::string> excluded;  // e.g. marker words, lexicon words
  bool include_bigrams = true;

  static const std::set<std::string>& default_stopwords();
  bool admits(const std::string& token) const;
};

// Filter used by positive_aspects: stopwords plus comparative markers plus
// opinion words from the lexicon.
AspectFilter default_aspect_filter(const SentimentLexicon& lexicon);

using TermCount = std::pair<std::string, std::size_t>;

// Frequent noun-like terms across the reviews of one item, sorted by
// descending frequency then lexicographically. Throws ConfigError if the
// reviews span more than one item or min_freq is 0.
std::vector<TermCount> extract_candidate_aspects(const std::vector<Review>& reviews,
                                                 std::size_t min_freq,
                                                 const AspectFilter& filter = {});

// Tokens in {not, never, n't} flip the sign of the next lexicon hit in the
// same window.
bool is_negator(const std::string& token);

// Per occurrence of `term`, the mean polarity of lexicon hits within +/-window
// positions; the result is the mean over occurrences that had at least one hit,
// or 0.0 when there are none. Throws ConfigError if window is 0.
double assign_sentiment(const std::string& term, const std::vector<Sentence>& sentences,
                        const SentimentLexicon& lexicon, std::size_t window);

struct AspectOptions {
  std::size_t min_freq = 3;
  std::size_t window = 4;
};

// Candidates whose sentiment is strictly positive, in candidate order.
std::vector<Aspect> positive_aspects(const std::string& item_id,
                                     const std::vector<Review>& reviews,
                                     const SentimentLexicon& lexicon,
                                     const AspectOptions& options,
                                     const AspectFilter& filter);
std::vector<Aspect> positive_aspects(const std::string& item_id,
                                     const std::vector<Review>& reviews,
                                     const SentimentLexicon& lexicon,
                                     const AspectOptions& options = {});

// Groups a mixed corpus by item_id and runs positive_aspects per item.
std::map<std::string, std::vector<Aspect>> positive_aspects_by_item(
    const std::vector<Review>& reviews, const SentimentLexicon& lexicon,
    const AspectOptions& options = {});

// JSONL {item_id, term, sentiment, frequency}, items in key order.
void write_aspects(const std::map<std::string, std::vector<Aspect>>& aspects,
                   const std::filesystem::path& path);
std::map<std::string, std::vector<Aspect>> read_aspects(const std::filesystem::path& path);

}  // namespace cmpgen
