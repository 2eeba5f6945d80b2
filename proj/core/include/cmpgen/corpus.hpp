#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cmpgen {

struct Review {
  std::string review_id;
  std::string item_id;
  std::string user_id;
  double rating = 0.0;  // clamped into [1, 5] on load
  std::string text;
};

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;
  std::string source_review_id;
  std::size_t index_in_review = 0;
};

struct LoadResult {
  std::vector<Review> reviews;
  std::size_t skipped = 0;         // malformed or duplicate lines
  std::size_t clamped_ratings = 0;
};

// Reads Amazon-style JSON Lines (reviewerID, asin, overall, reviewText).
// A "reviewID"/"review_id" key is used as the review id when present,
// otherwise the id is synthesized from the 1-based line number ("L000042").
// Blank lines are ignored and are not counted as skipped.
// Throws IoError if the file cannot be read.
LoadResult load_reviews(const std::filesystem::path& path);

// Same as load_reviews but from an in-memory JSONL buffer.
LoadResult parse_reviews(std::string_view jsonl);

// Decodes the handful of HTML entities that survive in review dumps.
std::string unescape_html_entities(std::string_view text);

// Lowercases, isolates ASCII punctuation, splits "n't" contractions, collapses
// whitespace. tokenize(join(tokenize(s))) == tokenize(s).
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

// Splits on runs of [.?!] followed by whitespace or end of text, except after
// a small abbreviation stoplist. Fragments without any alphanumeric character
// are dropped.
std::vector<Sentence> split_sentences(std::string_view text,
                                      std::string_view source_review_id = {});

// Sentence-split and tokenize every review, in order.
std::vector<Sentence> review_sentences(const std::vector<Review>& reviews);

struct CorpusStats {
  std::string split_name;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;
  std::size_t n_items = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

std::string stats_to_json(const CorpusStats& stats);
// Aligned-column table: Dataset | Train | Val | Test | #Items.
std::string stats_to_table(const std::vector<CorpusStats>& rows);

}  // namespace cmpgen
