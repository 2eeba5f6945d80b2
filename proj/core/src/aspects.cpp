#include "cmpgen/aspects.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "cmpgen/extraction.hpp"
#include "text_util.hpp"

namespace cmpgen {

using nlohmann::json;

SentimentLexicon::SentimentLexicon(std::map<std::string, double> scores)
    : scores_(std::move(scores)) {
  for (const auto& [word, value] : scores_) {
    if (!std::isfinite(value) || value < -1.0 || value > 1.0)
      throw ConfigError("lexicon score for '" + word + "' must be in [-1, 1]");
  }
}

SentimentLexicon SentimentLexicon::seed() {
  std::map<std::string, double> s;
  for (const char* w : {"good", "great", "like", "love", "loves", "loved", "best", "excellent",
                        "amazing", "awesome", "perfect", "fantastic", "wonderful", "beautiful",
                        "superb", "recommend", "happy", "impressive", "gorgeous"})
    s[w] = 1.0;
  for (const char* w : {"warm", "smooth", "nice", "solid", "rich", "clear", "crisp", "sturdy",
                        "comfortable", "easy", "sweet", "clean", "pleasant", "reliable",
                        "durable", "fun", "bright", "decent", "fine", "accurate", "responsive",
                        "quiet", "balanced", "full", "worth"})
    s[w] = 0.5;
  for (const char* w : {"bad", "poor", "hate", "worst", "terrible", "awful", "horrible",
                        "useless", "broken", "junk", "disappointing", "disappointed"})
    s[w] = -1.0;
  for (const char* w : {"harsh", "cheap", "flimsy", "noisy", "broke", "weak", "muddy", "thin",
                        "tinny", "annoying", "difficult", "uncomfortable", "fragile", "dull",
                        "problem", "problems", "waste", "buzzy", "stiff", "loose"})
    s[w] = -0.5;
  return SentimentLexicon(std::move(s));
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read lexicon: " + path.string());
  std::map<std::string, double> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto tab = trimmed.find('\t');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (tab == std::string_view::npos) throw ConfigError(where + ": expected word<TAB>score");
    const std::string word = detail::to_lower(detail::trim(trimmed.substr(0, tab)));
    const std::string value(detail::trim(trimmed.substr(tab + 1)));
    std::size_t used = 0;
    double score = 0.0;
    try {
      score = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (word.empty() || used == 0 || used != value.size())
      throw ConfigError(where + ": malformed lexicon entry");
    scores[word] = score;
  }
  return SentimentLexicon(std::move(scores));
}

std::optional<double> SentimentLexicon::score(const std::string& word) const {
  auto it = scores_.find(word);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

const std::set<std::string>& AspectFilter::default_stopwords() {
  // Closed-class words plus a few high-frequency fillers that are never aspects.
  static const std::set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "around", "as", "at", "be", "because", "been", "before", "being",
      "below", "between", "both", "but", "by", "can", "ca", "could", "did", "do", "does",
      "doing", "don", "down", "during", "each", "even", "ever", "every", "few", "for",
      "from", "further", "get", "got", "gets", "had", "has", "have", "having", "he", "her",
      "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into",
      "is", "it", "it's", "its", "itself", "just", "let", "me", "more", "most", "much",
      "my", "myself", "n't", "never", "no", "nor", "not", "now", "of", "off", "on", "once",
      "one", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own",
      "quite", "really", "same", "she", "should", "so", "some", "still", "such", "that",
      "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
      "thing", "things", "this", "those", "though", "through", "to", "too", "under",
      "until", "up", "use", "used", "very", "was", "we", "well", "were", "what", "when",
      "where", "which", "while", "who", "whom", "why", "will", "with", "wo", "would",
      "you", "your", "yours", "yourself", "i'm", "i've", "it", "am", "bit", "lot", "way",
      "made", "make", "makes", "bought", "buy", "came", "comes", "come", "go", "goes",
      "going", "went", "say", "said", "seem", "seems", "take", "took", "than", "less",
      "since", "yet", "within", "without", "another", "many", "may", "might", "must",
      "need", "needs", "new", "old", "first", "two", "three", "year", "years", "time",
      "times", "day", "days", "sounds", "feels", "looks", "works", "work", "think", "know",
      "want", "wanted", "sure", "overall", "definitely", "pretty", "enough", "little"};
  return words;
}

bool AspectFilter::admits(const std::string& token) const {
  if (token.size() < 2) return false;
  if (!std::any_of(token.begin(), token.end(),
                   [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
    return false;
  if (!std::isalnum(static_cast<unsigned char>(token.front())) &&
      static_cast<unsigned char>(token.front()) < 0x80)
    return false;
  return !stopwords.contains(token) && !excluded.contains(token);
}

AspectFilter default_aspect_filter(const SentimentLexicon& lexicon) {
  AspectFilter filter;
  filter.excluded = PatternSet::default_marker_words();
  for (const auto& [word, score] : lexicon.entries()) filter.excluded.insert(word);
  return filter;
}

std::vector<TermCount> extract_candidate_aspects(const std::vector<Review>& reviews,
                                                 std::size_t min_freq,
                                                 const AspectFilter& filter) {
  if (min_freq == 0) throw ConfigError("min_freq must be positive");
  for (const Review& r : reviews)
    if (r.item_id != reviews.front().item_id)
      throw ConfigError("extract_candidate_aspects expects reviews of a single item");

  std::map<std::string, std::size_t> counts;
  for (const Sentence& sentence : review_sentences(reviews)) {
    const auto& t = sentence.tokens;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!filter.admits(t[i])) continue;
      ++counts[t[i]];
      if (filter.include_bigrams && i + 1 < t.size() && filter.admits(t[i + 1]))
        ++counts[t[i] + " " + t[i + 1]];
    }
  }
  std::vector<TermCount> out;
  for (auto& [term, count] : counts)
    if (count >= min_freq) out.emplace_back(term, count);
  std::stable_sort(out.begin(), out.end(),
                   [](const TermCount& a, const TermCount& b) { return a.second > b.second; });
  return out;
}

bool is_negator(const std::string& token) {
  return token == "not" || token == "never" || token == "n't";
}

double assign_sentiment(const std::string& term, const std::vector<Sentence>& sentences,
                        const SentimentLexicon& lexicon, std::size_t window) {
  if (window == 0) throw ConfigError("sentiment window must be positive");
  const std::vector<std::string> needle = tokenize(term);
  if (needle.empty()) return 0.0;

  double total = 0.0;
  std::size_t scored = 0;
  for (const Sentence& sentence : sentences) {
    const auto& t = sentence.tokens;
    if (t.size() < needle.size()) continue;
    for (std::size_t p = 0; p + needle.size() <= t.size(); ++p) {
      if (!std::equal(needle.begin(), needle.end(), t.begin() + static_cast<std::ptrdiff_t>(p)))
        continue;
      const std::size_t last = p + needle.size() - 1;
      const std::size_t lo = p >= window ? p - window : 0;
      const std::size_t hi = std::min(t.size() - 1, last + window);
      bool negate = false;
      double sum = 0.0;
      std::size_t hits = 0;
      for (std::size_t q = lo; q <= hi; ++q) {
        if (q >= p && q <= last) continue;
        if (is_negator(t[q])) {
          negate = true;
          continue;
        }
        if (auto s = lexicon.score(t[q])) {
          sum += negate ? -*s : *s;
          negate = false;
          ++hits;
        }
      }
      if (hits > 0) {
        total += sum / static_cast<double>(hits);
        ++scored;
      }
    }
  }
  return scored > 0 ? total / static_cast<double>(scored) : 0.0;
}

std::vector<Aspect> positive_aspects(const std::string& item_id,
                                     const std::vector<Review>& reviews,
                                     const SentimentLexicon& lexicon,
                                     const AspectOptions& options,
                                     const AspectFilter& filter) {
  const auto candidates = extract_candidate_aspects(reviews, options.min_freq, filter);
  const auto sentences = review_sentences(reviews);
  std::vector<Aspect> out;
  for (const auto& [term, frequency] : candidates) {
    const double sentiment = assign_sentiment(term, sentences, lexicon, options.window);
    if (sentiment > 0.0) out.push_back(Aspect{term, sentiment, frequency, item_id});
  }
  return out;
}

std::vector<Aspect> positive_aspects(const std::string& item_id,
                                     const std::vector<Review>& reviews,
                                     const SentimentLexicon& lexicon,
                                     const AspectOptions& options) {
  return positive_aspects(item_id, reviews, lexicon, options, default_aspect_filter(lexicon));
}

std::map<std::string, std::vector<Aspect>> positive_aspects_by_item(
    const std::vector<Review>& reviews, const SentimentLexicon& lexicon,
    const AspectOptions& options) {
  std::map<std::string, std::vector<Review>> by_item;
  for (const Review& r : reviews) by_item[r.item_id].push_back(r);
  const AspectFilter filter = default_aspect_filter(lexicon);
  std::map<std::string, std::vector<Aspect>> out;
  for (const auto& [item, item_reviews] : by_item)
    out[item] = positive_aspects(item, item_reviews, lexicon, options, filter);
  return out;
}

void write_aspects(const std::map<std::string, std::vector<Aspect>>& aspects,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write aspects: " + path.string());
  for (const auto& [item, list] : aspects) {
    for (const Aspect& a : list) {
      json j = {{"item_id", item},
                {"term", a.term},
                {"sentiment", a.sentiment},
                {"frequency", a.frequency}};
      out << j.dump() << '\n';
    }
  }
  if (!out) throw IoError("error while writing aspects: " + path.string());
}

std::map<std::string, std::vector<Aspect>> read_aspects(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read aspects: " + path.string());
  std::map<std::string, std::vector<Aspect>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      Aspect a;
      a.item_id = j.at("item_id").get<std::string>();
      a.term = j.at("term").get<std::string>();
      a.sentiment = j.at("sentiment").get<double>();
      a.frequency = j.at("frequency").get<std::size_t>();
      out[a.item_id].push_back(std::move(a));
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed aspect record: " + e.what());
    }
  }
  return out;
}

}  // namespace cmpgen
