#include "cmpgen/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "text_util.hpp"

namespace cmpgen {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 10> kAbbreviations = {
    "e.g.", "i.e.", "mr.", "mrs.", "ms.", "dr.", "vs.", "st.", "no.", "approx."};

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool is_ascii_space(unsigned char c) { return c < 0x80 && std::isspace(c); }
bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }
bool is_delimiter(char c) { return c == '.' || c == '?' || c == '!'; }

// Curly apostrophes are folded to ASCII so contractions tokenize uniformly.
std::string fold_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
         static_cast<unsigned char>(text[i + 2]) == 0x99)) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

void emit_word(std::string& word, std::vector<std::string>& tokens) {
  if (word.empty()) return;
  constexpr std::string_view kNegation = "n't";
  if (word.size() > kNegation.size() && word.ends_with(kNegation)) {
    tokens.emplace_back(word.substr(0, word.size() - kNegation.size()));
    tokens.emplace_back(kNegation);
  } else {
    tokens.push_back(std::move(word));
  }
  word.clear();
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

const json* find_key(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = obj.find(key);
    if (it != obj.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::string with_thousands(std::size_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string unescape_html_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const auto semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view entity = text.substr(i + 1, semi - i - 1);
    bool decoded = true;
    if (entity == "amp") out.push_back('&');
    else if (entity == "lt") out.push_back('<');
    else if (entity == "gt") out.push_back('>');
    else if (entity == "quot") out.push_back('"');
    else if (entity == "apos") out.push_back('\'');
    else if (entity == "nbsp") out.push_back(' ');
    else if (entity.size() > 1 && entity[0] == '#') {
      const bool hex = entity[1] == 'x' || entity[1] == 'X';
      const std::string digits(entity.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (!digits.empty() && end && *end == '\0' && cp > 0 && cp <= 0x10FFFF) {
        append_utf8(out, cp);
      } else {
        decoded = false;
      }
    } else {
      decoded = false;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view raw) {
  const std::string text = fold_quotes(raw);
  std::vector<std::string> tokens;
  std::string word;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      emit_word(word, tokens);
    } else if (is_ascii_punct(c)) {
      const bool inner_apostrophe =
          c == '\'' && !word.empty() && i + 1 < text.size() &&
          is_word_byte(static_cast<unsigned char>(text[i + 1]));
      if (inner_apostrophe) {
        word.push_back('\'');
      } else {
        emit_word(word, tokens);
        tokens.emplace_back(1, static_cast<char>(c));
      }
    } else {
      word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                              : static_cast<char>(c));
    }
  }
  emit_word(word, tokens);
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text,
                                      std::string_view source_review_id) {
  std::vector<Sentence> sentences;
  auto flush = [&](std::size_t begin, std::size_t end) {
    const std::string_view piece = detail::trim(text.substr(begin, end - begin));
    const bool has_content =
        std::any_of(piece.begin(), piece.end(), [](char ch) {
          return is_word_byte(static_cast<unsigned char>(ch));
        });
    if (!has_content) return;
    Sentence s;
    s.text = std::string(piece);
    s.tokens = tokenize(piece);
    s.source_review_id = std::string(source_review_id);
    s.index_in_review = sentences.size();
    sentences.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_delimiter(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_delimiter(text[j])) ++j;
    const bool at_break =
        j == text.size() || is_ascii_space(static_cast<unsigned char>(text[j]));
    bool abbreviation = false;
    if (at_break && j - i == 1 && text[i] == '.') {
      std::size_t w = i;
      while (w > start && !is_ascii_space(static_cast<unsigned char>(text[w - 1])))
        --w;
      std::string word = detail::to_lower(text.substr(w, j - w));
      const auto first = word.find_first_not_of("([\"'");
      word = first == std::string::npos ? std::string() : word.substr(first);
      abbreviation = std::find(kAbbreviations.begin(), kAbbreviations.end(),
                               word) != kAbbreviations.end();
    }
    if (at_break && !abbreviation) {
      flush(start, j);
      start = j;
    }
    i = j;
  }
  if (start < text.size()) flush(start, text.size());
  return sentences;
}

std::vector<Sentence> review_sentences(const std::vector<Review>& reviews) {
  std::vector<Sentence> out;
  for (const Review& review : reviews) {
    auto sentences = split_sentences(review.text, review.review_id);
    std::move(sentences.begin(), sentences.end(), std::back_inserter(out));
  }
  return out;
}

LoadResult parse_reviews(std::string_view jsonl) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    auto eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    const std::string_view line = detail::trim(jsonl.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      ++result.skipped;
      continue;
    }
    const json* text = find_key(obj, {"reviewText", "text"});
    const json* item = find_key(obj, {"asin", "item_id"});
    const json* rating = find_key(obj, {"overall", "rating"});
    const json* user = find_key(obj, {"reviewerID", "user_id"});
    const json* id = find_key(obj, {"reviewID", "review_id"});
    if (!text || !text->is_string() || !item || !item->is_string() ||
        !rating || !rating->is_number() || (user && !user->is_string()) ||
        (id && !id->is_string())) {
      ++result.skipped;
      continue;
    }

    Review review;
    review.text = unescape_html_entities(detail::trim(text->get_ref<const std::string&>()));
    review.item_id = item->get<std::string>();
    review.user_id = user ? user->get<std::string>() : std::string();
    if (id) {
      review.review_id = id->get<std::string>();
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "L%06zu", line_no);
      review.review_id = buf;
    }
    if (review.text.empty() || review.item_id.empty() ||
        review.review_id.empty() || !seen.insert(review.review_id).second) {
      ++result.skipped;
      continue;
    }
    const double value = rating->get<double>();
    review.rating = std::isfinite(value) ? std::clamp(value, 1.0, 5.0) : 1.0;
    if (review.rating != value) ++result.clamped_ratings;
    result.reviews.push_back(std::move(review));
  }
  return result;
}

LoadResult load_reviews(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read review file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading review file: " + path.string());
  return parse_reviews(buffer.str());
}

std::string stats_to_json(const CorpusStats& stats) {
  json j = {{"dataset", stats.split_name},
            {"train", stats.n_train},
            {"val", stats.n_val},
            {"test", stats.n_test},
            {"items", stats.n_items}};
  return j.dump(2);
}

std::string stats_to_table(const std::vector<CorpusStats>& rows) {
  const std::array<std::string, 5> header = {"Dataset", "Train", "Val", "Test", "#Items"};
  std::vector<std::array<std::string, 5>> cells;
  cells.push_back(header);
  for (const auto& r : rows) {
    cells.push_back({r.split_name, with_thousands(r.n_train), with_thousands(r.n_val),
                     with_thousands(r.n_test), with_thousands(r.n_items)});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cmpgen
