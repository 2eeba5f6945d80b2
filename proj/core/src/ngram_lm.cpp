#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "cmpgen/lm.hpp"

namespace cmpgen {
namespace {

using nlohmann::json;

constexpr const char* kNGramFormat = "cmpgen-ngram/1";

}  // namespace

NGramLM::NGramLM(Vocabulary vocab, int order, double discount)
    : vocab_(std::move(vocab)), order_(order), discount_(discount) {
  if (order < 1) throw ConfigError("n-gram order must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must be in (0, 1)");
  tables_.resize(static_cast<std::size_t>(order));
}

NGramLM NGramLM::train(const std::vector<TokenSequence>& corpus, int order, double discount) {
  return train(corpus, Vocabulary::build(corpus), order, discount);
}

NGramLM NGramLM::train(const std::vector<TokenSequence>& corpus, Vocabulary vocabulary,
                       int order, double discount) {
  if (corpus.empty()) throw ConfigError("cannot train a language model on an empty corpus");
  NGramLM lm(std::move(vocabulary), order, discount);
  for (const auto& sentence : corpus) {
    std::vector<TokenId> ids;
    ids.reserve(sentence.size() + 2);
    ids.push_back(Vocabulary::kBos);
    for (const auto& t : sentence) ids.push_back(lm.vocab_.id(t));
    ids.push_back(Vocabulary::kEos);
    lm.add_sentence(ids);
  }
  lm.finalize();
  return lm;
}

void NGramLM::add_sentence(const std::vector<TokenId>& ids) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    for (std::size_t k = 0; k < tables_.size() && k <= i; ++k) {
      std::vector<TokenId> context(ids.begin() + static_cast<std::ptrdiff_t>(i - k),
                                   ids.begin() + static_cast<std::ptrdiff_t>(i));
      auto& counts = tables_[k][std::move(context)];
      ++counts.next[ids[i]];
      ++counts.total;
    }
  }
}

void NGramLM::finalize() {
  const std::size_t v = vocab_.size();
  unigram_.assign(v, 0.0);
  const auto it = tables_[0].find({});
  const std::size_t n = it == tables_[0].end() ? 0 : it->second.total;
  const double uniform = 1.0 / static_cast<double>(v - 1);  // BOS excluded
  if (n == 0) {
    for (std::size_t w = 1; w < v; ++w) unigram_[w] = uniform;
    return;
  }
  const auto& counts = it->second;
  const double total = static_cast<double>(n);
  const double backoff = discount_ * static_cast<double>(counts.next.size()) / total;
  for (std::size_t w = 1; w < v; ++w) unigram_[w] = backoff * uniform;
  for (const auto& [w, c] : counts.next)
    unigram_[w] += std::max(static_cast<double>(c) - discount_, 0.0) / total;
}

Distribution NGramLM::distribution(std::span<const TokenId> prefix) const {
  std::vector<TokenId> history;
  history.reserve(prefix.size() + 1);
  history.push_back(Vocabulary::kBos);
  for (TokenId t : prefix) history.push_back(t < vocab_.size() ? t : Vocabulary::kUnk);

  Distribution p = unigram_;
  for (std::size_t k = 1; k < tables_.size() && k <= history.size(); ++k) {
    const std::vector<TokenId> context(history.end() - static_cast<std::ptrdiff_t>(k),
                                       history.end());
    const auto it = tables_[k].find(context);
    if (it == tables_[k].end() || it->second.total == 0) break;
    const auto& counts = it->second;
    const double total = static_cast<double>(counts.total);
    const double backoff = discount_ * static_cast<double>(counts.next.size()) / total;
    for (double& q : p) q *= backoff;
    for (const auto& [w, c] : counts.next)
      p[w] += std::max(static_cast<double>(c) - discount_, 0.0) / total;
  }
  return p;
}

std::string NGramLM::to_json() const {
  json tables = json::array();
  for (const auto& table : tables_) {
    json rows = json::array();
    for (const auto& [context, counts] : table) {
      for (const auto& [w, c] : counts.next) {
        json row = context;
        row.push_back(w);
        row.push_back(c);
        rows.push_back(std::move(row));
      }
    }
    tables.push_back(std::move(rows));
  }
  json j = {{"format", kNGramFormat},
            {"order", order_},
            {"discount", discount_},
            {"vocab", vocab_.tokens()},
            {"tables", std::move(tables)}};
  return j.dump();
}

NGramLM NGramLM::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kNGramFormat)
      throw ConfigError("not an n-gram model file (format mismatch)");
    auto tokens = j.at("vocab").get<std::vector<std::string>>();
    if (tokens.size() < 3 || tokens[0] != Vocabulary::kBosToken ||
        tokens[1] != Vocabulary::kEosToken || tokens[2] != Vocabulary::kUnkToken)
      throw ConfigError("n-gram vocabulary lacks reserved tokens");
    tokens.erase(tokens.begin(), tokens.begin() + 3);
    NGramLM lm(Vocabulary(tokens), j.at("order").get<int>(), j.at("discount").get<double>());
    const auto& tables = j.at("tables");
    if (tables.size() != lm.tables_.size()) throw ConfigError("n-gram table count mismatch");
    const auto v = lm.vocab_.size();
    for (std::size_t k = 0; k < tables.size(); ++k) {
      for (const auto& row : tables[k]) {
        if (row.size() != k + 2) throw ConfigError("n-gram row has wrong arity");
        std::vector<TokenId> context;
        for (std::size_t i = 0; i < k; ++i) context.push_back(row[i].get<TokenId>());
        const auto w = row[k].get<TokenId>();
        const auto c = row[k + 1].get<std::size_t>();
        if (w >= v || std::any_of(context.begin(), context.end(),
                                  [v](TokenId t) { return t >= v; }))
          throw ConfigError("n-gram token id out of range");
        auto& counts = lm.tables_[k][std::move(context)];
        counts.next[w] += c;
        counts.total += c;
      }
    }
    lm.finalize();
    return lm;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed n-gram model file: ") + e.what());
  }
}

void NGramLM::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write language model: " + path.string());
  out << to_json() << '\n';
  if (!out) throw IoError("error while writing language model: " + path.string());
}

NGramLM NGramLM::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read language model: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace cmpgen
