#include "cmpgen/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"

namespace cmpgen {
namespace {

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> count_ngrams(const TokenSequence& tokens, std::size_t n) {
  std::map<Gram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[Gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

}  // namespace

double distinct_n(const std::vector<TokenSequence>& generations, int n) {
  if (n < 1) throw ConfigError("distinct_n: n must be >= 1");
  const auto len = static_cast<std::size_t>(n);
  std::map<Gram, std::size_t> pooled;
  std::size_t total = 0;
  for (const auto& g : generations) {
    for (auto& [gram, count] : count_ngrams(g, len)) {
      pooled[gram] += count;
      total += count;
    }
  }
  if (total == 0) throw ConfigError("distinct_n: generations contain no n-grams");
  return static_cast<double>(pooled.size()) / static_cast<double>(total);
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_precision(const TokenSequence& candidate, const TokenSequence& source) {
  if (candidate.empty()) throw ConfigError("rouge_l_precision: empty candidate");
  return static_cast<double>(lcs_length(candidate, source)) /
         static_cast<double>(candidate.size());
}

double bleu_n(const TokenSequence& candidate, const TokenSequence& reference, int n,
              bool smoothing) {
  if (candidate.empty()) throw ConfigError("bleu_n: empty candidate");
  if (n < 1) throw ConfigError("bleu_n: n must be >= 1");
  double log_sum = 0.0;
  for (int order = 1; order <= n; ++order) {
    const auto m = static_cast<std::size_t>(order);
    const auto cand = count_ngrams(candidate, m);
    const auto ref = count_ngrams(reference, m);
    std::size_t matches = 0, total = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matches += std::min(count, it->second);
    }
    double precision = total > 0 ? static_cast<double>(matches) / static_cast<double>(total) : 0.0;
    if (smoothing && order > 1)
      precision = (static_cast<double>(matches) + 1.0) / (static_cast<double>(total) + 1.0);
    if (precision == 0.0) return 0.0;
    log_sum += std::log(precision);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = std::min(1.0, std::exp(1.0 - r / c));
  return brevity * std::exp(log_sum / n);
}

double percent_comparative(const std::vector<Sentence>& generations,
                           const Classifier& classifier) {
  if (generations.empty()) throw ConfigError("percent_comparative: no generations");
  std::size_t positive = 0;
  for (const auto& s : generations)
    if (classify(classifier, s).label == Label::comparative) ++positive;
  return static_cast<double>(positive) / static_cast<double>(generations.size());
}

bool contains_any_aspect(const TokenSequence& tokens, const std::vector<std::string>& terms) {
  for (const auto& term : terms) {
    const auto needle = tokenize(term);
    if (needle.empty()) continue;
    if (std::search(tokens.begin(), tokens.end(), needle.begin(), needle.end()) != tokens.end())
      return true;
  }
  return false;
}

double percent_aspect(const std::vector<TokenSequence>& generations,
                      const std::vector<std::vector<std::string>>& aspects) {
  if (generations.empty()) throw ConfigError("percent_aspect: no generations");
  if (generations.size() != aspects.size())
    throw ConfigError("percent_aspect: one aspect list per generation is required");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < generations.size(); ++i)
    if (contains_any_aspect(generations[i], aspects[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(generations.size());
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j = {{"d1", d1},
                              {"d2", d2},
                              {"bleu1", bleu1},
                              {"bleu2", bleu2},
                              {"rouge_l_p", rouge_l_p},
                              {"pct_comparative", pct_comparative},
                              {"pct_aspect", pct_aspect},
                              {"n_samples", n_samples}};
  return j.dump(2);
}

std::string report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  using Row = std::array<std::string, 8>;
  std::vector<Row> cells;
  cells.push_back({"Model", "D-1", "D-2", "B-1", "B-2", "RL-P", "% Comp.", "% Asp."});
  for (const auto& [name, r] : rows) {
    cells.push_back({name, fixed3(r.d1), fixed3(r.d2), fixed3(r.bleu1), fixed3(r.bleu2),
                     fixed3(r.rouge_l_p), fixed3(r.pct_comparative), fixed3(r.pct_aspect)});
  }
  std::array<std::size_t, 8> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) out << row[c] << std::string(width[c] - row[c].size(), ' ');
      else out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    out << '\n';
  }
  return out.str();
}

EvalReport evaluate_all(const std::vector<GenerationRecord>& run,
                        const std::map<std::string, TokenSequence>& references,
                        const Classifier& classifier, const MetricOptions& options) {
  if (run.empty()) throw ConfigError("evaluate_all: empty run");
  EvalReport report;
  report.n_samples = run.size();

  std::vector<TokenSequence> generations;
  std::vector<std::vector<std::string>> aspects;
  std::vector<Sentence> sentences;
  double bleu1 = 0.0, bleu2 = 0.0, rouge = 0.0;
  for (const auto& sample : run) {
    const auto ref = references.find(sample.item_id);
    if (ref == references.end())
      throw ConfigError("evaluate_all: no reference sentence for item " + sample.item_id);
    generations.push_back(sample.tokens);
    aspects.push_back(sample.aspects);
    Sentence s;
    s.text = join_tokens(sample.tokens);
    s.tokens = sample.tokens;
    sentences.push_back(std::move(s));
    if (sample.tokens.empty()) continue;

    bleu1 += bleu_n(sample.tokens, ref->second, 1, options.bleu_smoothing);
    bleu2 += bleu_n(sample.tokens, ref->second, 2, options.bleu_smoothing);
    TokenSequence source = tokenize(sample.prompt);
    for (const auto& term : sample.aspects) {
      const auto t = tokenize(term);
      source.insert(source.end(), t.begin(), t.end());
    }
    rouge += rouge_l_precision(sample.tokens, source);
  }
  const double n = static_cast<double>(run.size());
  report.d1 = distinct_n(generations, 1);
  report.d2 = distinct_n(generations, 2);
  report.bleu1 = bleu1 / n;
  report.bleu2 = bleu2 / n;
  report.rouge_l_p = rouge / n;
  report.pct_comparative = percent_comparative(sentences, classifier);
  report.pct_aspect = percent_aspect(generations, aspects);
  return report;
}

}  // namespace cmpgen
