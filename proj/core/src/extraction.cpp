#include "cmpgen/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "cmpgen/random.hpp"
#include "text_util.hpp"

namespace cmpgen {
namespace {

using nlohmann::json;

constexpr const char* kClassifierFormat = "cmpgen-classifier/1";

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::regex compile_pattern(const std::string& text) {
  try {
    return std::regex(text, std::regex::ECMAScript | std::regex::icase |
                                std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid model-number pattern '" + text + "': " + e.what());
  }
}

}  // namespace

const std::set<std::string>& PatternSet::default_marker_words() {
  static const std::set<std::string> words = {
      "than",    "better",   "worse",  "instead", "superior",
      "inferior", "compared", "prefer", "beats",   "versus"};
  return words;
}

PatternSet::PatternSet()
    : PatternSet(default_marker_words(), kDefaultModelNumberPattern) {}

PatternSet::PatternSet(std::set<std::string> marker_words,
                       std::string model_number_pattern)
    : marker_words_(std::move(marker_words)),
      pattern_text_(std::move(model_number_pattern)),
      pattern_(compile_pattern(pattern_text_)) {
  if (marker_words_.empty()) throw ConfigError("marker word list must not be empty");
}

bool PatternSet::matches_model_number(const std::string& raw_text) const {
  return std::regex_search(raw_text, pattern_);
}

bool match_comparative_candidates(const Sentence& sentence, const PatternSet& patterns) {
  for (const auto& token : sentence.tokens)
    if (patterns.is_marker(token)) return true;
  return patterns.matches_model_number(sentence.text);
}

std::uint32_t ngram_feature_index(const std::vector<std::string>& tokens,
                                  std::uint32_t dimension) {
  std::string key = std::to_string(tokens.size()) + ":";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back('\x1f');
    key += tokens[i];
  }
  return static_cast<std::uint32_t>(detail::fnv1a(key) % dimension);
}

std::uint32_t marker_feature_index(const std::string& marker, std::uint32_t dimension) {
  return static_cast<std::uint32_t>(detail::fnv1a("m:" + marker) % dimension);
}

SparseVector featurize(const Sentence& sentence, const FeaturizerConfig& config) {
  if (config.dimension == 0) throw ConfigError("feature dimension must be positive");
  std::vector<std::uint32_t> hits;
  const auto& tokens = sentence.tokens;
  for (int order : config.orders) {
    if (order < 1) throw ConfigError("n-gram orders must be >= 1");
    const auto n = static_cast<std::size_t>(order);
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
      hits.push_back(ngram_feature_index(gram, config.dimension));
    }
  }
  std::set<std::string> present;
  for (const auto& token : tokens)
    if (config.marker_words.contains(token)) present.insert(token);
  for (const auto& marker : present)
    hits.push_back(marker_feature_index(marker, config.dimension));

  std::sort(hits.begin(), hits.end());
  SparseVector features;
  for (std::uint32_t index : hits) {
    if (!features.empty() && features.back().first == index) {
      features.back().second += 1.0;
    } else {
      features.emplace_back(index, 1.0);
    }
  }
  return features;
}

Classifier::Classifier(FeaturizerConfig config)
    : Classifier(config, std::vector<double>(config.dimension, 0.0), 0.0) {}

Classifier::Classifier(FeaturizerConfig config, std::vector<double> weights, double bias)
    : config_(std::move(config)), weights_(std::move(weights)), bias_(bias) {
  if (weights_.size() != config_.dimension)
    throw ConfigError("classifier weight vector does not match feature dimension");
  if (!std::isfinite(bias_) ||
      !std::all_of(weights_.begin(), weights_.end(), [](double w) { return std::isfinite(w); }))
    throw ConfigError("classifier weights must be finite");
}

double Classifier::score(const SparseVector& features) const {
  double z = bias_;
  for (const auto& [index, value] : features) z += weights_[index] * value;
  return z;
}

double Classifier::score(const Sentence& sentence) const {
  return score(featurize(sentence, config_));
}

double Classifier::probability(const Sentence& sentence) const {
  return sigmoid(score(sentence));
}

std::string Classifier::to_json() const {
  json weights = json::array();
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] != 0.0) weights.push_back({i, weights_[i]});
  json j = {{"format", kClassifierFormat},
            {"featurizer",
             {{"orders", config_.orders},
              {"dimension", config_.dimension},
              {"marker_words", config_.marker_words}}},
            {"bias", bias_},
            {"weights", std::move(weights)}};
  return j.dump();
}

Classifier Classifier::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kClassifierFormat)
      throw ConfigError("not a classifier file (format mismatch)");
    FeaturizerConfig config;
    const auto& f = j.at("featurizer");
    config.orders = f.at("orders").get<std::vector<int>>();
    config.dimension = f.at("dimension").get<std::uint32_t>();
    config.marker_words = f.at("marker_words").get<std::set<std::string>>();
    std::vector<double> weights(config.dimension, 0.0);
    for (const auto& entry : j.at("weights")) {
      const auto index = entry.at(0).get<std::size_t>();
      if (index >= weights.size()) throw ConfigError("classifier weight index out of range");
      weights[index] = entry.at(1).get<double>();
    }
    return Classifier(std::move(config), std::move(weights), j.at("bias").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed classifier file: ") + e.what());
  }
}

void Classifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write classifier: " + path.string());
  out << to_json() << '\n';
  if (!out) throw IoError("error while writing classifier: " + path.string());
}

Classifier Classifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read classifier: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

Classifier train_classifier(const std::vector<LabeledSentence>& data,
                            const TrainOptions& options, FeaturizerConfig config) {
  if (data.empty()) throw ConfigError("cannot train a classifier on empty data");
  const bool has_pos = std::any_of(data.begin(), data.end(), [](const auto& d) {
    return d.label == Label::comparative;
  });
  const bool has_neg = std::any_of(data.begin(), data.end(), [](const auto& d) {
    return d.label == Label::non_comparative;
  });
  if (!has_pos || !has_neg)
    throw ConfigError("classifier training data must contain both classes");
  if (options.epochs < 1 || !(options.learning_rate > 0.0) || !(options.l2 >= 0.0))
    throw ConfigError("invalid classifier training options");

  std::vector<SparseVector> features;
  features.reserve(data.size());
  for (const auto& d : data) features.push_back(featurize(d.sentence, config));

  // Weights are stored as scale * v so the L2 shrinkage is O(1) per update.
  std::vector<double> v(config.dimension, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  const double lr = options.learning_rate;
  const double decay = 1.0 - lr * options.l2;
  if (!(decay > 0.0)) throw ConfigError("learning_rate * l2 must be < 1");

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(options.seed);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const SparseVector& x = features[idx];
      double z = bias;
      for (const auto& [i, value] : x) z += scale * v[i] * value;
      const double y = data[idx].label == Label::comparative ? 1.0 : 0.0;
      const double gradient = sigmoid(z) - y;

      scale *= decay;
      for (const auto& [i, value] : x) v[i] -= lr * gradient * value / scale;
      bias -= lr * gradient;

      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }
  for (double& w : v) w *= scale;
  return Classifier(std::move(config), std::move(v), bias);
}

LabeledSentence classify(const Classifier& classifier, const Sentence& sentence) {
  const double p = classifier.probability(sentence);
  LabeledSentence out;
  out.sentence = sentence;
  if (p > 0.5) {
    out.label = Label::comparative;
    out.confidence = p;
  } else {
    out.label = Label::non_comparative;
    out.confidence = 1.0 - p;
  }
  return out;
}

std::vector<ComparativeRecord> build_comparative_dataset(
    const std::vector<Review>& reviews, const Classifier& classifier,
    const PatternSet& patterns, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ConfigError("threshold must be in [0, 1]");
  std::vector<ComparativeRecord> records;
  for (const Review& review : reviews) {
    for (auto& sentence : split_sentences(review.text, review.review_id)) {
      if (!match_comparative_candidates(sentence, patterns)) continue;
      LabeledSentence labeled = classify(classifier, sentence);
      if (labeled.label != Label::comparative || !(labeled.confidence > threshold)) continue;
      records.push_back(ComparativeRecord{std::move(labeled), review.review_id,
                                          review.item_id, review.user_id});
    }
  }
  return records;
}

PRF1 PRF1::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRF1 r;
  const auto tpd = static_cast<double>(tp);
  r.precision = tp + fp > 0 ? tpd / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? tpd / static_cast<double>(tp + fn) : 0.0;
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

PRF1 evaluate_classifier(const Classifier& classifier,
                         const std::vector<LabeledSentence>& test) {
  if (test.empty()) throw ConfigError("cannot evaluate on an empty test set");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& example : test) {
    const bool predicted = classify(classifier, example.sentence).label == Label::comparative;
    const bool actual = example.label == Label::comparative;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
  }
  return PRF1::from_counts(tp, fp, fn);
}

std::vector<LabeledSentence> read_labeled_sentences(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read labeled sentences: " + path.string());
  std::vector<LabeledSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      LabeledSentence s;
      s.sentence.text = j.at("text").get<std::string>();
      s.sentence.tokens = tokenize(s.sentence.text);
      s.label = parse_label(j.at("label").get<std::string>());
      s.confidence = 1.0;
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed labeled sentence: " + e.what());
    }
  }
  return out;
}

}  // namespace cmpgen
