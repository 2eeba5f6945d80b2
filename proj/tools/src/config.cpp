#include "cmpgen_app/config.hpp"

#include <cstdlib>
#include <fstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cmpgen/error.hpp"

namespace cmpgen::app {
namespace {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "paths.reviews", "paths.labeled", "paths.lexicon", "paths.output_dir",
      "extraction.threshold", "extraction.val_fraction", "extraction.test_fraction",
      "extraction.classifier_holdout", "extraction.epochs", "extraction.learning_rate",
      "extraction.l2", "extraction.markers", "extraction.model_pattern",
      "aspects.min_freq", "aspects.window",
      "lm.order", "lm.discount", "lm.embedding_dim", "lm.embedding_window", "lm.source_weight",
      "decode.mode", "decode.alpha", "decode.beta", "decode.k", "decode.bow_weight",
      "decode.max_len", "decode.samples_per_item",
      "metrics.bleu_smoothing",
      "sweep.alphas", "sweep.betas", "sweep.ks",
      "run.seed"};
  return keys;
}

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
  const std::string text = boost::trim_copy(raw);
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text.front() == '-') throw boost::bad_lexical_cast();
    }
    return boost::lexical_cast<T>(text);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("invalid value for " + key + ": '" + raw + "'");
  }
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& raw) {
  const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> parts;
  boost::split(parts, raw, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  for (const auto& p : split_list(raw)) out.push_back(parse_value<T>(key, p));
  if (out.empty()) throw ConfigError(key + " must list at least one value");
  return out;
}

fs::path resolve(const fs::path& base, const std::string& raw) {
  const fs::path p = boost::trim_copy(raw);
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

void apply(PipelineConfig& c, const std::string& key, const std::string& value,
           const fs::path& base) {
  if (key == "paths.reviews") c.reviews = resolve(base, value);
  else if (key == "paths.labeled") c.labeled = resolve(base, value);
  else if (key == "paths.lexicon") c.lexicon = resolve(base, value);
  else if (key == "paths.output_dir") c.output_dir = boost::trim_copy(value);
  else if (key == "extraction.threshold") c.threshold = parse_value<double>(key, value);
  else if (key == "extraction.val_fraction") c.val_fraction = parse_value<double>(key, value);
  else if (key == "extraction.test_fraction") c.test_fraction = parse_value<double>(key, value);
  else if (key == "extraction.classifier_holdout") c.classifier_holdout = parse_value<double>(key, value);
  else if (key == "extraction.epochs") c.classifier.epochs = parse_value<int>(key, value);
  else if (key == "extraction.learning_rate") c.classifier.learning_rate = parse_value<double>(key, value);
  else if (key == "extraction.l2") c.classifier.l2 = parse_value<double>(key, value);
  else if (key == "extraction.markers") {
    const auto words = split_list(value);
    c.marker_words = std::set<std::string>(words.begin(), words.end());
  } else if (key == "extraction.model_pattern") c.model_number_pattern = boost::trim_copy(value);
  else if (key == "aspects.min_freq") c.aspects.min_freq = parse_value<std::size_t>(key, value);
  else if (key == "aspects.window") c.aspects.window = parse_value<std::size_t>(key, value);
  else if (key == "lm.order") c.order = parse_value<int>(key, value);
  else if (key == "lm.discount") c.discount = parse_value<double>(key, value);
  else if (key == "lm.embedding_dim") c.embedding_dim = parse_value<std::size_t>(key, value);
  else if (key == "lm.embedding_window") c.embedding_window = parse_value<std::size_t>(key, value);
  else if (key == "lm.source_weight") c.source_weight = parse_value<double>(key, value);
  else if (key == "decode.mode") c.decode.mode = parse_mode(boost::trim_copy(value));
  else if (key == "decode.alpha") c.decode.alpha = parse_value<double>(key, value);
  else if (key == "decode.beta") c.decode.beta = parse_value<double>(key, value);
  else if (key == "decode.k") c.decode.k = parse_value<std::size_t>(key, value);
  else if (key == "decode.bow_weight") c.decode.bow_weight = parse_value<double>(key, value);
  else if (key == "decode.max_len") c.decode.max_len = parse_value<std::size_t>(key, value);
  else if (key == "decode.samples_per_item") c.samples_per_item = parse_value<std::size_t>(key, value);
  else if (key == "metrics.bleu_smoothing") c.bleu_smoothing = parse_value<bool>(key, value);
  else if (key == "sweep.alphas") c.sweep_alphas = parse_list<double>(key, value);
  else if (key == "sweep.betas") c.sweep_betas = parse_list<double>(key, value);
  else if (key == "sweep.ks") c.sweep_ks = parse_list<std::size_t>(key, value);
  else if (key == "run.seed") c.seed = parse_value<std::uint64_t>(key, value);
  else throw ConfigError("unknown config key: " + key);
}

void require_fraction(const std::string& key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(key + " must be in [0, 1]");
}

void require_file(const std::string& key, const fs::path& p) {
  if (p.empty()) throw ConfigError(key + " is not set");
  if (!fs::is_regular_file(p)) throw ConfigError(key + ": no such file: " + p.string());
}

}  // namespace

void PipelineConfig::validate() const {
  require_file("paths.reviews", reviews);
  require_file("paths.labeled", labeled);
  if (!lexicon.empty()) require_file("paths.lexicon", lexicon);
  if (output_dir.empty()) throw ConfigError("paths.output_dir is empty");
  require_fraction("extraction.threshold", threshold);
  require_fraction("extraction.classifier_holdout", classifier_holdout);
  if (!(classifier_holdout < 1.0)) throw ConfigError("extraction.classifier_holdout must be < 1");
  if (!(val_fraction >= 0.0 && test_fraction >= 0.0 && val_fraction + test_fraction < 1.0))
    throw ConfigError("extraction.val_fraction + extraction.test_fraction must be in [0, 1)");
  if (classifier.epochs < 1) throw ConfigError("extraction.epochs must be >= 1");
  if (!(classifier.learning_rate > 0.0)) throw ConfigError("extraction.learning_rate must be > 0");
  if (!(classifier.l2 >= 0.0)) throw ConfigError("extraction.l2 must be >= 0");
  (void)patterns();
  if (aspects.min_freq == 0) throw ConfigError("aspects.min_freq must be >= 1");
  if (aspects.window == 0) throw ConfigError("aspects.window must be >= 1");
  if (order < 1) throw ConfigError("lm.order must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("lm.discount must be in (0, 1)");
  if (embedding_dim == 0) throw ConfigError("lm.embedding_dim must be >= 1");
  if (embedding_window == 0) throw ConfigError("lm.embedding_window must be >= 1");
  require_fraction("lm.source_weight", source_weight);
  decode.validate();
  if (samples_per_item == 0) throw ConfigError("decode.samples_per_item must be >= 1");
  for (double a : sweep_alphas) require_fraction("sweep.alphas", a);
  for (double b : sweep_betas) require_fraction("sweep.betas", b);
  for (std::size_t k : sweep_ks)
    if (k == 0) throw ConfigError("sweep.ks must be >= 1");
}

PipelineConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  PipelineConfig config;
  fs::path base = fs::current_path();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path.string());
    pt::ptree tree;
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("malformed config file " + path.string() + ": " + e.message());
    }
    base = fs::absolute(path).parent_path();
    for (const auto& [section, entries] : tree) {
      if (entries.empty() && !entries.data().empty())
        throw ConfigError("config key outside a section: " + section);
      for (const auto& [key, value] : entries) {
        const std::string full = section + "." + key;
        if (!known_keys().contains(full)) throw ConfigError("unknown config key: " + full);
        apply(config, full, value.data(), base);
      }
    }
  }
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) config.output_dir = env;
  for (const auto& assignment : overrides) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like section.key=value: " + assignment);
    const std::string key = boost::trim_copy(assignment.substr(0, eq));
    if (!known_keys().contains(key)) throw ConfigError("unknown config key: " + key);
    apply(config, key, assignment.substr(eq + 1), fs::current_path());
  }
  return config;
}

}  // namespace cmpgen::app
