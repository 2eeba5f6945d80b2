#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cmpgen/aspects.hpp"
#include "cmpgen/decoding.hpp"
#include "cmpgen/extraction.hpp"

namespace cmpgen::app {

// Every knob of one pipeline run. Loaded from an INI file; see
// data/fixture/pipeline.ini for the full key list.
struct PipelineConfig {
  // [paths]; inputs resolve against the config file's directory, the output
  // directory against the working directory.
  std::filesystem::path reviews;
  std::filesystem::path labeled;
  std::filesystem::path lexicon;  // empty: built-in seed lexicon
  std::filesystem::path output_dir = "cmpgen-out";

  // [extraction]
  double threshold = 0.9;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  double classifier_holdout = 0.2;
  TrainOptions classifier;
  std::set<std::string> marker_words = PatternSet::default_marker_words();
  std::string model_number_pattern = PatternSet::kDefaultModelNumberPattern;

  // [aspects]
  AspectOptions aspects;

  // [lm]
  int order = 3;
  double discount = 0.75;
  std::size_t embedding_dim = 16;
  std::size_t embedding_window = 3;
  double source_weight = 0.2;

  // [decode]
  DecodeConfig decode;
  std::size_t samples_per_item = 1;

  // [metrics]
  bool bleu_smoothing = false;

  // [sweep]
  std::vector<double> sweep_alphas = {0.0, 0.2, 0.4};
  std::vector<double> sweep_betas = {0.0, 0.1, 0.2, 0.3};
  std::vector<std::size_t> sweep_ks = {5, 10};

  // [run]
  std::uint64_t seed = 13;

  PatternSet patterns() const { return PatternSet(marker_words, model_number_pattern); }
  std::filesystem::path output(const std::string& name) const { return output_dir / name; }

  // Value ranges and input-file existence. Throws ConfigError naming the
  // offending key or path.
  void validate() const;
};

inline constexpr const char* kOutputDirEnv = "CMPGEN_OUTPUT_DIR";

// Precedence, lowest first: built-in defaults, the file, the output-dir
// environment variable, `overrides` ("section.key=value"). Unknown keys are
// errors. Throws ConfigError, or IoError if the file cannot be read. An empty
// path means defaults only.
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});

}  // namespace cmpgen::app
