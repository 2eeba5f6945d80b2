#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmpgen/aspects.hpp"
#include "cmpgen/dataset.hpp"
#include "cmpgen/error.hpp"
#include "cmpgen/extraction.hpp"
#include "cmpgen/lm.hpp"
#include "cmpgen/metrics.hpp"
#include "cmpgen/run.hpp"
#include "cmpgen_app/config.hpp"

namespace cmpgen::app {

// File names inside the output directory.
namespace files {
inline constexpr const char* kClassifier = "classifier.json";
inline constexpr const char* kDataset = "dataset.jsonl";
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kLanguageModel = "lm.json";
inline constexpr const char* kEmbeddings = "embeddings.txt";
inline constexpr const char* kAspects = "aspects.jsonl";
inline constexpr const char* kGenerations = "generations.jsonl";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kSweep = "sweep.csv";
}  // namespace files

// Everything generate/evaluate/sweep read back from disk.
struct Artifacts {
  std::vector<Review> reviews;
  ComparativeDataset dataset;
  Classifier classifier{FeaturizerConfig{}};
  std::shared_ptr<const NGramLM> ngram;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const ReferenceLM> lm;
  std::map<std::string, std::vector<Aspect>> aspects;
};

Artifacts load_artifacts(const PipelineConfig& config);

// Items of the test split, sorted.
std::vector<std::string> test_items(const ComparativeDataset& dataset);

// First record of each item, preferring the test split, then val, then train.
std::map<std::string, TokenSequence> references(const ComparativeDataset& dataset);

struct GenerateRequest {
  std::vector<std::string> items;     // empty: test_items()
  std::optional<std::string> prompt;  // empty: the item's reviews by review_id
  std::size_t samples_per_item = 1;
  std::size_t prompt_offset = 0;      // shifts which review each sample uses
  bool trace = false;
};

// Sample j of an item is conditioned on review (prompt_offset + j) mod n in
// review_id order and decoded with seed config.seed + prompt_offset + j.
// Throws ConfigError for an item without reviews.
std::vector<GenerationRecord> generate_records(const Artifacts& artifacts,
                                               const PipelineConfig& config,
                                               const DecodeConfig& decode,
                                               const GenerateRequest& request);

EvalReport evaluate_run(const Artifacts& artifacts, const PipelineConfig& config,
                        const std::vector<GenerationRecord>& run);

// Commands. Each validates the config, writes its outputs under
// config.output_dir and logs a short summary to `log`. Errors propagate as
// ConfigError / IoError.
void cmd_build_dataset(const PipelineConfig& config, std::ostream& log);
void cmd_train(const PipelineConfig& config, std::ostream& log);
void cmd_generate(const PipelineConfig& config, const GenerateRequest& request,
                  const std::filesystem::path& output, std::ostream& log);
void cmd_evaluate(const PipelineConfig& config, const std::filesystem::path& run_path,
                  const std::filesystem::path& output, std::ostream& log);
void cmd_sweep(const PipelineConfig& config, const std::filesystem::path& output,
               std::ostream& log);

// Runs `body`, mapping ConfigError to 1 and IoError (or filesystem errors) to
// 2, with the message on `err`.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}


}  // namespace cmpgen::app
