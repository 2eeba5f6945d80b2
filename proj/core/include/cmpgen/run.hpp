#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cmpgen/decoding.hpp"

namespace cmpgen {

// One line of a generation run.
struct GenerationRecord {
  std::string item_id;
  std::string prompt;  // source review text
  std::vector<std::string> aspects;
  DecodeConfig config;
  TokenSequence tokens;
  std::string text;
  std::optional<std::vector<StepTrace>> trace;  // written only when present
};

// JSONL {item_id, prompt, aspects, config, tokens, text[, trace]}.
// Trace candidates are written with token strings resolved through `vocab`
// when it is given, otherwise as ids.
void write_generations(const std::vector<GenerationRecord>& records,
                       const std::filesystem::path& path,
                       const Vocabulary* vocab = nullptr);
// The trace is a diagnostic dump and is not read back.
std::vector<GenerationRecord> read_generations(const std::filesystem::path& path);

}  // namespace cmpgen
