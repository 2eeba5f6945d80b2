#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cmpgen/corpus.hpp"

namespace cmpgen {

enum class Label { non_comparative, comparative };

std::string_view label_name(Label label);
Label parse_label(std::string_view name);  // throws ConfigError

struct LabeledSentence {
  Sentence sentence;
  Label label = Label::non_comparative;
  double confidence = 0.0;  // probability of `label`, in [0, 1]
};

// One mined comparative sentence together with its provenance.
struct ComparativeRecord {
  LabeledSentence labeled;
  std::string review_id;
  std::string item_id;
  std::string user_id;
};

enum class Split { train, val, test };
std::string_view split_name(Split split);

struct ComparativeDataset {
  std::string name;
  std::vector<ComparativeRecord> train;
  std::vector<ComparativeRecord> val;
  std::vector<ComparativeRecord> test;

  const std::vector<ComparativeRecord>& records(Split split) const;
  std::size_t size() const { return train.size() + val.size() + test.size(); }
};

// Seeded record-level split. Fractions must be nonnegative and sum to < 1.
ComparativeDataset split_dataset(std::vector<ComparativeRecord> records,
                                 double val_fraction, double test_fraction,
                                 std::uint64_t seed, std::string name);

CorpusStats dataset_stats(const ComparativeDataset& dataset);

// JSONL, one record per line:
// {text, tokens, label, confidence, review_id, item_id, user_id, split}
void write_dataset(const ComparativeDataset& dataset,
                   const std::filesystem::path& path);
ComparativeDataset read_dataset(const std::filesystem::path& path,
                                std::string name);

}  // namespace cmpgen
