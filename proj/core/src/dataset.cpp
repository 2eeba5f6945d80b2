#include "cmpgen/dataset.hpp"

#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "cmpgen/random.hpp"
#include "text_util.hpp"

namespace cmpgen {

using nlohmann::json;

std::string_view label_name(Label label) {
  return label == Label::comparative ? "comparative" : "non_comparative";
}

Label parse_label(std::string_view name) {
  if (name == "comparative" || name == "1") return Label::comparative;
  if (name == "non_comparative" || name == "0") return Label::non_comparative;
  throw ConfigError("unknown label: " + std::string(name));
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

const std::vector<ComparativeRecord>& ComparativeDataset::records(Split split) const {
  switch (split) {
    case Split::val: return val;
    case Split::test: return test;
    case Split::train: break;
  }
  return train;
}

ComparativeDataset split_dataset(std::vector<ComparativeRecord> records,
                                 double val_fraction, double test_fraction,
                                 std::uint64_t seed, std::string name) {
  if (!(val_fraction >= 0.0) || !(test_fraction >= 0.0) ||
      !(val_fraction + test_fraction < 1.0)) {
    throw ConfigError("split fractions must be nonnegative and sum to less than 1");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const auto n = records.size();
  const auto n_test = static_cast<std::size_t>(test_fraction * static_cast<double>(n));
  const auto n_val = static_cast<std::size_t>(val_fraction * static_cast<double>(n));

  // Membership is decided by the shuffle; each split keeps original file order.
  std::vector<Split> assignment(n, Split::train);
  for (std::size_t r = 0; r < n; ++r) {
    if (r < n_test) assignment[order[r]] = Split::test;
    else if (r < n_test + n_val) assignment[order[r]] = Split::val;
  }

  ComparativeDataset dataset;
  dataset.name = std::move(name);
  for (std::size_t i = 0; i < n; ++i) {
    switch (assignment[i]) {
      case Split::train: dataset.train.push_back(std::move(records[i])); break;
      case Split::val: dataset.val.push_back(std::move(records[i])); break;
      case Split::test: dataset.test.push_back(std::move(records[i])); break;
    }
  }
  return dataset;
}

CorpusStats dataset_stats(const ComparativeDataset& dataset) {
  CorpusStats stats;
  stats.split_name = dataset.name;
  stats.n_train = dataset.train.size();
  stats.n_val = dataset.val.size();
  stats.n_test = dataset.test.size();
  std::set<std::string> items;
  for (Split s : {Split::train, Split::val, Split::test})
    for (const auto& r : dataset.records(s)) items.insert(r.item_id);
  stats.n_items = items.size();
  return stats;
}

void write_dataset(const ComparativeDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset: " + path.string());
  for (Split s : {Split::train, Split::val, Split::test}) {
    for (const auto& r : dataset.records(s)) {
      json j = {{"text", r.labeled.sentence.text},
                {"tokens", r.labeled.sentence.tokens},
                {"label", label_name(r.labeled.label)},
                {"confidence", r.labeled.confidence},
                {"review_id", r.review_id},
                {"item_id", r.item_id},
                {"user_id", r.user_id},
                {"split", split_name(s)}};
      out << j.dump() << '\n';
    }
  }
  if (!out) throw IoError("error while writing dataset: " + path.string());
}

ComparativeDataset read_dataset(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read dataset: " + path.string());
  ComparativeDataset dataset;
  dataset.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      ComparativeRecord r;
      r.labeled.sentence.text = j.at("text").get<std::string>();
      r.labeled.sentence.tokens = j.at("tokens").get<std::vector<std::string>>();
      r.labeled.sentence.source_review_id = j.at("review_id").get<std::string>();
      r.labeled.label = parse_label(j.at("label").get<std::string>());
      r.labeled.confidence = j.at("confidence").get<double>();
      r.review_id = j.at("review_id").get<std::string>();
      r.item_id = j.at("item_id").get<std::string>();
      r.user_id = j.value("user_id", std::string());
      const std::string split = j.value("split", std::string("train"));
      if (split == "test") dataset.test.push_back(std::move(r));
      else if (split == "val") dataset.val.push_back(std::move(r));
      else if (split == "train") dataset.train.push_back(std::move(r));
      else throw ConfigError("unknown split '" + split + "'");
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed dataset record: " + e.what());
    }
  }
  return dataset;
}

}  // namespace cmpgen
