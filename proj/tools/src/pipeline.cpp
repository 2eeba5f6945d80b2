#include "cmpgen_app/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "cmpgen/decoding.hpp"
#include "cmpgen/error.hpp"
#include "cmpgen/random.hpp"

namespace cmpgen::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error while writing " + path.string());
}

void ensure_output_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir))
    throw IoError("cannot create output directory " + config.output_dir.string());
}

void require_artifact(const fs::path& path, const char* producer) {
  if (!fs::is_regular_file(path))
    throw IoError("missing " + path.string() + " (run '" + producer + "' first)");
}

SentimentLexicon lexicon_for(const PipelineConfig& config) {
  return config.lexicon.empty() ? SentimentLexicon::seed()
                                : SentimentLexicon::load(config.lexicon);
}

std::vector<TokenSequence> training_sentences(const ComparativeDataset& dataset) {
  std::vector<TokenSequence> out;
  for (const auto& r : dataset.train)
    if (!r.labeled.sentence.tokens.empty()) out.push_back(r.labeled.sentence.tokens);
  return out;
}

std::string format_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void cmd_build_dataset(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);

  const LoadResult loaded = load_reviews(config.reviews);
  log << "loaded " << loaded.reviews.size() << " reviews (" << loaded.skipped << " skipped, "
      << loaded.clamped_ratings << " ratings clamped)\n";

  auto labeled = read_labeled_sentences(config.labeled);
  std::vector<std::size_t> order(labeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  rng.shuffle(order);
  const auto n_holdout = static_cast<std::size_t>(config.classifier_holdout *
                                                  static_cast<double>(labeled.size()));
  std::vector<LabeledSentence> train, holdout;
  for (std::size_t r = 0; r < order.size(); ++r)
    (r < n_holdout ? holdout : train).push_back(labeled[order[r]]);

  TrainOptions options = config.classifier;
  options.seed = config.seed;
  const Classifier classifier = train_classifier(train, options);
  classifier.save(config.output(files::kClassifier));

  ordered_json clf_stats = {{"train_sentences", train.size()},
                            {"holdout_sentences", holdout.size()}};
  if (!holdout.empty()) {
    const PRF1 m = evaluate_classifier(classifier, holdout);
    clf_stats["precision"] = m.precision;
    clf_stats["recall"] = m.recall;
    clf_stats["f1"] = m.f1;
    log << "classifier holdout F1 " << format_fixed(m.f1) << " on " << holdout.size()
        << " sentences\n";
  }

  auto records =
      build_comparative_dataset(loaded.reviews, classifier, config.patterns(), config.threshold);
  const ComparativeDataset dataset =
      split_dataset(std::move(records), config.val_fraction, config.test_fraction, config.seed,
                    config.reviews.stem().string());
  write_dataset(dataset, config.output(files::kDataset));

  const CorpusStats stats = dataset_stats(dataset);
  ordered_json j = {{"dataset", stats.split_name},
                    {"train", stats.n_train},
                    {"val", stats.n_val},
                    {"test", stats.n_test},
                    {"items", stats.n_items},
                    {"threshold", config.threshold},
                    {"classifier", clf_stats}};
  write_text(config.output(files::kStats), j.dump(2) + "\n");
  log << stats_to_table({stats});
  if (dataset.size() == 0) log << "warning: no sentence passed the confidence threshold\n";
}

void cmd_train(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);
  require_artifact(config.output(files::kDataset), "build-dataset");

  const ComparativeDataset dataset = read_dataset(config.output(files::kDataset), "dataset");
  const auto lm_corpus = training_sentences(dataset);
  if (lm_corpus.empty()) throw ConfigError("the dataset has no training sentences");

  const auto reviews = load_reviews(config.reviews).reviews;
  std::vector<TokenSequence> embedding_corpus = lm_corpus;
  for (const auto& s : review_sentences(reviews)) embedding_corpus.push_back(s.tokens);

  const Vocabulary vocab = Vocabulary::build(embedding_corpus);
  const NGramLM ngram = NGramLM::train(lm_corpus, vocab, config.order, config.discount);
  ngram.save(config.output(files::kLanguageModel));

  const EmbeddingTable embeddings =
      train_embeddings(embedding_corpus, vocab, config.embedding_dim, config.embedding_window);
  embeddings.save(config.output(files::kEmbeddings));

  const auto aspects = positive_aspects_by_item(reviews, lexicon_for(config), config.aspects);
  write_aspects(aspects, config.output(files::kAspects));

  std::size_t n_aspects = 0;
  for (const auto& [item, list] : aspects) n_aspects += list.size();
  log << "language model: order " << config.order << ", " << lm_corpus.size()
      << " sentences, vocabulary " << vocab.size() << "\n"
      << "embeddings: " << embedding_corpus.size() << " sentences, dimension "
      << config.embedding_dim << "\n"
      << "aspects: " << n_aspects << " positive terms over " << aspects.size() << " items\n";
}

Artifacts load_artifacts(const PipelineConfig& config) {
  for (const char* name : {files::kDataset, files::kClassifier})
    require_artifact(config.output(name), "build-dataset");
  for (const char* name : {files::kLanguageModel, files::kEmbeddings, files::kAspects})
    require_artifact(config.output(name), "train");

  Artifacts a;
  a.reviews = load_reviews(config.reviews).reviews;
  a.dataset = read_dataset(config.output(files::kDataset), config.reviews.stem().string());
  a.classifier = Classifier::load(config.output(files::kClassifier));
  a.ngram = std::make_shared<const NGramLM>(NGramLM::load(config.output(files::kLanguageModel)));
  a.embeddings = std::make_shared<const EmbeddingTable>(
      EmbeddingTable::load(config.output(files::kEmbeddings)));
  a.lm = std::make_shared<const ReferenceLM>(a.ngram, a.embeddings);
  a.aspects = read_aspects(config.output(files::kAspects));
  return a;
}

std::vector<std::string> test_items(const ComparativeDataset& dataset) {
  std::set<std::string> items;
  for (const auto& r : dataset.test) items.insert(r.item_id);
  return {items.begin(), items.end()};
}

std::map<std::string, TokenSequence> references(const ComparativeDataset& dataset) {
  std::map<std::string, TokenSequence> refs;
  for (Split split : {Split::test, Split::val, Split::train})
    for (const auto& r : dataset.records(split))
      refs.try_emplace(r.item_id, r.labeled.sentence.tokens);
  return refs;
}

std::vector<GenerationRecord> generate_records(const Artifacts& artifacts,
                                               const PipelineConfig& config,
                                               const DecodeConfig& decode,
                                               const GenerateRequest& request) {
  decode.validate();
  if (request.samples_per_item == 0) throw ConfigError("samples_per_item must be >= 1");
  const auto items = request.items.empty() ? test_items(artifacts.dataset) : request.items;
  const Vocabulary& vocab = artifacts.lm->vocabulary();

  std::vector<GenerationRecord> out;
  for (const auto& item : items) {
    std::vector<const Review*> item_reviews;
    for (const auto& r : artifacts.reviews)
      if (r.item_id == item) item_reviews.push_back(&r);
    if (item_reviews.empty()) throw ConfigError("unknown item: " + item);
    std::sort(item_reviews.begin(), item_reviews.end(),
              [](const Review* a, const Review* b) { return a->review_id < b->review_id; });

    std::vector<std::string> terms;
    if (const auto it = artifacts.aspects.find(item); it != artifacts.aspects.end())
      for (const auto& a : it->second) terms.push_back(a.term);

    for (std::size_t j = 0; j < request.samples_per_item; ++j) {
      const std::size_t slot = request.prompt_offset + j;
      const std::string prompt =
          request.prompt ? *request.prompt : item_reviews[slot % item_reviews.size()]->text;
      const auto source = vocab.encode(tokenize(prompt));
      const SourceMixtureLM conditioned(*artifacts.lm, source, config.source_weight);

      DecodeConfig cfg = decode;
      cfg.seed = config.seed + slot;
      GenerationResult result = generate(conditioned, {}, terms, cfg);

      GenerationRecord record;
      record.item_id = item;
      record.prompt = prompt;
      record.aspects = terms;
      record.config = cfg;
      record.tokens = std::move(result.tokens);
      record.text = join_tokens(record.tokens);
      if (request.trace) record.trace = std::move(result.steps);
      out.push_back(std::move(record));
    }
  }
  return out;
}

EvalReport evaluate_run(const Artifacts& artifacts, const PipelineConfig& config,
                        const std::vector<GenerationRecord>& run) {
  MetricOptions options;
  options.bleu_smoothing = config.bleu_smoothing;
  return evaluate_all(run, references(artifacts.dataset), artifacts.classifier, options);
}

void cmd_generate(const PipelineConfig& config, const GenerateRequest& request,
                  const fs::path& output, std::ostream& log) {
  config.validate();
  const Artifacts artifacts = load_artifacts(config);
  const auto records = generate_records(artifacts, config, config.decode, request);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_generations(records, output, &artifacts.lm->vocabulary());
  log << "wrote " << records.size() << " generations (" << mode_name(config.decode.mode)
      << ") to " << output.string() << "\n";
}

void cmd_evaluate(const PipelineConfig& config, const fs::path& run_path, const fs::path& output,
                  std::ostream& log) {
  config.validate();
  const auto run = read_generations(run_path);
  const Artifacts artifacts = load_artifacts(config);
  const EvalReport report = evaluate_run(artifacts, config, run);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_text(output, report.to_json() + "\n");
  const std::string label = run.empty() ? "run" : std::string(mode_name(run.front().config.mode));
  log << report_table({{label, report}});
}

void cmd_sweep(const PipelineConfig& config, const fs::path& output, std::ostream& log) {
  config.validate();
  const Artifacts artifacts = load_artifacts(config);
  GenerateRequest request;
  request.samples_per_item = config.samples_per_item;

  std::string csv =
      "alpha,beta,k,d1,d2,bleu1,bleu2,rouge_l_p,pct_comparative,pct_aspect,n_samples\n";
  std::size_t cells = 0;
  for (double alpha : config.sweep_alphas) {
    for (double beta : config.sweep_betas) {
      if (alpha + beta > 1.0) continue;
      for (std::size_t k : config.sweep_ks) {
        DecodeConfig decode = config.decode;
        decode.mode = DecodeMode::agg;
        decode.alpha = alpha;
        decode.beta = beta;
        decode.k = k;
        const auto run = generate_records(artifacts, config, decode, request);
        const EvalReport r = evaluate_run(artifacts, config, run);
        csv += format_fixed(alpha) + "," + format_fixed(beta) + "," + std::to_string(k);
        for (double v : {r.d1, r.d2, r.bleu1, r.bleu2, r.rouge_l_p, r.pct_comparative,
                         r.pct_aspect})
          csv += "," + format_fixed(v);
        csv += "," + std::to_string(r.n_samples) + "\n";
        ++cells;
      }
    }
  }
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_text(output, csv);
  log << "wrote " << cells << " sweep cells to " << output.string() << "\n";
}

}  // namespace cmpgen::app
