#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmpgen_app/config.hpp"
#include "cmpgen_app/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cmpgen::app;

int main(int argc, char** argv) {
  CLI::App app{"Comparative review generation pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "INI pipeline config");
  app.add_option("--set", overrides, "Override a config key: section.key=value")
      ->take_all();

  auto* build = app.add_subcommand("build-dataset", "Train the classifier and mine comparative sentences");
  auto* train = app.add_subcommand("train", "Train the language model, embeddings and aspects");

  auto* gen = app.add_subcommand("generate", "Generate comparative sentences");
  std::vector<std::string> items;
  std::string prompt;
  std::string gen_out;
  std::size_t samples = 0;
  bool trace = false;
  gen->add_option("--item", items, "Item id (repeatable); default: every test-split item");
  gen->add_option("--prompt", prompt, "Source review text; default: the item's own reviews");
  gen->add_option("--samples", samples, "Samples per item; default: decode.samples_per_item");
  gen->add_flag("--trace", trace, "Include per-step candidate scores");
  gen->add_option("-o,--out", gen_out, "Output JSONL; default: <output_dir>/generations.jsonl");

  auto* eval = app.add_subcommand("evaluate", "Score a generation run");
  std::string run_path;
  std::string eval_out;
  eval->add_option("run", run_path, "Generation JSONL; default: <output_dir>/generations.jsonl");
  eval->add_option("-o,--out", eval_out, "Report JSON; default: <output_dir>/report.json");

  auto* sweep = app.add_subcommand("sweep", "Grid over alpha, beta, k; writes a CSV of metrics");
  std::string sweep_out;
  sweep->add_option("-o,--out", sweep_out, "CSV path; default: <output_dir>/sweep.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  return guarded(std::cerr, [&] {
    const PipelineConfig config =
        load_config(config_path.empty() ? fs::path() : fs::path(config_path), overrides);
    if (*build) {
      cmd_build_dataset(config, std::cerr);
    } else if (*train) {
      cmd_train(config, std::cerr);
    } else if (*gen) {
      GenerateRequest request;
      request.items = items;
      if (gen->count("--prompt")) request.prompt = prompt;
      request.samples_per_item = samples > 0 ? samples : config.samples_per_item;
      request.trace = trace;
      cmd_generate(config, request,
                   gen_out.empty() ? config.output(files::kGenerations) : fs::path(gen_out),
                   std::cerr);
    } else if (*eval) {
      cmd_evaluate(config,
                   run_path.empty() ? config.output(files::kGenerations) : fs::path(run_path),
                   eval_out.empty() ? config.output(files::kReport) : fs::path(eval_out),
                   std::cout);
    } else if (*sweep) {
      cmd_sweep(config, sweep_out.empty() ? config.output(files::kSweep) : fs::path(sweep_out),
                std::cerr);
    }
  });
}
