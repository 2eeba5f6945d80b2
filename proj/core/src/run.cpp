#include "cmpgen/run.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "cmpgen/error.hpp"
#include "text_util.hpp"

namespace cmpgen {

using nlohmann::ordered_json;

void write_generations(const std::vector<GenerationRecord>& records,
                       const std::filesystem::path& path, const Vocabulary* vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write generations: " + path.string());
  for (const auto& r : records) {
    ordered_json config = {{"mode", mode_name(r.config.mode)},
                           {"alpha", r.config.alpha},
                           {"beta", r.config.beta},
                           {"k", r.config.k},
                           {"bow_weight", r.config.bow_weight},
                           {"max_len", r.config.max_len},
                           {"seed", r.config.seed}};
    ordered_json j = {{"item_id", r.item_id},
                      {"prompt", r.prompt},
                      {"aspects", r.aspects},
                      {"config", std::move(config)},
                      {"tokens", r.tokens},
                      {"text", r.text}};
    if (r.trace) {
      ordered_json steps = ordered_json::array();
      for (const auto& step : *r.trace) {
        ordered_json rows = ordered_json::array();
        for (const auto& c : step.candidates) {
          ordered_json row;
          if (vocab) row["token"] = vocab->token(c.token);
          else row["token"] = c.token;
          row["confidence"] = c.confidence;
          row["degeneration"] = c.degeneration;
          row["aspect"] = c.aspect;
          row["total"] = c.total;
          rows.push_back(std::move(row));
        }
        ordered_json s;
        if (vocab) s["selected"] = vocab->token(step.selected);
        else s["selected"] = step.selected;
        s["candidates"] = std::move(rows);
        steps.push_back(std::move(s));
      }
      j["trace"] = std::move(steps);
    }
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("error while writing generations: " + path.string());
}

std::vector<GenerationRecord> read_generations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read generations: " + path.string());
  std::vector<GenerationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = ordered_json::parse(line);
      GenerationRecord r;
      r.item_id = j.at("item_id").get<std::string>();
      r.prompt = j.value("prompt", std::string());
      r.aspects = j.value("aspects", std::vector<std::string>{});
      if (j.contains("config")) {
        const auto& c = j.at("config");
        r.config.mode = parse_mode(c.value("mode", std::string("agg")));
        r.config.alpha = c.value("alpha", r.config.alpha);
        r.config.beta = c.value("beta", r.config.beta);
        r.config.k = c.value("k", r.config.k);
        r.config.bow_weight = c.value("bow_weight", r.config.bow_weight);
        r.config.max_len = c.value("max_len", r.config.max_len);
        r.config.seed = c.value("seed", r.config.seed);
      }
      r.tokens = j.at("tokens").get<TokenSequence>();
      r.text = j.value("text", std::string());
      out.push_back(std::move(r));
    } catch (const ordered_json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed generation record: " + e.what());
    }
  }
  return out;
}

}  // namespace cmpgen
