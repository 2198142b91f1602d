#pragma once

// JSON persistence: the embedding table, the trained model, corpus artifacts
// and the JSON-lines instance format.

#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "embolic/attention.hpp"
#include "embolic/corpus.hpp"
#include "embolic/hyperglove.hpp"
#include "embolic/inference.hpp"

namespace embolic {

using json = nlohmann::json;

// --- embedding table: {"vocab": [...], "discs": [[[re, im], ...], ...]} ---

inline json table_to_json(const WordEmbeddingTable& table) {
  json discs = json::array();
  for (const auto& disc : table.discs) {
    json points = json::array();
    for (const auto& p : disc) points.push_back({p.re(), p.im()});
    discs.push_back(std::move(points));
  }
  return json{{"vocab", table.vocab}, {"discs", std::move(discs)}};
}

inline WordEmbeddingTable table_from_json(const json& j) {
  WordEmbeddingTable table;
  table.vocab = j.at("vocab").get<std::vector<std::string>>();
  for (const auto& disc : j.at("discs")) {
    std::vector<DiscPoint> points;
    points.reserve(disc.size());
    for (const auto& p : disc) {
      points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    if (points.size() != table.vocab.size()) {
      throw ParseError("embedding table: disc size != vocab size");
    }
    table.discs.push_back(std::move(points));
  }
  return table;
}

// --- trained model -------------------------------------------------------

inline json model_to_json(const TrainedModel& model,
                          const std::map<std::string, std::string>& config_echo) {
  json corrections = json::array();
  for (const auto& g : model.corrections) {
    corrections.push_back({{"a", {g.a().re(), g.a().im()}},
                           {"theta", g.theta()}});
  }
  json directions = json::array();
  for (const auto& row : model.directions) {
    json angles = json::array();
    for (const auto& d : row) angles.push_back(d.psi());
    directions.push_back(std::move(angles));
  }
  return json{{"emotions", model.catalog.names()},
              {"vocab", model.table.vocab},
              {"discs", table_to_json(model.table).at("discs")},
              {"attention",
               {{"projection", model.attention.projection},
                {"bias", model.attention.bias}}},
              {"corrections", std::move(corrections)},
              {"directions", std::move(directions)},
              {"temperature", model.temperature},
              {"config_echo", config_echo}};
}

inline TrainedModel model_from_json(const json& j) {
  TrainedModel model;
  model.catalog =
      EmotionCatalog(j.at("emotions").get<std::vector<std::string>>());
  model.table = table_from_json(
      json{{"vocab", j.at("vocab")}, {"discs", j.at("discs")}});
  model.attention.projection =
      j.at("attention").at("projection").get<std::vector<double>>();
  model.attention.bias = j.at("attention").at("bias").get<double>();
  for (const auto& c : j.at("corrections")) {
    model.corrections.emplace_back(
        DiscPoint(c.at("a").at(0).get<double>(), c.at("a").at(1).get<double>()),
        c.at("theta").get<double>());
  }
  for (const auto& row : j.at("directions")) {
    std::vector<BoundaryDirection> dirs;
    for (const auto& psi : row) dirs.emplace_back(psi.get<double>());
    model.directions.push_back(std::move(dirs));
  }
  model.temperature = j.at("temperature").get<double>();
  model.validate();
  return model;
}

// --- JSON-lines instances: {"text": ..., "label": ...} per line ----------

inline ReadReport read_jsonl(std::istream& in, const EmotionCatalog& catalog) {
  ReadReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("text") || !j.contains("label") ||
        !j["text"].is_string() || !j["label"].is_string()) {
      report.warnings.push_back("line " + std::to_string(lineno) +
                                ": malformed instance");
      continue;
    }
    int label = catalog.find(j["label"].get<std::string>());
    if (label < 0) {
      report.warnings.push_back("line " + std::to_string(lineno) +
                                ": unknown label '" +
                                j["label"].get<std::string>() + "'");
      continue;
    }
    std::string id = j.contains("id") && j["id"].is_string()
                         ? j["id"].get<std::string>()
                         : std::to_string(lineno);
    report.instances.push_back(
        {j["text"].get<std::string>(), static_cast<std::size_t>(label), id});
  }
  if (report.instances.empty()) {
    throw ParseError("jsonl input: no valid lines");
  }
  return report;
}

/// One prediction record per line: text_id, true_label, probs, top5 names,
/// secure flag at the configured threshold.
inline std::string prediction_to_jsonl(const Prediction& p,
                                       const EmotionCatalog& catalog,
                                       double threshold) {
  auto ranked = rank_emotions(p.probs);
  json top5 = json::array();
  for (std::size_t t : p.top5) top5.push_back(catalog.name(t));
  json j{{"text_id", p.text_id},
         {"true_label", catalog.name(p.true_label)},
         {"probs", p.probs},
         {"top5", std::move(top5)},
         {"secure", p.probs[ranked[0]] >= threshold}};
  return j.dump();
}

}  // namespace embolic
