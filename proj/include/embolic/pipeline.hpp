#pragma once

// Staged pipeline: ingestion, embedding, attention training, direction
// fitting, evaluation, prediction and plot emission. Stages communicate
// through JSON artifacts in the output directory; all writes are atomic
// (write-to-temp, rename) and every run of a stage with the same inputs is
// byte-identical.

#include <cerrno>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "embolic/attention.hpp"
#include "embolic/barycenter.hpp"
#include "embolic/corpus.hpp"
#include "embolic/disc_geometry.hpp"
#include "embolic/hyperglove.hpp"
#include "embolic/inference.hpp"
#include "embolic/model_io.hpp"
#include "embolic/svg.hpp"
#include "embolic/training.hpp"
#include "embolic/util.hpp"

namespace embolic {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration: flat key = value text file plus command-line overrides
// (overrides win). The effective configuration is echoed into the model file.
// ---------------------------------------------------------------------------

class PipelineConfig {
 public:
  PipelineConfig() { values_ = defaults(); }

  static std::map<std::string, std::string> defaults() {
    return {{"input", ""},
            {"format", "auto"},          // goemotions | jsonl | auto
            {"out", "out"},
            {"catalog", "goemotions"},   // goemotions | auto
            {"discs", "3"},
            {"seed", "42"},
            {"temperature", "0.05"},
            {"threshold", "0.2"},
            {"min_count", "2"},
            {"test_per_emotion", "5"},
            {"color_threshold", "0.8"},
            {"stopwords", ""},           // empty: built-in list
            {"retained", ""},
            {"glove.alpha", "1"},
            {"glove.lambda", "0.01"},
            {"glove.lr", "0.05"},
            {"glove.epochs", "300"},
            {"glove.init_concentration", "10"},
            {"train.batch_size", "64"},
            {"train.epochs", "50"},
            {"train.lr", "0.05"},
            {"train.lambda", "0.01"},
            {"train.pairs_per_batch", "64"},
            {"train.fd_step", "0.0001"},
            {"solver.grad_tolerance", "1e-8"},
            {"solver.max_iterations", "500"}};
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": expected key = value");
        }
        continue;
      }
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw ConfigError("unknown config key: " + key);
    values_[key] = value;
  }

  const std::string& str(const std::string& key) const {
    return values_.at(key);
  }

  double num(const std::string& key) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(values_.at(key), &pos);
      if (pos != values_.at(key).size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number: '" +
                        values_.at(key) + "'");
    }
  }

  std::uint64_t uint(const std::string& key) const {
    double v = num(key);
    if (v < 0 || v != std::floor(v)) {
      throw ConfigError("config key '" + key + "': not a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
  }

  const std::map<std::string, std::string>& echo() const { return values_; }

  GloveConfig glove() const {
    GloveConfig g;
    g.alpha = num("glove.alpha");
    g.lambda_reg = num("glove.lambda");
    g.learning_rate = num("glove.lr");
    g.epochs = uint("glove.epochs");
    g.init_concentration = num("glove.init_concentration");
    g.seed = uint("seed");
    return g;
  }

  TrainConfig train() const {
    TrainConfig t;
    t.batch_size = uint("train.batch_size");
    t.epochs = uint("train.epochs");
    t.learning_rate = num("train.lr");
    t.lambda_boundary = num("train.lambda");
    t.pairs_per_batch = uint("train.pairs_per_batch");
    t.fd_step = num("train.fd_step");
    t.seed = uint("seed");
    return t;
  }

  SolverOptions solver() const {
    SolverOptions s;
    s.grad_tolerance = num("solver.grad_tolerance");
    s.max_iterations = uint("solver.max_iterations");
    return s;
  }

  PreprocessConfig preprocess() const {
    PreprocessConfig p = PreprocessConfig::defaults();
    if (!str("stopwords").empty()) {
      p.stopwords.clear();
      detail::load_word_list(str("stopwords"), p.stopwords);
    }
    if (!str("retained").empty()) {
      p.retained.clear();
      detail::load_word_list(str("retained"), p.retained);
    }
    return p;
  }

 private:
  static std::string trim(std::string s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Filesystem helpers
// ---------------------------------------------------------------------------

inline void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string());
}

inline json load_json_artifact(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MissingArtifactError("missing artifact: " + path.string() +
                               " (run the upstream stage first)");
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError("malformed artifact: " + path.string());
  }
  return j;
}

/// Single-instance-per-output-directory lock. Held for the duration of a
/// stage run.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw IoError("output directory is locked by another run: " +
                    path_.string());
    }
    std::fclose(f);
  }

  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------
// Stage runners
// ---------------------------------------------------------------------------

struct TokenizedInstance {
  std::string id;
  std::size_t label = 0;
  std::vector<std::string> tokens;
};

struct CorpusArtifact {
  EmotionCatalog catalog = EmotionCatalog::goemotions();
  std::vector<TokenizedInstance> train;
  std::vector<TokenizedInstance> test;
};

namespace detail {

inline json tokenized_to_json(const std::vector<TokenizedInstance>& items) {
  json arr = json::array();
  for (const auto& it : items) {
    arr.push_back(
        {{"id", it.id}, {"label", it.label}, {"tokens", it.tokens}});
  }
  return arr;
}

inline std::vector<TokenizedInstance> tokenized_from_json(const json& arr) {
  std::vector<TokenizedInstance> out;
  for (const auto& j : arr) {
    out.push_back({j.at("id").get<std::string>(),
                   j.at("label").get<std::size_t>(),
                   j.at("tokens").get<std::vector<std::string>>()});
  }
  return out;
}

}  // namespace detail

inline CorpusArtifact load_corpus(const fs::path& out_dir) {
  json j = load_json_artifact(out_dir / "corpus.json");
  CorpusArtifact c;
  c.catalog = EmotionCatalog(j.at("emotions").get<std::vector<std::string>>());
  c.train = detail::tokenized_from_json(j.at("train"));
  c.test = detail::tokenized_from_json(j.at("test"));
  return c;
}

inline CooccurrenceMatrix load_matrix(const fs::path& out_dir) {
  json j = load_json_artifact(out_dir / "matrix.json");
  CooccurrenceMatrix m;
  m.vocab = j.at("vocab").get<std::vector<std::string>>();
  m.emotions = j.at("emotions").get<std::size_t>();
  for (const auto& row : j.at("rows")) {
    m.rows.push_back(row.get<std::vector<double>>());
  }
  return m;
}

/// preprocess: ingest, split, tokenize, build M. Writes corpus.json and
/// matrix.json.
inline void run_preprocess(const PipelineConfig& cfg) {
  const std::string input = cfg.str("input");
  if (input.empty()) throw ConfigError("config key 'input' is required");
  std::ifstream in(input, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open input: " + input);

  std::string format = cfg.str("format");
  if (format == "auto") {
    format = input.size() >= 4 && input.substr(input.size() - 4) == ".tsv"
                 ? "goemotions"
                 : "jsonl";
  }

  ReadReport report;
  EmotionCatalog catalog = EmotionCatalog::goemotions();
  if (format == "goemotions") {
    report = read_goemotions_tsv(in, catalog);
  } else if (format == "jsonl") {
    if (cfg.str("catalog") == "auto") {
      // first pass: collect labels
      json probe;
      std::set<std::string> labels;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        probe = json::parse(line, nullptr, false);
        if (!probe.is_discarded() && probe.contains("label") &&
            probe["label"].is_string()) {
          std::string l = probe["label"].get<std::string>();
          labels.insert(l == "indifference" ? "neutral" : l);
        }
      }
      if (labels.empty()) throw ParseError("jsonl input: no valid lines");
      catalog = EmotionCatalog(
          std::vector<std::string>(labels.begin(), labels.end()));
      in.clear();
      in.seekg(0);
    }
    report = read_jsonl(in, catalog);
  } else {
    throw ConfigError("unknown input format: " + format);
  }
  for (const auto& w : report.warnings) {
    std::cerr << "warning: " << input << ": " << w << "\n";
  }

  SeededRng rng(cfg.uint("seed"));
  std::vector<Instance> train_inst, test_inst;
  split_train_test(report.instances, catalog, cfg.uint("test_per_emotion"),
                   rng, train_inst, test_inst);

  PreprocessConfig pre = cfg.preprocess();
  auto tokenize_all = [&](const std::vector<Instance>& src) {
    std::vector<TokenizedInstance> out;
    out.reserve(src.size());
    for (const auto& inst : src) {
      out.push_back({inst.id, inst.label, preprocess_text(inst.text, pre)});
    }
    return out;
  };
  CorpusArtifact corpus;
  corpus.catalog = catalog;
  corpus.train = tokenize_all(train_inst);
  corpus.test = tokenize_all(test_inst);

  std::vector<std::vector<std::string>> train_tokens;
  std::vector<std::size_t> train_labels;
  for (const auto& t : corpus.train) {
    train_tokens.push_back(t.tokens);
    train_labels.push_back(t.label);
  }
  CorpusConfig corpus_cfg;
  corpus_cfg.preprocess = pre;
  corpus_cfg.min_count = cfg.uint("min_count");
  CooccurrenceMatrix m =
      build_cooccurrence(train_tokens, train_labels, catalog, corpus_cfg);

  const fs::path out_dir = cfg.str("out");
  json corpus_json{{"emotions", catalog.names()},
                   {"train", detail::tokenized_to_json(corpus.train)},
                   {"test", detail::tokenized_to_json(corpus.test)}};
  atomic_write(out_dir / "corpus.json", corpus_json.dump(1));

  json rows = json::array();
  for (const auto& row : m.rows) rows.push_back(row);
  json matrix_json{{"vocab", m.vocab},
                   {"emotions", m.emotions},
                   {"rows", std::move(rows)}};
  atomic_write(out_dir / "matrix.json", matrix_json.dump(1));

  std::cout << "preprocess: " << corpus.train.size() << " train / "
            << corpus.test.size() << " test instances, |V| = "
            << m.vocab.size() << "\n";
}

/// embed: similarity from the persisted M, k independent disc fits.
inline void run_embed(const PipelineConfig& cfg) {
  const fs::path out_dir = cfg.str("out");
  CooccurrenceMatrix m = load_matrix(out_dir);
  SimilarityMatrix s = build_similarity(m);
  WordEmbeddingTable table =
      fit_embeddings(s, cfg.uint("discs"), cfg.glove(), m.vocab);
  atomic_write(out_dir / "embeddings.json", table_to_json(table).dump(1));
  std::cout << "embed: " << table.k() << " discs over |V| = "
            << table.vocab.size() << " words\n";
}

/// train: contrastive training of the attention parameters.
inline void run_train(const PipelineConfig& cfg) {
  const fs::path out_dir = cfg.str("out");
  CorpusArtifact corpus = load_corpus(out_dir);
  WordEmbeddingTable table =
      table_from_json(load_json_artifact(out_dir / "embeddings.json"));

  std::vector<MessageEmbedding> messages;
  std::vector<std::size_t> labels;
  for (const auto& inst : corpus.train) {
    messages.push_back(embed_message(table, inst.tokens));
    labels.push_back(inst.label);
  }
  TrainingResult result =
      train_attention(messages, labels, table.k(), cfg.train(), cfg.solver());

  json attention_json{{"projection", result.params.projection},
                      {"bias", result.params.bias}};
  atomic_write(out_dir / "attention.json", attention_json.dump(1));

  CsvWriter trace({"epoch", "batch", "loss"});
  for (const auto& e : result.trace) {
    trace.append_row({std::to_string(e.epoch), std::to_string(e.batch),
                      fmt_double(e.loss)});
  }
  atomic_write(out_dir / "loss_trace.csv", trace.str());
  double final_loss = result.trace.empty() ? 0.0 : result.trace.back().loss;
  std::cout << "train: " << result.trace.size() << " batches, final loss "
            << fmt_double(final_loss) << "\n";
}

/// fit-directions: pooled training points, per-disc epicenter + correction,
/// class directions. Writes model.json.
inline void run_fit_directions(const PipelineConfig& cfg) {
  const fs::path out_dir = cfg.str("out");
  CorpusArtifact corpus = load_corpus(out_dir);
  TrainedModel model;
  model.catalog = corpus.catalog;
  model.table =
      table_from_json(load_json_artifact(out_dir / "embeddings.json"));
  json aj = load_json_artifact(out_dir / "attention.json");
  model.attention.projection =
      aj.at("projection").get<std::vector<double>>();
  model.attention.bias = aj.at("bias").get<double>();
  model.temperature = cfg.num("temperature");
  model.solver = cfg.solver();

  std::vector<MultiDiscPoint> pooled;
  std::vector<std::size_t> labels;
  for (const auto& inst : corpus.train) {
    MessageEmbedding msg = embed_message(model.table, inst.tokens);
    pooled.push_back(message_representation(model.attention, msg,
                                            model.table.k(), model.solver));
    labels.push_back(inst.label);
  }

  for (std::size_t d = 0; d < model.table.k(); ++d) {
    std::vector<DiscPoint> disc_points;
    disc_points.reserve(pooled.size());
    for (const auto& p : pooled) disc_points.push_back(p[d]);
    DiscPoint epicenter = compute_epicenter(disc_points, model.solver);
    MoebiusTransform correction(epicenter, 0.0);
    std::vector<DiscPoint> corrected;
    corrected.reserve(disc_points.size());
    for (const auto& p : disc_points) corrected.push_back(correction.apply(p));
    model.corrections.push_back(correction);
    model.directions.push_back(
        fit_class_directions(corrected, labels, model.catalog.size()));
  }
  model.validate();
  atomic_write(out_dir / "model.json",
               model_to_json(model, cfg.echo()).dump(1));
  std::cout << "fit-directions: " << model.table.k() << " discs, "
            << model.catalog.size() << " directions per disc\n";
}

inline TrainedModel load_model(const fs::path& out_dir) {
  return model_from_json(load_json_artifact(out_dir / "model.json"));
}

inline std::vector<Prediction> predict_testset(const TrainedModel& model,
                                               const CorpusArtifact& corpus) {
  std::vector<Prediction> predictions;
  for (const auto& inst : corpus.test) {
    MessageEmbedding msg = embed_message(model.table, inst.tokens);
    ScoreVector sv = score_message(model, msg);
    Prediction p;
    p.text_id = inst.id;
    p.true_label = inst.label;
    p.probs = sv.probs;
    auto ranked = rank_emotions(sv.probs);
    for (std::size_t m = 0; m < std::min<std::size_t>(5, ranked.size()); ++m) {
      p.top5.push_back(ranked[m]);
    }
    predictions.push_back(std::move(p));
  }
  return predictions;
}

/// evaluate: predictions.jsonl plus a fixed-format accuracy/confidence table.
inline AccuracyReport run_evaluate(const PipelineConfig& cfg) {
  const fs::path out_dir = cfg.str("out");
  TrainedModel model = load_model(out_dir);
  CorpusArtifact corpus = load_corpus(out_dir);
  if (corpus.test.empty()) {
    throw DomainError("evaluate: empty test set");
  }
  double threshold = cfg.num("threshold");
  std::vector<Prediction> predictions = predict_testset(model, corpus);

  std::string lines;
  for (const auto& p : predictions) {
    lines += prediction_to_jsonl(p, model.catalog, threshold);
    lines += '\n';
  }
  atomic_write(out_dir / "predictions.jsonl", lines);

  AccuracyReport acc = evaluate(predictions);
  ConfidenceReport conf = confidence_report(predictions, threshold);
  std::printf("samples  top-1   top-3   top-5\n");
  std::printf("%-8zu %-7.4f %-7.4f %-7.4f\n", acc.n, acc.top1, acc.top3,
              acc.top5);
  std::printf("confidence threshold %.2f\n", conf.threshold);
  std::printf("  secure-correct %zu\n", conf.secure_correct);
  std::printf("  secure-wrong   %zu\n", conf.secure_wrong);
  std::printf("  insecure       %zu\n", conf.insecure);
  return acc;
}

/// predict: score a single raw message, print one probability per emotion.
inline ScoreVector run_predict(const PipelineConfig& cfg,
                               const std::string& text) {
  TrainedModel model = load_model(cfg.str("out"));
  PreprocessConfig pre = cfg.preprocess();
  MessageEmbedding msg =
      embed_message(model.table, preprocess_text(text, pre));
  ScoreVector sv = score_message(model, msg);
  for (std::size_t j = 0; j < model.catalog.size(); ++j) {
    std::cout << model.catalog.name(j) << " " << fmt_double(sv.probs[j])
              << "\n";
  }
  return sv;
}

// ---------------------------------------------------------------------------
// Plot emission
// ---------------------------------------------------------------------------

inline void run_plot(const PipelineConfig& cfg) {
  const fs::path out_dir = cfg.str("out");
  const fs::path plot_dir = out_dir / "plots";
  TrainedModel model = load_model(out_dir);
  CorpusArtifact corpus = load_corpus(out_dir);
  CooccurrenceMatrix m = load_matrix(out_dir);
  const auto colors = color_palette(model.catalog.size());
  const double color_threshold = cfg.num("color_threshold");

  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t e = 0; e < model.catalog.size(); ++e) {
    legend.emplace_back(model.catalog.name(e), colors[e]);
  }

  // (a) word embeddings per disc, dominant-emotion coloring
  for (std::size_t d = 0; d < model.table.k(); ++d) {
    DiscSvg svg("word embeddings, disc " + std::to_string(d));
    CsvWriter csv({"word", "re", "im", "emotion"});
    for (std::size_t w = 0; w < model.table.vocab.size(); ++w) {
      const DiscPoint& p = model.table.discs[d][w];
      // rows are unit norm; a word is mono-emotional when one entry
      // dominates the row norm
      int dominant = -1;
      if (w < m.rows.size()) {
        for (std::size_t e = 0; e < m.emotions; ++e) {
          if (m.rows[w][e] > color_threshold) dominant = static_cast<int>(e);
        }
      }
      std::string color = dominant >= 0 ? colors[dominant] : "black";
      std::string emotion =
          dominant >= 0 ? model.catalog.name(dominant) : "poly";
      svg.point(p.re(), p.im(), color);
      csv.append_row({model.table.vocab[w], fmt_double(p.re()),
                      fmt_double(p.im()), emotion});
    }
    svg.legend(legend);
    std::string base = "words_d" + std::to_string(d);
    atomic_write(plot_dir / (base + ".svg"), svg.finish());
    atomic_write(plot_dir / (base + ".csv"), csv.str());
  }

  // (b) message representations per disc and emotion, raw and corrected
  std::vector<MultiDiscPoint> pooled;
  std::vector<std::size_t> labels;
  for (const auto& inst : corpus.train) {
    MessageEmbedding msg = embed_message(model.table, inst.tokens);
    pooled.push_back(message_representation(model.attention, msg,
                                            model.table.k(), model.solver));
    labels.push_back(inst.label);
  }
  for (std::size_t d = 0; d < model.table.k(); ++d) {
    for (int stage = 0; stage < 2; ++stage) {
      const bool corrected = stage == 1;
      for (std::size_t e = 0; e < model.catalog.size(); ++e) {
        DiscSvg svg("messages, disc " + std::to_string(d) + ", " +
                    model.catalog.name(e) +
                    (corrected ? " (corrected)" : " (raw)"));
        CsvWriter csv({"id", "re", "im"});
        bool any = false;
        for (std::size_t i = 0; i < pooled.size(); ++i) {
          if (labels[i] != e) continue;
          DiscPoint p = pooled[i][d];
          if (corrected) p = model.corrections[d].apply(p);
          svg.point(p.re(), p.im(), colors[e]);
          csv.append_row({corpus.train[i].id, fmt_double(p.re()),
                          fmt_double(p.im())});
          any = true;
        }
        if (!any) continue;
        if (corrected) svg.radius_line(model.directions[d][e].psi(), colors[e]);
        std::string base = "messages_d" + std::to_string(d) + "_" +
                           model.catalog.name(e) +
                           (corrected ? "_corrected" : "_raw");
        atomic_write(plot_dir / (base + ".svg"), svg.finish());
        atomic_write(plot_dir / (base + ".csv"), csv.str());
      }
    }
  }

  if (corpus.test.empty()) {
    std::cerr << "warning: empty test set, skipping test panels, "
                 "co-occurrence heatmap and emotion map\n";
    std::cout << "plot: figures written to " << plot_dir.string() << "\n";
    return;
  }

  // (c) test instances per disc and emotion, with the true-emotion radius
  std::vector<Prediction> predictions = predict_testset(model, corpus);
  for (std::size_t d = 0; d < model.table.k(); ++d) {
    for (std::size_t e = 0; e < model.catalog.size(); ++e) {
      DiscSvg svg("test messages, disc " + std::to_string(d) + ", " +
                  model.catalog.name(e));
      CsvWriter csv({"id", "re", "im"});
      bool any = false;
      for (const auto& inst : corpus.test) {
        if (inst.label != e) continue;
        MessageEmbedding msg = embed_message(model.table, inst.tokens);
        MultiDiscPoint p = message_representation(model.attention, msg,
                                                  model.table.k(), model.solver);
        DiscPoint q = model.corrections[d].apply(p[d]);
        svg.point(q.re(), q.im(), colors[e]);
        csv.append_row({inst.id, fmt_double(q.re()), fmt_double(q.im())});
        any = true;
      }
      if (!any) continue;
      svg.radius_line(model.directions[d][e].psi(), colors[e]);
      std::string base =
          "test_d" + std::to_string(d) + "_" + model.catalog.name(e);
      atomic_write(plot_dir / (base + ".svg"), svg.finish());
      atomic_write(plot_dir / (base + ".csv"), csv.str());
    }
  }

  // (d) emotion co-occurrence heatmap
  auto cooc = emotion_cooccurrence(predictions, model.catalog.size());
  double max_count = 1.0;
  for (const auto& row : cooc) {
    for (double v : row) max_count = std::max(max_count, v);
  }
  {
    const std::size_t e_count = model.catalog.size();
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" "
           "height=\"600\" viewBox=\"0 0 600 600\">\n"
        << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    double cell = 560.0 / double(e_count);
    CsvWriter csv({"emotion_i", "emotion_j", "count"});
    for (std::size_t i = 0; i < e_count; ++i) {
      for (std::size_t j = 0; j < e_count; ++j) {
        int shade =
            255 - static_cast<int>(cooc[i][j] / max_count * 255.0 + 0.5);
        svg << "<rect x=\"" << fmt_fixed(20.0 + cell * double(j), 2)
            << "\" y=\"" << fmt_fixed(20.0 + cell * double(i), 2)
            << "\" width=\"" << fmt_fixed(cell, 2) << "\" height=\""
            << fmt_fixed(cell, 2) << "\" fill=\"rgb(" << shade << ","
            << shade << "," << shade << ")\"/>\n";
        csv.append_row({model.catalog.name(i), model.catalog.name(j),
                        fmt_double(cooc[i][j])});
      }
    }
    svg << "</svg>\n";
    atomic_write(plot_dir / "cooccurrence.svg", svg.str());
    atomic_write(plot_dir / "cooccurrence.csv", csv.str());
  }

  // (e) emotion map: re-embed the co-occurrence matrix through the same
  // row-normalization and one-disc fit
  {
    CooccurrenceMatrix em;
    em.emotions = model.catalog.size();
    for (std::size_t i = 0; i < cooc.size(); ++i) {
      double norm2 = 0.0;
      for (double v : cooc[i]) norm2 += v * v;
      if (norm2 <= 0.0) continue;
      double inv = 1.0 / std::sqrt(norm2);
      std::vector<double> row = cooc[i];
      for (double& v : row) v *= inv;
      em.vocab.push_back(model.catalog.name(i));
      em.rows.push_back(std::move(row));
    }
    SimilarityMatrix es = build_similarity(em);
    GloveConfig gcfg = cfg.glove();
    std::vector<DiscPoint> points = fit_disc(es, gcfg).points;
    DiscSvg svg("emotion map");
    CsvWriter csv({"emotion", "re", "im"});
    for (std::size_t i = 0; i < em.vocab.size(); ++i) {
      int idx = model.catalog.find(em.vocab[i]);
      svg.point(points[i].re(), points[i].im(),
                idx >= 0 ? colors[idx] : "black", 4.0);
      svg.label(points[i].re(), points[i].im(), em.vocab[i]);
      csv.append_row({em.vocab[i], fmt_double(points[i].re()),
                      fmt_double(points[i].im())});
    }
    atomic_write(plot_dir / "emotion_map.svg", svg.finish());
    atomic_write(plot_dir / "emotion_map.csv", csv.str());
  }

  std::cout << "plot: figures written to " << plot_dir.string() << "\n";
}

/// pipeline: all six stages in order.
inline void run_pipeline(const PipelineConfig& cfg) {
  run_preprocess(cfg);
  run_embed(cfg);
  run_train(cfg);
  run_fit_directions(cfg);
  run_evaluate(cfg);
  run_plot(cfg);
}

}  // namespace embolic
