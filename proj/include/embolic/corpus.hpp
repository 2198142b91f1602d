#pragma once

// Text ingestion and matrix construction: normalization/lemmatization,
// the word-emotion co-occurrence matrix M and the word-word similarity
// matrix S.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "embolic/sampling.hpp"
#include "embolic/util.hpp"

namespace embolic {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered, unique emotion labels.
class EmotionCatalog {
 public:
  explicit EmotionCatalog(std::vector<std::string> names)
      : names_(std::move(names)) {
    if (names_.empty()) throw DimensionError("EmotionCatalog: empty");
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) {
      throw DomainError("EmotionCatalog: duplicate labels");
    }
  }

  /// The 28-label GoEmotions catalog (27 emotions plus neutral).
  static EmotionCatalog goemotions() {
    return EmotionCatalog({"admiration",    "amusement",   "anger",
                           "annoyance",     "approval",    "caring",
                           "confusion",     "curiosity",   "desire",
                           "disappointment","disapproval", "disgust",
                           "embarrassment", "excitement",  "fear",
                           "gratitude",     "grief",       "joy",
                           "love",          "nervousness", "optimism",
                           "pride",         "realization", "relief",
                           "remorse",       "sadness",     "surprise",
                           "neutral"});
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  /// Index of a label; "indifference" is accepted as an alias for "neutral".
  int find(const std::string& label) const {
    std::string key = label == "indifference" ? "neutral" : label;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == key) return static_cast<int>(i);
    }
    return -1;
  }

 private:
  std::vector<std::string> names_;
};

struct Instance {
  std::string text;
  std::size_t label = 0;
  std::string id;
};

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

struct LemmaRule {
  std::string suffix;
  std::string replacement;
  std::size_t min_stem = 3;  // minimum stem length left after stripping
};

struct PreprocessConfig {
  std::set<std::string> stopwords;
  std::set<std::string> retained;  // negations/intensifiers kept verbatim
  std::vector<LemmaRule> lemma_rules;
  std::map<std::string, std::string> lemma_exceptions;

  static PreprocessConfig defaults();
};

inline PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig cfg;
  cfg.stopwords = {
      "a",    "about", "above", "after", "again", "all",   "am",    "an",
      "and",  "any",   "are",   "as",    "at",    "be",    "been",  "being",
      "both", "but",   "by",    "can",   "could", "did",   "do",    "does",
      "doing","down",  "during","each",  "few",   "for",   "from",  "further",
      "had",  "has",   "have",  "having","he",    "her",   "here",  "hers",
      "him",  "his",   "how",   "i",     "if",    "in",    "into",  "is",
      "it",   "its",   "itself","just",  "me",    "more",  "most",  "my",
      "myself","now",  "of",    "off",   "on",    "once",  "only",  "or",
      "other","our",   "ours",  "out",   "over",  "own",   "s",     "same",
      "she",  "should","so",    "some",  "such",  "t",     "than",  "that",
      "the",  "their", "theirs","them",  "then",  "there", "these", "they",
      "this", "those", "through","to",   "under", "until", "up",    "was",
      "we",   "were",  "what",  "when",  "where", "which", "while", "who",
      "whom", "why",   "will",  "with",  "would", "you",   "your",  "yours",
      "yourself"};
  cfg.retained = {"not", "no", "never", "nor", "very", "too", "really",
                  "extremely", "quite"};
  // Applied longest-suffix-first; one rule per token.
  cfg.lemma_rules = {
      {"sses", "ss", 2}, {"ies", "y", 2},  {"ing", "", 3},
      {"edly", "", 3},   {"ed", "", 3},    {"ly", "", 3},
      {"s", "", 3}};
  cfg.lemma_exceptions = {{"feet", "foot"},   {"men", "man"},
                          {"women", "woman"}, {"children", "child"},
                          {"better", "good"}, {"worse", "bad"},
                          {"felt", "feel"},   {"left", "leave"},
                          {"made", "make"},   {"said", "say"},
                          {"went", "go"},     {"got", "get"},
                          {"lol", "lol"},     {"thanks", "thanks"}};
  return cfg;
}

namespace detail {

inline void load_word_list(const std::string& path, std::set<std::string>& out) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open word list: " + path);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty() && line[0] != '#') out.insert(line);
  }
}

inline std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

inline bool is_emoji_codepoint(std::uint32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0xFE0F || cp == 0x200D;
}

/// Decodes one UTF-8 codepoint at position i; advances i. Invalid bytes are
/// consumed one at a time and returned as-is.
inline std::uint32_t next_codepoint(const std::string& s, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  std::uint32_t cp = c;
  if ((c & 0x80) == 0x00) {
    len = 1;
  } else if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  }
  if (i + len > s.size()) len = 1;
  for (std::size_t j = 1; j < len; ++j) {
    unsigned char cc = static_cast<unsigned char>(s[i + j]);
    if ((cc & 0xC0) != 0x80) {
      len = 1;
      cp = c;
      break;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

}  // namespace detail

namespace detail {

inline std::string lemmatize_once(const std::string& token,
                                  const PreprocessConfig& cfg) {
  auto it = cfg.lemma_exceptions.find(token);
  if (it != cfg.lemma_exceptions.end()) return it->second;
  // longest matching suffix wins
  const LemmaRule* best = nullptr;
  for (const auto& rule : cfg.lemma_rules) {
    if (token.size() < rule.suffix.size() + rule.min_stem) continue;
    if (token.compare(token.size() - rule.suffix.size(), rule.suffix.size(),
                      rule.suffix) != 0) {
      continue;
    }
    if (rule.suffix == "s" && token.size() >= 2 &&
        token[token.size() - 2] == 's') {
      continue;  // never strip a bare -s off an -ss ending
    }
    if (best == nullptr || rule.suffix.size() > best->suffix.size()) {
      best = &rule;
    }
  }
  if (best == nullptr) return token;
  std::string stem = token.substr(0, token.size() - best->suffix.size());
  // undouble a trailing doubled consonant left by -ing/-ed stripping
  if (best->replacement.empty() && stem.size() >= 3 &&
      stem.back() == stem[stem.size() - 2] && stem.back() != 'l' &&
      stem.back() != 's') {
    stem.pop_back();
  }
  return stem + best->replacement;
}

}  // namespace detail

/// Applies the rule table plus exception lexicon to one lowercase token.
/// Rules are iterated to a fixpoint so lemmatization is idempotent.
inline std::string lemmatize(const std::string& token,
                             const PreprocessConfig& cfg) {
  std::string cur = token;
  for (int pass = 0; pass < 8; ++pass) {
    std::string next = detail::lemmatize_once(cur, cfg);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

/// Lowercased tokens; URLs -> "<url>", hashtags -> "<hashtag>", emoji ->
/// "<emoji>"; punctuation stripped; stopwords removed (matched against both
/// the raw and the lemmatized form) except tokens on the retained list.
inline std::vector<std::string> preprocess_text(const std::string& raw,
                                                const PreprocessConfig& cfg) {
  static const std::set<std::string> kSpecial = {"<url>", "<hashtag>",
                                                 "<emoji>"};
  std::vector<std::string> tokens;
  auto emit = [&](std::string tok) {
    if (tok.empty()) return;
    if (kSpecial.count(tok) || cfg.retained.count(tok)) {
      tokens.push_back(std::move(tok));
      return;
    }
    if (cfg.stopwords.count(tok)) return;  // checked both raw and lemmatized
    tok = lemmatize(tok, cfg);
    if (tok.empty()) return;
    if (cfg.stopwords.count(tok) && !cfg.retained.count(tok)) return;
    tokens.push_back(std::move(tok));
  };

  std::stringstream ss(raw);
  std::string word;
  while (ss >> word) {
    if (word.rfind("http://", 0) == 0 || word.rfind("https://", 0) == 0 ||
        word.rfind("www.", 0) == 0) {
      emit("<url>");
      continue;
    }
    if (word.size() > 1 && word[0] == '#') {
      emit("<hashtag>");
      continue;
    }
    if (kSpecial.count(word)) {
      emit(word);
      continue;
    }
    std::string run;
    bool in_emoji = false;
    std::size_t i = 0;
    while (i < word.size()) {
      std::uint32_t cp = detail::next_codepoint(word, i);
      if (detail::is_emoji_codepoint(cp)) {
        if (!in_emoji) {
          emit(run);
          run.clear();
          emit("<emoji>");
          in_emoji = true;
        }
      } else if (cp < 128 && (std::isalnum(static_cast<int>(cp)) ||
                              cp == '\'')) {
        in_emoji = false;
        if (cp != '\'') {
          run.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        }
      } else {
        in_emoji = false;
        emit(run);
        run.clear();
      }
    }
    emit(run);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// |V| x E matrix of L2-normalized word-emotion co-occurrence rows.
struct CooccurrenceMatrix {
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> rows;  // unit Euclidean norm each
  std::size_t emotions = 0;
};

struct CorpusConfig {
  PreprocessConfig preprocess = PreprocessConfig::defaults();
  std::size_t min_count = 2;  // total instance-level occurrences required
};

/// Raw counts M_{w,e} = number of instances labeled e containing token w
/// (binary per instance); rows L2-normalized, rare tokens dropped, vocab
/// sorted lexicographically.
inline CooccurrenceMatrix build_cooccurrence(
    const std::vector<std::vector<std::string>>& tokenized,
    const std::vector<std::size_t>& labels, const EmotionCatalog& catalog,
    const CorpusConfig& config = {}) {
  if (tokenized.empty() || tokenized.size() != labels.size()) {
    throw DimensionError("build_cooccurrence: bad input sizes");
  }
  const std::size_t e_count = catalog.size();
  std::map<std::string, std::vector<double>> counts;
  for (std::size_t n = 0; n < tokenized.size(); ++n) {
    if (labels[n] >= e_count) {
      throw DomainError("build_cooccurrence: label out of range");
    }
    std::set<std::string> uniq(tokenized[n].begin(), tokenized[n].end());
    for (const auto& tok : uniq) {
      auto& row = counts[tok];
      if (row.empty()) row.assign(e_count, 0.0);
      row[labels[n]] += 1.0;
    }
  }
  CooccurrenceMatrix m;
  m.emotions = e_count;
  for (auto& [tok, row] : counts) {  // std::map iterates lexicographically
    double total = 0.0;
    double norm2 = 0.0;
    for (double v : row) {
      total += v;
      norm2 += v * v;
    }
    if (total < static_cast<double>(config.min_count) || norm2 <= 0.0) {
      continue;
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (double& v : row) v *= inv;
    m.vocab.push_back(tok);
    m.rows.push_back(std::move(row));
  }
  if (m.vocab.empty()) {
    throw DomainError("build_cooccurrence: empty vocabulary after filtering");
  }
  return m;
}

/// Symmetric |V| x |V| matrix with unit diagonal and entries in [0, 1].
struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> entries;  // row-major

  double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// S_{ij} = 1 - (1/2) sum_e (M_{ie} - M_{je})^2; equals the row dot product
/// for unit rows.
inline SimilarityMatrix build_similarity(const CooccurrenceMatrix& m) {
  SimilarityMatrix s;
  s.n = m.vocab.size();
  s.entries.assign(s.n * s.n, 0.0);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = i; j < s.n; ++j) {
      double d2 = 0.0;
      for (std::size_t e = 0; e < m.emotions; ++e) {
        double diff = m.rows[i][e] - m.rows[j][e];
        d2 += diff * diff;
      }
      double v = 1.0 - 0.5 * d2;
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw DomainError("build_similarity: entry outside [0,1]: " +
                          fmt_double(v));
      }
      v = std::clamp(v, 0.0, 1.0);
      s.entries[i * s.n + j] = v;
      s.entries[j * s.n + i] = v;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Readers and split
// ---------------------------------------------------------------------------

struct ReadReport {
  std::vector<Instance> instances;
  std::vector<std::string> warnings;  // malformed lines, with line numbers
};

/// GoEmotions raw format: text<TAB>comma-separated-label-ids<TAB>id; keeps
/// the first (primary) label id.
inline ReadReport read_goemotions_tsv(std::istream& in,
                                      const EmotionCatalog& catalog) {
  ReadReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_tab(line);
    if (fields.size() < 3) {
      report.warnings.push_back("line " + std::to_string(lineno) +
                                ": expected 3 tab-separated fields");
      continue;
    }
    std::string first_label = fields[1].substr(0, fields[1].find(','));
    int label = -1;
    try {
      label = std::stoi(first_label);
    } catch (const std::exception&) {
    }
    if (label < 0 || label >= static_cast<int>(catalog.size())) {
      report.warnings.push_back("line " + std::to_string(lineno) +
                                ": bad label id '" + first_label + "'");
      continue;
    }
    report.instances.push_back(
        {fields[0], static_cast<std::size_t>(label), fields[2]});
  }
  if (report.instances.empty()) {
    throw ParseError("goemotions input: no valid lines");
  }
  return report;
}

/// Seeded balanced split: exactly per_emotion held-out instances per label,
/// sampled uniformly; the remainder trains.
inline void split_train_test(const std::vector<Instance>& data,
                             const EmotionCatalog& catalog,
                             std::size_t per_emotion, SeededRng& rng,
                             std::vector<Instance>& train,
                             std::vector<Instance>& test) {
  std::vector<std::vector<std::size_t>> by_label(catalog.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    by_label[data[i].label].push_back(i);
  }
  std::set<std::size_t> held;
  for (std::size_t e = 0; e < catalog.size(); ++e) {
    auto& pool = by_label[e];
    if (pool.size() < per_emotion + 1) {
      throw DomainError("split_train_test: emotion '" + catalog.name(e) +
                        "' has too few instances (" +
                        std::to_string(pool.size()) + ")");
    }
    // Fisher-Yates prefix of length per_emotion
    for (std::size_t j = 0; j < per_emotion; ++j) {
      std::size_t r =
          j + static_cast<std::size_t>(rng.uniform() * double(pool.size() - j));
      if (r >= pool.size()) r = pool.size() - 1;
      std::swap(pool[j], pool[r]);
      held.insert(pool[j]);
    }
  }
  train.clear();
  test.clear();
  for (std::size_t i = 0; i < data.size(); ++i) {
    (held.count(i) ? test : train).push_back(data[i]);
  }
}

}  // namespace embolic
