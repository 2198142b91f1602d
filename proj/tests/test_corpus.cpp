#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "embolic/corpus.hpp"
#include "embolic/model_io.hpp"

using namespace embolic;

namespace {

std::string join(const std::vector<std::string>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

TEST_CASE("emotion catalog") {
  EmotionCatalog cat = EmotionCatalog::goemotions();
  CHECK(cat.size() == 28);
  CHECK(cat.name(0) == "admiration");
  CHECK(cat.name(27) == "neutral");
  CHECK(cat.find("joy") == 17);
  CHECK(cat.find("neutral") == 27);
  CHECK(cat.find("indifference") == 27);  // alias
  CHECK(cat.find("nonsense") == -1);
  CHECK_THROWS_AS(EmotionCatalog({}), DimensionError);
  CHECK_THROWS_AS(EmotionCatalog({"joy", "joy"}), DomainError);
}

TEST_CASE("preprocessing examples") {
  PreprocessConfig cfg = PreprocessConfig::defaults();
  CHECK(preprocess_text("I am NOT happy!!!", cfg) ==
        std::vector<std::string>{"not", "happy"});
  CHECK(preprocess_text("", cfg).empty());
  CHECK(preprocess_text("Check https://x.y #fun \xF0\x9F\x98\x80", cfg) ==
        std::vector<std::string>{"check", "<url>", "<hashtag>", "<emoji>"});
  CHECK(preprocess_text("www.example.com", cfg) ==
        std::vector<std::string>{"<url>"});
  // stopwords drop, retained intensifiers survive
  CHECK(preprocess_text("this is very good", cfg) ==
        std::vector<std::string>{"very", "good"});
  // apostrophes vanish inside tokens
  CHECK(preprocess_text("don't", cfg) == std::vector<std::string>{"dont"});
}

TEST_CASE("lemmatization rules") {
  PreprocessConfig cfg = PreprocessConfig::defaults();
  CHECK(lemmatize("kisses", cfg) == "kiss");
  CHECK(lemmatize("parties", cfg) == "party");
  CHECK(lemmatize("running", cfg) == "run");
  CHECK(lemmatize("walked", cfg) == "walk");
  CHECK(lemmatize("sadly", cfg) == "sad");
  CHECK(lemmatize("cats", cfg) == "cat");
  CHECK(lemmatize("miss", cfg) == "miss");  // -ss guard
  CHECK(lemmatize("feet", cfg) == "foot");  // exception lexicon
  CHECK(lemmatize("went", cfg) == "go");
}

TEST_CASE("preprocessing is idempotent") {
  PreprocessConfig cfg = PreprocessConfig::defaults();
  const std::vector<std::string> texts = {
      "I am NOT happy!!!",
      "Check https://x.y #fun \xF0\x9F\x98\x80",
      "running quickly towards the parties",
      "she said it was really extremely good, thanks",
      "the cats' kisses were misses",
      "don't stop believing <emoji> <url>",
      "very very sadly gloomy days went by",
  };
  for (const auto& text : texts) {
    auto once = preprocess_text(text, cfg);
    auto twice = preprocess_text(join(once), cfg);
    CHECK(twice == once);
  }
}

TEST_CASE("co-occurrence matrix construction") {
  EmotionCatalog cat({"a", "b", "c"});
  CorpusConfig cfg;
  cfg.min_count = 1;

  SUBCASE("repeated tokens count once per instance") {
    CooccurrenceMatrix m =
        build_cooccurrence({{"joy", "joy", "joy"}}, {0}, cat, cfg);
    REQUIRE(m.vocab == std::vector<std::string>{"joy"});
    CHECK(m.rows[0] == std::vector<double>{1.0, 0.0, 0.0});
  }

  SUBCASE("a token split across two emotions normalizes to 1/sqrt(2)") {
    CooccurrenceMatrix m =
        build_cooccurrence({{"w"}, {"w"}}, {0, 1}, cat, cfg);
    REQUIRE(m.vocab.size() == 1);
    CHECK(m.rows[0][0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m.rows[0][1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m.rows[0][2] == 0.0);
  }

  SUBCASE("vocabulary is sorted and rare tokens are dropped") {
    CorpusConfig cfg2;
    cfg2.min_count = 2;
    CooccurrenceMatrix m = build_cooccurrence(
        {{"zeta", "alpha"}, {"alpha", "once"}}, {0, 1}, cat, cfg2);
    CHECK(m.vocab == std::vector<std::string>{"alpha"});

    CooccurrenceMatrix all = build_cooccurrence(
        {{"zeta", "alpha"}, {"alpha", "mid"}}, {0, 1}, cat, cfg);
    CHECK(all.vocab == std::vector<std::string>{"alpha", "mid", "zeta"});
  }

  SUBCASE("rows have unit norm") {
    CooccurrenceMatrix m = build_cooccurrence(
        {{"x", "y"}, {"x"}, {"x", "y"}}, {0, 1, 2}, cat, cfg);
    for (const auto& row : m.rows) {
      double n2 = 0.0;
      for (double v : row) n2 += v * v;
      CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(build_cooccurrence({}, {}, cat, cfg), DimensionError);
    CHECK_THROWS_AS(build_cooccurrence({{"w"}}, {3}, cat, cfg), DomainError);
    CorpusConfig strict;
    strict.min_count = 5;
    CHECK_THROWS_AS(build_cooccurrence({{"w"}}, {0}, cat, strict), DomainError);
  }
}

TEST_CASE("similarity matrix") {
  EmotionCatalog cat({"a", "b", "c"});
  CorpusConfig cfg;
  cfg.min_count = 1;

  SUBCASE("examples") {
    // rows (1,0,0), (1/sqrt2, 1/sqrt2, 0), (0,0,1)
    CooccurrenceMatrix m;
    m.emotions = 3;
    m.vocab = {"u", "v", "w"};
    double inv = 1.0 / std::sqrt(2.0);
    m.rows = {{1.0, 0.0, 0.0}, {inv, inv, 0.0}, {0.0, 0.0, 1.0}};
    SimilarityMatrix s = build_similarity(m);
    CHECK(s.at(0, 0) == 1.0);
    CHECK(s.at(1, 1) == 1.0);
    CHECK(s.at(0, 1) == doctest::Approx(inv).epsilon(1e-12));
    CHECK(s.at(0, 2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.at(0, 1) == s.at(1, 0));
  }

  SUBCASE("distance form agrees with the dot product on unit rows") {
    SeededRng rng(401);
    CooccurrenceMatrix m;
    m.emotions = 4;
    for (int w = 0; w < 12; ++w) {
      std::vector<double> row(4);
      double n2 = 0.0;
      for (double& v : row) {
        v = rng.uniform();
        n2 += v * v;
      }
      for (double& v : row) v /= std::sqrt(n2);
      m.vocab.push_back("w" + std::to_string(w));
      m.rows.push_back(std::move(row));
    }
    SimilarityMatrix s = build_similarity(m);
    for (std::size_t i = 0; i < m.vocab.size(); ++i) {
      for (std::size_t j = 0; j < m.vocab.size(); ++j) {
        double dot = 0.0;
        for (std::size_t e = 0; e < 4; ++e) dot += m.rows[i][e] * m.rows[j][e];
        CHECK(std::fabs(s.at(i, j) - dot) <= 1e-12);
        CHECK(s.at(i, j) >= 0.0);
        CHECK(s.at(i, j) <= 1.0);
      }
    }
  }
}

TEST_CASE("goemotions tsv reader") {
  EmotionCatalog cat = EmotionCatalog::goemotions();

  SUBCASE("well-formed lines") {
    std::istringstream in(
        "I love this\t18\tid1\n"
        "so angry\t2,4\tid2\n");
    ReadReport r = read_goemotions_tsv(in, cat);
    REQUIRE(r.instances.size() == 2);
    CHECK(r.instances[0].label == 18);
    CHECK(r.instances[1].label == 2);  // first label wins
    CHECK(r.instances[1].id == "id2");
    CHECK(r.warnings.empty());
  }

  SUBCASE("malformed lines are skipped with line-numbered warnings") {
    std::istringstream in(
        "no tabs here\n"
        "ok\t3\tid1\n"
        "bad label\t99\tid3\n");
    ReadReport r = read_goemotions_tsv(in, cat);
    CHECK(r.instances.size() == 1);
    REQUIRE(r.warnings.size() == 2);
    CHECK(r.warnings[0].find("line 1") != std::string::npos);
    CHECK(r.warnings[1].find("line 3") != std::string::npos);
  }

  SUBCASE("no valid lines is an error") {
    std::istringstream in("garbage\n");
    CHECK_THROWS_AS(read_goemotions_tsv(in, cat), ParseError);
  }
}

TEST_CASE("jsonl reader") {
  EmotionCatalog cat({"joy", "neutral", "sadness"});

  SUBCASE("well-formed lines with the indifference alias") {
    std::istringstream in(
        "{\"text\": \"yay\", \"label\": \"joy\", \"id\": \"a\"}\n"
        "{\"text\": \"meh\", \"label\": \"indifference\"}\n");
    ReadReport r = read_jsonl(in, cat);
    REQUIRE(r.instances.size() == 2);
    CHECK(r.instances[0].label == 0);
    CHECK(r.instances[0].id == "a");
    CHECK(r.instances[1].label == 1);
    CHECK(r.instances[1].id == "2");  // defaults to the line number
  }

  SUBCASE("malformed and unknown-label lines warn") {
    std::istringstream in(
        "not json\n"
        "{\"text\": \"x\", \"label\": \"rage\"}\n"
        "{\"text\": \"y\", \"label\": \"sadness\"}\n");
    ReadReport r = read_jsonl(in, cat);
    CHECK(r.instances.size() == 1);
    REQUIRE(r.warnings.size() == 2);
    CHECK(r.warnings[0].find("line 1") != std::string::npos);
    CHECK(r.warnings[1].find("line 2") != std::string::npos);
  }

  SUBCASE("no valid lines is an error") {
    std::istringstream in("{}\n");
    CHECK_THROWS_AS(read_jsonl(in, cat), ParseError);
  }
}

TEST_CASE("train/test split") {
  EmotionCatalog cat({"a", "b"});
  std::vector<Instance> data;
  for (int i = 0; i < 20; ++i) {
    data.push_back({"t" + std::to_string(i), std::size_t(i % 2),
                    "id" + std::to_string(i)});
  }

  SUBCASE("exactly per_emotion instances held out per label") {
    SeededRng rng(42);
    std::vector<Instance> train, test;
    split_train_test(data, cat, 3, rng, train, test);
    CHECK(train.size() == 14);
    CHECK(test.size() == 6);
    std::size_t a = 0, b = 0;
    for (const auto& t : test) (t.label == 0 ? a : b)++;
    CHECK(a == 3);
    CHECK(b == 3);
  }

  SUBCASE("deterministic per seed") {
    SeededRng r1(7), r2(7);
    std::vector<Instance> tr1, te1, tr2, te2;
    split_train_test(data, cat, 4, r1, tr1, te1);
    split_train_test(data, cat, 4, r2, tr2, te2);
    REQUIRE(te1.size() == te2.size());
    for (std::size_t i = 0; i < te1.size(); ++i) {
      CHECK(te1[i].id == te2[i].id);
    }
  }

  SUBCASE("too few instances per label") {
    SeededRng rng(1);
    std::vector<Instance> train, test;
    CHECK_THROWS_AS(split_train_test(data, cat, 10, rng, train, test),
                    DomainError);
  }
}
