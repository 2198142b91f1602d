// Command-line front end for the staged emotion-analysis pipeline.
//
// Exit codes:
//   0  success
//   2  malformed configuration or unknown option
//   3  missing input/artifact
//   4  numerical or domain error in a pipeline module
//   5  I/O failure

#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "embolic/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitModule = 4;
constexpr int kExitIo = 5;

/// Remaining "--key value" tokens become config overrides (overrides win
/// over the config file).
void apply_extras(embolic::PipelineConfig& cfg,
                  const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || i + 1 >= extras.size()) {
      throw embolic::ConfigError("expected --key value override, got '" +
                                 tok + "'");
    }
    cfg.set(tok.substr(2), extras[++i]);
  }
}

int run_guarded(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const embolic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const embolic::MissingArtifactError& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kExitMissing;
  } catch (const embolic::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const embolic::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModule;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "embolic: hyperbolic emotion analysis pipeline\n"
      "Any config key can be overridden with --key value after the "
      "subcommand.\n"
      "Exit codes: 0 ok, 2 config error, 3 missing artifact, 4 module "
      "error, 5 i/o error."};
  app.require_subcommand(1);

  std::string config_path, out_override, seed_override, discs_override,
      threshold_override, temperature_override, predict_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--out", out_override, "output directory");
    sub->add_option("--seed", seed_override, "master RNG seed");
    sub->add_option("--discs", discs_override, "number of Poincare discs");
    sub->add_option("--threshold", threshold_override,
                    "confidence threshold");
    sub->add_option("--temperature", temperature_override,
                    "softmax temperature");
    sub->allow_extras();
    return sub;
  };

  auto* cmd_preprocess = add_common(app.add_subcommand(
      "preprocess", "ingest, split, tokenize, build matrices"));
  auto* cmd_embed =
      add_common(app.add_subcommand("embed", "fit word embeddings"));
  auto* cmd_train =
      add_common(app.add_subcommand("train", "train attention parameters"));
  auto* cmd_fit = add_common(app.add_subcommand(
      "fit-directions", "fit corrections and class directions"));
  auto* cmd_evaluate =
      add_common(app.add_subcommand("evaluate", "score the test set"));
  auto* cmd_plot = add_common(app.add_subcommand("plot", "emit figures"));
  auto* cmd_pipeline =
      add_common(app.add_subcommand("pipeline", "run all stages"));
  auto* cmd_predict = add_common(
      app.add_subcommand("predict", "score a single message"));
  cmd_predict->add_option("--text", predict_text, "message text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();

  return run_guarded([&] {
    embolic::PipelineConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    auto extras = sub->remaining();
    apply_extras(cfg, extras);
    if (!out_override.empty()) cfg.set("out", out_override);
    if (!seed_override.empty()) cfg.set("seed", seed_override);
    if (!discs_override.empty()) cfg.set("discs", discs_override);
    if (!threshold_override.empty()) cfg.set("threshold", threshold_override);
    if (!temperature_override.empty()) {
      cfg.set("temperature", temperature_override);
    }

    embolic::DirectoryLock lock(cfg.str("out"));
    if (sub == cmd_preprocess) {
      embolic::run_preprocess(cfg);
    } else if (sub == cmd_embed) {
      embolic::run_embed(cfg);
    } else if (sub == cmd_train) {
      embolic::run_train(cfg);
    } else if (sub == cmd_fit) {
      embolic::run_fit_directions(cfg);
    } else if (sub == cmd_evaluate) {
      embolic::run_evaluate(cfg);
    } else if (sub == cmd_plot) {
      embolic::run_plot(cfg);
    } else if (sub == cmd_pipeline) {
      embolic::run_pipeline(cfg);
    } else if (sub == cmd_predict) {
      embolic::run_predict(cfg, predict_text);
    }
  });
}
