// wpgd command line: train, eval, compare, gen-data, validate-config.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpgd/cli/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  bool eps_255 = false;
  unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "experiment config (JSON) or a resolved_config.json snapshot")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "override a config leaf, e.g. --set train.attack.eps=0.3")
      ->take_all()
      ->allow_extra_args(false);
  app->add_flag("--eps-255", c.eps_255, "read eps and step_size on the 0-255 byte scale");
  app->add_option("--threads", c.threads, "worker threads; 1 is the bit-exact reference mode")
      ->check(CLI::Range(1u, 1024u));
}

wpgd::cli::ExperimentConfig load(const Common& c) {
  return wpgd::cli::load_experiment(c.config, {c.overrides, c.eps_255});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein-aware adversarial training and evaluation"};
  app.set_version_flag("--version", std::string(wpgd::kVersion));
  app.require_subcommand(1);

  Common common;
  std::string checkpoint, baseline, ckpt_a, ckpt_b, split = "train", out;

  auto* train = app.add_subcommand("train", "train a model; writes checkpoint, report and config snapshot");
  add_common(train, common);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint: confusions, entropy, boundary, gap");
  add_common(eval, common);
  eval->add_option("--checkpoint", checkpoint, "checkpoint to evaluate")->required()->check(CLI::ExistingFile);
  eval->add_option("--baseline", baseline, "standard model for the accuracy gap")->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare", "accuracy gap, correlation and score offsets (b minus a)");
  add_common(compare, common);
  compare->add_option("--a", ckpt_a, "reference checkpoint")->required()->check(CLI::ExistingFile);
  compare->add_option("--b", ckpt_b, "compared checkpoint")->required()->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen-data", "write a dataset split as CSV");
  add_common(gen, common);
  gen->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}));
  gen->add_option("-o,--out", out, "output CSV path (default: <outdir>/<hash>/data-<split>.csv)");

  auto* validate = app.add_subcommand("validate-config", "check a config and print its resolved form");
  add_common(validate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  namespace cli = wpgd::cli;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto cfg = load(common);
    const cli::RunOptions run{common.threads, &std::cerr};
    if (*train) {
      const auto r = cli::cmd_train(cfg, run);
      std::cout << r.dir.string() << "\n";
    } else if (*eval) {
      std::optional<std::filesystem::path> base;
      if (!baseline.empty()) base = baseline;
      std::cout << cli::cmd_eval(checkpoint, cfg, base, run).string() << "\n";
    } else if (*compare) {
      std::cout << cli::cmd_compare(ckpt_a, ckpt_b, cfg, run).string() << "\n";
    } else if (*gen) {
      std::optional<std::filesystem::path> o;
      if (!out.empty()) o = out;
      std::cout << cli::cmd_gen_data(cfg, split, o).string() << "\n";
    } else if (*validate) {
      nlohmann::json j{{"config_hash", cli::config_hash(cfg)}, {"version", wpgd::kVersion}};
      j["config"] = cli::resolved_json(cfg);
      std::cout << j.dump(2) << "\n";
    }
  } catch (const wpgd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const wpgd::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const wpgd::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const wpgd::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const wpgd::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const wpgd::ParseError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "wall time " << secs << " s\n";
  return kOk;
}
