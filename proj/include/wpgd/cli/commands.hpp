#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpgd/cli/config.hpp"
#include "wpgd/data/mnist.hpp"
#include "wpgd/data/synthetic.hpp"
#include "wpgd/metrics/boundary.hpp"
#include "wpgd/metrics/confusion.hpp"
#include "wpgd/metrics/entropy_stats.hpp"
#include "wpgd/metrics/gap.hpp"
#include "wpgd/metrics/score.hpp"
#include "wpgd/nn/checkpoint.hpp"
#include "wpgd/ot/cost_matrix_io.hpp"
#include "wpgd/train/trainer.hpp"
#include "wpgd/version.hpp"

namespace wpgd::cli {

namespace fs = std::filesystem;

/// Settings that change how a command runs but not what it computes.
struct RunOptions {
  unsigned threads = 1;
  std::ostream* log = &std::cerr;
};

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json stamped(const std::string& hash) {
  return {{"config_hash", hash}, {"version", kVersion}};
}

inline fs::path run_dir(const ExperimentConfig& cfg) {
  const fs::path dir = fs::path(cfg.output_dir) / config_hash(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

// CSV outputs open with a comment line naming the producing version and config.
inline std::string csv_stamp(const std::string& hash) {
  return std::string("# wpgd ") + kVersion + " config_hash " + hash + "\n";
}

inline void stamp_csv(const fs::path& path, const std::string& hash) {
  write_text(path, csv_stamp(hash) + read_text(path));
}

inline json matrix_json(const std::vector<double>& v, std::size_t k) {
  json rows = json::array();
  for (std::size_t i = 0; i < k; ++i)
    rows.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i * k),
                                       v.begin() + static_cast<std::ptrdiff_t>((i + 1) * k)));
  return rows;
}

inline json counts_json(const metrics::ConfusionMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::uint64_t> r(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) r[j] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_confusion_csv(const metrics::ConfusionMatrix& m, const fs::path& path, const std::string& hash) {
  std::ostringstream out;
  out << csv_stamp(hash) << "true\\predicted";
  for (std::size_t j = 0; j < m.size(); ++j) out << ',' << j;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << i;
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << m(i, j);
    out << '\n';
  }
  write_text(path, out.str());
}

inline void write_matrix_csv(const std::vector<double>& v, std::size_t k, const fs::path& path,
                             const std::string& hash) {
  std::ostringstream out;
  out << csv_stamp(hash);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) out << (j ? "," : "") << csv_number(v[i * k + j]);
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace detail

inline data::Dataset load_split(const ExperimentConfig& cfg, const std::string& split) {
  const bool train_split = split == "train";
  if (cfg.dataset.kind == data::Provenance::synthetic) {
    auto spec = cfg.dataset.synthetic;
    if (!train_split) {
      spec.samples_per_class = cfg.dataset.test_samples_per_class;
      spec.seed = cfg.dataset.test_seed;
    }
    return data::gen_synthetic(spec);
  }
  const auto& m = cfg.dataset.mnist;
  return train_split ? data::load_mnist(m.train_images, m.train_labels, m.train_limit)
                     : data::load_mnist(m.test_images, m.test_labels, m.test_limit);
}

inline std::optional<ot::CostMatrix> load_cost(const ExperimentConfig& cfg) {
  if (!cfg.cost.path) return std::nullopt;
  ot::CostMatrix c;
  try {
    c = ot::load_cost_matrix(*cfg.cost.path, cfg.cost.p);
  } catch (const ValidationError& e) {
    throw ConfigError("cost_matrix.path", e.what());
  }
  if (c.size() != cfg.dataset.num_classes())
    throw ConfigError("cost_matrix.path", "matrix is " + std::to_string(c.size()) + "x" +
                                              std::to_string(c.size()) + " but the dataset has " +
                                              std::to_string(cfg.dataset.num_classes()) + " classes");
  return c;
}

inline json train_report_json(const train::TrainReport& r, const std::string& hash) {
  json j = detail::stamped(hash);
  j["mode"] = to_string(r.mode);
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    // Wall time stays out of the file so reruns compare byte for byte.
    epochs.push_back({{"epoch", e.epoch},
                      {"learning_rate", e.learning_rate},
                      {"train_loss", e.train_loss},
                      {"natural_error", e.natural_error},
                      {"adversarial_error", detail::optional_json(e.adversarial_error)}});
  }
  j["epochs"] = epochs;
  if (!r.epochs.empty()) {
    j["final_natural_error"] = r.epochs.back().natural_error;
    j["final_adversarial_error"] = detail::optional_json(r.epochs.back().adversarial_error);
  }
  return j;
}

struct TrainOutput {
  fs::path dir;
  MlpParams params;
};

/// Trains and writes checkpoint.json, train_report.json and
/// resolved_config.json under <output_dir>/<config-hash>/.
inline TrainOutput cmd_train(const ExperimentConfig& cfg, const RunOptions& run = {}) {
  const std::string hash = config_hash(cfg);
  const auto cost = load_cost(cfg);
  const auto data = load_split(cfg, "train");
  train::TrainConfig tc = cfg.train;
  tc.threads = run.threads;
  *run.log << "train: " << to_string(tc.mode) << " on " << data.size() << " examples, "
           << tc.epochs << " epochs, config " << hash << "\n";
  auto result = train::train(cfg.model, data, tc, cost ? &*cost : nullptr);
  const auto& last = result.report.epochs.back();
  *run.log << "train: done in " << result.report.wall_seconds << " s, final loss " << last.train_loss
           << ", NE " << last.natural_error << "%";
  if (last.adversarial_error) *run.log << ", AE " << *last.adversarial_error << "%";
  *run.log << "\n";

  const fs::path dir = detail::run_dir(cfg);
  json ck = checkpoint_to_json(result.params);
  ck.update(detail::stamped(hash));
  detail::write_text(dir / "checkpoint.json", ck.dump() + "\n");
  detail::write_json(dir / "train_report.json", train_report_json(result.report, hash));
  json snap = detail::stamped(hash);
  snap["config"] = resolved_json(cfg);
  detail::write_json(dir / "resolved_config.json", snap);
  return {dir, std::move(result.params)};
}

/// Natural and per-attack confusions for one model.
struct Evaluation {
  metrics::ConfusionResult natural;
  std::vector<metrics::ConfusionResult> attacked;  // parallel to cfg.eval.attacks
};

inline Evaluation evaluate(const MlpParams& params, const data::Dataset& data, const ExperimentConfig& cfg,
                           const ot::CostMatrix* cost, const RunOptions& run) {
  Evaluation ev;
  ev.natural = metrics::confusion(params, data, std::nullopt, nullptr, run.threads);
  for (const auto& a : cfg.eval.attacks) {
    ev.attacked.push_back(metrics::confusion(params, data, a.config, cost, run.threads));
    *run.log << "eval: " << a.name << " AE " << ev.attacked.back().error_percent << "%\n";
  }
  return ev;
}

inline void check_model(const MlpParams& params, const ExperimentConfig& cfg, const std::string& what) {
  if (params.spec().num_classes() != cfg.dataset.num_classes())
    throw ConfigError(what, "checkpoint has " + std::to_string(params.spec().num_classes()) +
                                " classes, config dataset has " + std::to_string(cfg.dataset.num_classes()));
  if (params.spec().input_dim() != cfg.dataset.input_dim())
    throw ConfigError(what, "checkpoint input width differs from the dataset input dimension");
}

/// G, rho and score per evaluation ("natural" first, then each attack), with
/// `model` as the robust side and `reference` as the standard side.
inline json gap_report(const Evaluation& model, const Evaluation& reference, const ExperimentConfig& cfg,
                       const ot::CostMatrix* cost) {
  json out = json::array();
  auto one = [&](const std::string& name, const metrics::ConfusionResult& m, const metrics::ConfusionResult& r) {
    const auto g = metrics::accuracy_gap(m.matrix, r.matrix);
    json j{{"evaluation", name}, {"gap", detail::matrix_json(g.values, g.k)}};
    if (cost) {
      const auto rho = metrics::gap_metric_correlation(g, *cost);
      j["correlation"] = detail::optional_json(rho);
      if (!rho) j["correlation_note"] = "undefined: zero variance in the off-diagonal entries";
      const double sm = metrics::robustness_score(m.matrix, *cost);
      const double sr = metrics::robustness_score(r.matrix, *cost);
      j["score_model"] = sm;
      j["score_reference"] = sr;
      j["score_delta"] = sm - sr;
    }
    out.push_back(j);
  };
  one("natural", model.natural, reference.natural);
  for (std::size_t i = 0; i < cfg.eval.attacks.size(); ++i)
    one(cfg.eval.attacks[i].name, model.attacked[i], reference.attacked[i]);
  return out;
}

inline std::string file_hash(const fs::path& p) { return fnv1a_hex(detail::read_text(p)); }

/// Evaluates a checkpoint. Writes metrics.json plus CSVs into
/// <output_dir>/<config-hash>/eval-<checkpoint-hash>/. With a baseline the
/// accuracy gap against it goes to gap-<baseline-hash>.json.
inline fs::path cmd_eval(const fs::path& checkpoint, const ExperimentConfig& cfg,
                         const std::optional<fs::path>& baseline = std::nullopt, const RunOptions& run = {}) {
  const std::string hash = config_hash(cfg);
  const auto params = load_checkpoint(checkpoint);
  check_model(params, cfg, "checkpoint");
  const auto cost = load_cost(cfg);
  const ot::CostMatrix* cp = cost ? &*cost : nullptr;
  const auto data = load_split(cfg, cfg.eval.split);
  const std::size_t k = cfg.dataset.num_classes();

  const fs::path dir = detail::run_dir(cfg) / ("eval-" + file_hash(checkpoint));
  fs::create_directories(dir);

  const auto ev = evaluate(params, data, cfg, cp, run);
  json m = detail::stamped(hash);
  m["checkpoint_hash"] = file_hash(checkpoint);
  m["split"] = cfg.eval.split;
  m["examples"] = data.size();
  m["natural"] = {{"error_percent", ev.natural.error_percent},
                  {"confusion", detail::counts_json(ev.natural.matrix)},
                  {"confusion_normalized", detail::matrix_json(ev.natural.matrix.normalized(), k)}};
  if (cp) m["natural"]["score"] = metrics::robustness_score(ev.natural.matrix, *cp);
  detail::write_confusion_csv(ev.natural.matrix, dir / "confusion_natural.csv", hash);
  json attacks_out = json::array();
  for (std::size_t i = 0; i < cfg.eval.attacks.size(); ++i) {
    const auto& a = cfg.eval.attacks[i];
    const auto& r = ev.attacked[i];
    json j{{"name", a.name},
           {"attack", detail::attack_to_json(a.config)},
           {"error_percent", r.error_percent},
           {"mean_objective", detail::optional_json(r.mean_objective)},
           {"confusion", detail::counts_json(r.matrix)},
           {"confusion_normalized", detail::matrix_json(r.matrix.normalized(), k)}};
    if (cp) j["score"] = metrics::robustness_score(r.matrix, *cp);
    attacks_out.push_back(j);
    detail::write_confusion_csv(r.matrix, dir / ("confusion_" + a.name + ".csv"), hash);
  }
  m["attacks"] = attacks_out;

  const auto ent = metrics::entropy_stats(params, data, run.threads);
  m["entropy"] = {{"mean", ent.mean}, {"median", ent.median}, {"bin_width", ent.bin_width},
                  {"histogram", ent.histogram}};
  {
    std::ostringstream csv;
    csv << detail::csv_stamp(hash) << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < ent.histogram.size(); ++b)
      csv << detail::csv_number(b * ent.bin_width) << ',' << detail::csv_number((b + 1) * ent.bin_width) << ','
          << ent.histogram[b] << '\n';
    detail::write_text(dir / "entropy_histogram.csv", csv.str());
  }

  if (cfg.eval.boundary.enabled) {
    const auto g = metrics::boundary_grid(params, cfg.eval.boundary.box, cfg.eval.boundary.resolution, run.threads);
    metrics::write_boundary_csv(g, dir / "boundary.csv");
    detail::stamp_csv(dir / "boundary.csv", hash);
    m["boundary"] = {{"resolution", g.resolution},
                     {"bbox", {g.box.x_min, g.box.x_max, g.box.y_min, g.box.y_max}},
                     {"changes", metrics::boundary_changes(g)}};
  }

  if (baseline) {
    const auto base = load_checkpoint(*baseline);
    check_model(base, cfg, "baseline");
    const auto bev = evaluate(base, data, cfg, cp, run);
    json gap = detail::stamped(hash);
    gap["model_checkpoint_hash"] = file_hash(checkpoint);
    gap["baseline_checkpoint_hash"] = file_hash(*baseline);
    gap["evaluations"] = gap_report(ev, bev, cfg, cp);
    const std::string name = "gap-" + file_hash(*baseline);
    detail::write_json(dir / (name + ".json"), gap);
    const auto g = metrics::accuracy_gap(ev.natural.matrix, bev.natural.matrix);
    detail::write_matrix_csv(g.values, g.k, dir / (name + "_natural.csv"), hash);
  }
  detail::write_json(dir / "metrics.json", m);
  return dir;
}

/// Compares two checkpoints: G = |C_b - C_a| per evaluation, rho against the
/// configured metric, and score offsets S_b - S_a (a is the reference).
inline fs::path cmd_compare(const fs::path& a, const fs::path& b, const ExperimentConfig& cfg,
                            const RunOptions& run = {}) {
  const std::string hash = config_hash(cfg);
  const auto pa = load_checkpoint(a);
  const auto pb = load_checkpoint(b);
  check_model(pa, cfg, "checkpoint_a");
  check_model(pb, cfg, "checkpoint_b");
  const auto cost = load_cost(cfg);
  const auto data = load_split(cfg, cfg.eval.split);
  const auto ea = evaluate(pa, data, cfg, cost ? &*cost : nullptr, run);
  const auto eb = evaluate(pb, data, cfg, cost ? &*cost : nullptr, run);
  json out = detail::stamped(hash);
  out["checkpoint_a_hash"] = file_hash(a);
  out["checkpoint_b_hash"] = file_hash(b);
  out["evaluations"] = gap_report(eb, ea, cfg, cost ? &*cost : nullptr);
  const fs::path dir = detail::run_dir(cfg);
  const fs::path path = dir / ("compare-" + file_hash(a) + "-" + file_hash(b) + ".json");
  detail::write_json(path, out);
  return path;
}

/// Writes the train or test split as CSV (x1,...,xd,label).
inline fs::path cmd_gen_data(const ExperimentConfig& cfg, const std::string& split,
                             const std::optional<fs::path>& out = std::nullopt) {
  if (split != "train" && split != "test") throw ConfigError("split", "expected train or test");
  const auto data = load_split(cfg, split);
  const fs::path path = out ? *out : detail::run_dir(cfg) / ("data-" + split + ".csv");
  data::write_csv(data, path);
  detail::stamp_csv(path, config_hash(cfg));
  return path;
}

}  // namespace wpgd::cli
