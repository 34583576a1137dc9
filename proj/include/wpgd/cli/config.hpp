#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wpgd/attacks/config.hpp"
#include "wpgd/data/synthetic.hpp"
#include "wpgd/error.hpp"
#include "wpgd/metrics/boundary.hpp"
#include "wpgd/nn/checkpoint.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/train/config.hpp"
#include "wpgd/version.hpp"

namespace wpgd::cli {

using nlohmann::json;

// Experiment file layout (every key optional unless noted):
//
//   seed, output_dir
//   dataset:     kind ("synthetic" | "mnist"), synthetic {...} | mnist {...}
//   model:       layer_widths, activation, seed
//   train:       epochs, batch_size, learning_rate, momentum, weight_decay,
//                lr_drop_at, lr_drop_factor, mode, seed, attack {...}
//   eval:        split, attacks [{name, ...attack}], boundary {...}
//   cost_matrix: path, p
//
// An attack object holds eps, steps, step_size, norm, objective,
// random_start, clamp [lo, hi], lambda, seed.
//
// Loading materialises every default, so the resolved JSON alone
// reproduces a run.

struct MnistConfig {
  std::string train_images, train_labels, test_images, test_labels;
  std::size_t train_limit = 10000;
  std::size_t test_limit = 2000;
};

struct DatasetConfig {
  data::Provenance kind = data::Provenance::synthetic;
  data::SyntheticDataSpec synthetic;  // training split
  std::size_t test_samples_per_class = 200;
  std::uint64_t test_seed = 1;
  MnistConfig mnist;

  std::size_t num_classes() const {
    return kind == data::Provenance::mnist ? 10 : synthetic.centers.size();
  }
  std::size_t input_dim() const { return kind == data::Provenance::mnist ? 784 : 2; }
};

struct NamedAttack {
  std::string name;
  attacks::AttackConfig config;
};

struct BoundaryConfig {
  bool enabled = false;
  metrics::BoundingBox box;
  std::size_t resolution = 100;
};

struct EvalConfig {
  std::string split = "test";
  std::vector<NamedAttack> attacks;
  BoundaryConfig boundary;
};

struct CostConfig {
  std::optional<std::string> path;
  double p = 1.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  DatasetConfig dataset;
  MlpSpec model;
  train::TrainConfig train;
  EvalConfig eval;
  CostConfig cost;
};

namespace detail {

// Typed access to a JSON object that remembers its dotted path and rejects
// keys nobody asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string path(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Marks `key` as understood without reading it.
  void touch(const std::string& key) { seen_.insert(key); }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), path(key));
  }

  template <typename T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(j_.at(key), path(key));
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(has(key) ? j_.at(key) : empty, path(key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
        throw ConfigError(where, "expected a nonnegative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      return v.get<T>();
    } else {
      try {
        return v.get<T>();
      } catch (const json::exception&) {
        throw ConfigError(where, "has the wrong type");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Runs `f`, turning library validation errors into config errors at `path`.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

inline std::string absolute_path(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return std::filesystem::weakly_canonical(path).string();
}

inline attacks::AttackConfig parse_attack(Section s, const attacks::AttackConfig& defaults) {
  attacks::AttackConfig a = defaults;
  a.eps = s.get("eps", a.eps);
  a.steps = s.get("steps", a.steps);
  if (auto v = s.optional<double>("step_size")) a.step_size = v;
  checked(s.path("norm"), [&] { a.norm = attacks::parse_norm(s.get("norm", std::string(to_string(a.norm)))); });
  checked(s.path("objective"),
          [&] { a.objective = attacks::parse_objective(s.get("objective", std::string(to_string(a.objective)))); });
  a.random_start = s.get("random_start", a.random_start);
  if (s.has("clamp")) {
    const auto c = Section::convert<std::vector<double>>(s.raw("clamp"), s.path("clamp"));
    if (c.size() != 2) throw ConfigError(s.path("clamp"), "expected [lo, hi]");
    a.clamp_lo = c[0];
    a.clamp_hi = c[1];
  } else {
    s.touch("clamp");
  }
  a.lambda = s.get("lambda", a.lambda);
  a.seed = s.get("seed", a.seed);
  s.finish();
  checked(s.path(""), [&] { a.validate(); });
  return a;
}

inline json attack_to_json(const attacks::AttackConfig& a) {
  json j{{"eps", a.eps},
         {"steps", a.steps},
         {"step_size", a.alpha()},
         {"norm", to_string(a.norm)},
         {"objective", to_string(a.objective)},
         {"random_start", a.random_start},
         {"clamp", {a.clamp_lo, a.clamp_hi}},
         {"lambda", a.lambda},
         {"seed", a.seed}};
  return j;
}

}  // namespace detail

/// Parses an experiment JSON tree. Relative file paths are resolved against
/// `base_dir`. Errors carry the dotted path of the offending field.
inline ExperimentConfig parse_experiment(const json& root, const std::filesystem::path& base_dir) {
  using detail::Section;
  Section top(root, "");
  ExperimentConfig cfg;
  cfg.seed = top.get("seed", cfg.seed);
  cfg.output_dir = detail::absolute_path(top.get("output_dir", cfg.output_dir), base_dir);

  // dataset
  {
    Section ds = top.child("dataset");
    const auto kind = ds.get("kind", std::string("synthetic"));
    if (kind == "synthetic") {
      cfg.dataset.kind = data::Provenance::synthetic;
      Section s = ds.child("synthetic");
      auto spec = data::SyntheticDataSpec::three_class(cfg.seed);
      if (s.has("centers")) {
        const auto centers = Section::convert<std::vector<std::vector<double>>>(s.raw("centers"), s.path("centers"));
        spec.centers.clear();
        for (const auto& c : centers) {
          if (c.size() != 2) throw ConfigError(s.path("centers"), "each center needs two coordinates");
          spec.centers.push_back({c[0], c[1]});
        }
      } else {
        s.touch("centers");
      }
      spec.sigma = s.get("sigma", spec.sigma);
      spec.samples_per_class = s.get("samples_per_class", spec.samples_per_class);
      spec.seed = s.get("seed", cfg.seed);
      cfg.dataset.test_samples_per_class = s.get("test_samples_per_class", cfg.dataset.test_samples_per_class);
      cfg.dataset.test_seed = s.get("test_seed", cfg.seed + 1);
      s.finish();
      detail::checked(s.path(""), [&] { spec.validate(); });
      if (cfg.dataset.test_samples_per_class == 0)
        throw ConfigError(s.path("test_samples_per_class"), "must be >= 1");
      cfg.dataset.synthetic = spec;
      ds.touch("mnist");
    } else if (kind == "mnist") {
      cfg.dataset.kind = data::Provenance::mnist;
      Section m = ds.child("mnist");
      auto& mc = cfg.dataset.mnist;
      for (auto [key, field] : {std::pair{"train_images", &mc.train_images}, std::pair{"train_labels", &mc.train_labels},
                                std::pair{"test_images", &mc.test_images}, std::pair{"test_labels", &mc.test_labels}}) {
        if (!m.has(key)) throw ConfigError(m.path(key), "required for mnist datasets");
        *field = detail::absolute_path(m.get(key, std::string()), base_dir);
        if (!std::filesystem::exists(*field)) throw ConfigError(m.path(key), "file not found: " + *field);
      }
      mc.train_limit = m.get("train_limit", mc.train_limit);
      mc.test_limit = m.get("test_limit", mc.test_limit);
      m.finish();
      ds.touch("synthetic");
    } else {
      throw ConfigError(ds.path("kind"), "expected synthetic or mnist");
    }
    ds.finish();
  }
  const bool mnist = cfg.dataset.kind == data::Provenance::mnist;
  const std::size_t k = cfg.dataset.num_classes();

  // model
  {
    Section m = top.child("model");
    std::vector<std::size_t> widths =
        mnist ? std::vector<std::size_t>{784, 100, 10} : std::vector<std::size_t>{2, 32, 32, k};
    widths = m.get("layer_widths", widths);
    cfg.model.layer_widths = widths;
    detail::checked(m.path("activation"),
                    [&] { cfg.model.activation = parse_activation(m.get("activation", std::string("relu"))); });
    cfg.model.seed = m.get("seed", cfg.seed);
    m.finish();
    detail::checked(m.path("layer_widths"), [&] { cfg.model.validate(); });
    if (cfg.model.input_dim() != cfg.dataset.input_dim())
      throw ConfigError(m.path("layer_widths"), "first width must equal the input dimension " +
                                                    std::to_string(cfg.dataset.input_dim()));
    if (cfg.model.num_classes() != k)
      throw ConfigError(m.path("layer_widths"),
                        "last width must equal the dataset class count " + std::to_string(k));
  }

  // Attack defaults depend on the data: pixel attacks for MNIST, l2 attacks
  // in an effectively unbounded box for the planar problems.
  attacks::AttackConfig attack_defaults;
  if (mnist) {
    attack_defaults = {.eps = 0.1, .steps = 8, .norm = attacks::Norm::linf};
  } else {
    attack_defaults = {.eps = 0.2, .steps = 8, .norm = attacks::Norm::l2, .clamp_lo = -100.0,
                       .clamp_hi = 100.0};
  }
  attack_defaults.seed = cfg.seed;

  // train
  {
    Section t = top.child("train");
    auto& tc = cfg.train;
    tc.epochs = t.get("epochs", std::size_t{mnist ? 20u : 200u});
    tc.batch_size = t.get("batch_size", tc.batch_size);
    tc.learning_rate = t.get("learning_rate", tc.learning_rate);
    tc.momentum = t.get("momentum", tc.momentum);
    tc.weight_decay = t.get("weight_decay", tc.weight_decay);
    tc.lr_drop_at = t.get("lr_drop_at", tc.lr_drop_at);
    tc.lr_drop_factor = t.get("lr_drop_factor", tc.lr_drop_factor);
    detail::checked(t.path("mode"), [&] { tc.mode = train::parse_mode(t.get("mode", std::string("ce"))); });
    tc.seed = t.get("seed", cfg.seed);
    tc.attack = detail::parse_attack(t.child("attack"), attack_defaults);
    t.finish();
    detail::checked(t.path(""), [&] { tc.validate(); });
  }

  // cost matrix
  {
    Section c = top.child("cost_matrix");
    if (c.has("path")) {
      cfg.cost.path = detail::absolute_path(c.get("path", std::string()), base_dir);
      if (!std::filesystem::exists(*cfg.cost.path))
        throw ConfigError(c.path("path"), "file not found: " + *cfg.cost.path);
    } else {
      c.touch("path");
    }
    cfg.cost.p = c.get("p", cfg.cost.p);
    if (!(cfg.cost.p > 0.0)) throw ConfigError(c.path("p"), "must be > 0");
    c.finish();
  }
  if (cfg.train.mode == train::Mode::wpgd && !cfg.cost.path)
    throw ConfigError("cost_matrix.path", "required when train.mode is wpgd");

  // eval
  {
    Section e = top.child("eval");
    cfg.eval.split = e.get("split", cfg.eval.split);
    if (cfg.eval.split != "test" && cfg.eval.split != "train")
      throw ConfigError(e.path("split"), "expected test or train");
    attacks::AttackConfig eval_defaults = cfg.train.attack;
    eval_defaults.steps = 20;
    eval_defaults.step_size.reset();
    eval_defaults.objective = attacks::Objective::ce;
    if (e.has("attacks")) {
      const json& list = e.raw("attacks");
      if (!list.is_array()) throw ConfigError(e.path("attacks"), "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i) {
        Section a(list[i], e.path("attacks") + "." + std::to_string(i));
        NamedAttack na;
        na.name = a.get("name", "attack" + std::to_string(i));
        na.config = detail::parse_attack(a, eval_defaults);  // parse_attack finishes the section
        for (const auto& prev : cfg.eval.attacks)
          if (prev.name == na.name) throw ConfigError(a.path("name"), "duplicate attack name");
        if (na.config.objective == attacks::Objective::wasserstein && !cfg.cost.path)
          throw ConfigError(a.path("objective"), "wasserstein attacks need cost_matrix.path");
        cfg.eval.attacks.push_back(std::move(na));
      }
    } else {
      e.touch("attacks");
      cfg.eval.attacks.push_back({"pgd20", eval_defaults});
    }
    Section b = e.child("boundary");
    const bool planar = cfg.model.input_dim() == 2;
    cfg.eval.boundary.enabled = b.get("enabled", planar);
    if (cfg.eval.boundary.enabled && !planar)
      throw ConfigError(b.path("enabled"), "boundary grids need a 2-D input model");
    metrics::BoundingBox box{-0.5, 1.5, -0.5, 1.5};
    if (!mnist && !cfg.dataset.synthetic.centers.empty()) {
      const auto& cs = cfg.dataset.synthetic.centers;
      box = {cs[0][0], cs[0][0], cs[0][1], cs[0][1]};
      for (const auto& c : cs) {
        box.x_min = std::min(box.x_min, c[0]);
        box.x_max = std::max(box.x_max, c[0]);
        box.y_min = std::min(box.y_min, c[1]);
        box.y_max = std::max(box.y_max, c[1]);
      }
      box.x_min -= 0.5;
      box.x_max += 0.5;
      box.y_min -= 0.5;
      box.y_max += 0.5;
    }
    if (b.has("bbox")) {
      const auto v = Section::convert<std::vector<double>>(b.raw("bbox"), b.path("bbox"));
      if (v.size() != 4 || !(v[0] < v[1] && v[2] < v[3]))
        throw ConfigError(b.path("bbox"), "expected [x_min, x_max, y_min, y_max] with min < max");
      box = {v[0], v[1], v[2], v[3]};
    } else {
      b.touch("bbox");
    }
    cfg.eval.boundary.box = box;
    cfg.eval.boundary.resolution = b.get("resolution", cfg.eval.boundary.resolution);
    if (cfg.eval.boundary.resolution < 2) throw ConfigError(b.path("resolution"), "must be >= 2");
    b.finish();
    e.finish();
  }
  top.finish();
  return cfg;
}

/// Fully materialised form; parse_experiment(resolved_json(c)) == c.
inline json resolved_json(const ExperimentConfig& c) {
  json ds;
  if (c.dataset.kind == data::Provenance::synthetic) {
    json centers = json::array();
    for (const auto& p : c.dataset.synthetic.centers) centers.push_back({p[0], p[1]});
    ds = {{"kind", "synthetic"},
          {"synthetic",
           {{"centers", centers},
            {"sigma", c.dataset.synthetic.sigma},
            {"samples_per_class", c.dataset.synthetic.samples_per_class},
            {"seed", c.dataset.synthetic.seed},
            {"test_samples_per_class", c.dataset.test_samples_per_class},
            {"test_seed", c.dataset.test_seed}}}};
  } else {
    const auto& m = c.dataset.mnist;
    ds = {{"kind", "mnist"},
          {"mnist",
           {{"train_images", m.train_images},
            {"train_labels", m.train_labels},
            {"test_images", m.test_images},
            {"test_labels", m.test_labels},
            {"train_limit", m.train_limit},
            {"test_limit", m.test_limit}}}};
  }
  json attack_list = json::array();
  for (const auto& a : c.eval.attacks) {
    json j = detail::attack_to_json(a.config);
    j["name"] = a.name;
    attack_list.push_back(j);
  }
  const auto& b = c.eval.boundary;
  json cost = {{"p", c.cost.p}};
  cost["path"] = c.cost.path ? json(*c.cost.path) : json(nullptr);
  return {{"seed", c.seed},
          {"output_dir", c.output_dir},
          {"dataset", ds},
          {"model", spec_to_json(c.model)},
          {"train",
           {{"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"momentum", c.train.momentum},
            {"weight_decay", c.train.weight_decay},
            {"lr_drop_at", c.train.lr_drop_at},
            {"lr_drop_factor", c.train.lr_drop_factor},
            {"mode", to_string(c.train.mode)},
            {"seed", c.train.seed},
            {"attack", detail::attack_to_json(c.train.attack)}}},
          {"eval",
           {{"split", c.eval.split},
            {"attacks", attack_list},
            {"boundary",
             {{"enabled", b.enabled},
              {"bbox", {b.box.x_min, b.box.x_max, b.box.y_min, b.box.y_max}},
              {"resolution", b.resolution}}}}},
          {"cost_matrix", cost}};
}

/// FNV-1a 64 of `text`, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Identity of an experiment: hash of the resolved config without the
/// output directory, so a run can be replayed into another directory.
inline std::string config_hash(const ExperimentConfig& c) {
  json j = resolved_json(c);
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

/// Applies `path=value` to a JSON tree. Path segments are object keys or
/// array indices; missing objects are created. The value is read as JSON
/// when it parses, otherwise as a string.
inline void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &root;
  std::stringstream ss(path);
  std::string seg;
  std::vector<std::string> segs;
  while (std::getline(ss, seg, '.')) segs.push_back(seg);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    const bool last = i + 1 == segs.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(s);
      } catch (const std::exception&) {
        throw ConfigError(path, "'" + s + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError(path, "array index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError(path, "'" + s + "' is below a non-object value");
      node = &(*node)[s];
    }
    if (last) *node = value;
  }
}

/// Divides every eps and step_size present in the tree by 255.
inline void scale_eps_from_bytes(json& root) {
  auto scale_attack = [](json& a) {
    for (const char* key : {"eps", "step_size"})
      if (a.contains(key) && a[key].is_number()) a[key] = a[key].get<double>() / 255.0;
  };
  if (root.contains("train") && root["train"].contains("attack")) scale_attack(root["train"]["attack"]);
  if (root.contains("eval") && root["eval"].contains("attacks") && root["eval"]["attacks"].is_array())
    for (auto& a : root["eval"]["attacks"]) scale_attack(a);
}

/// Reads a config file or a resolved snapshot ({"config": {...}, ...}).
inline json read_config_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("", "config file " + path.string() + " is not valid JSON");
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) return j.at("config");
  return j;
}

struct LoadOptions {
  std::vector<std::string> overrides;
  bool eps_in_bytes = false;
};

inline ExperimentConfig load_experiment(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  json j = read_config_json(path);
  for (const auto& o : opts.overrides) apply_override(j, o);
  if (opts.eps_in_bytes) scale_eps_from_bytes(j);
  return parse_experiment(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace wpgd::cli
