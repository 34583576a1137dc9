#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/version.hpp"

namespace wpgd {

// Checkpoint layout:
//   {"format": "wpgd-mlp", "format_version": 1,
//    "spec": {"layer_widths": [...], "activation": "relu", "seed": n},
//    "params": [flat doubles]}
// Doubles are written in shortest round-trip decimal form, so a
// save/load cycle reproduces every bit.

inline constexpr int kCheckpointFormatVersion = 1;

inline nlohmann::json spec_to_json(const MlpSpec& spec) {
  return {{"layer_widths", spec.layer_widths},
          {"activation", to_string(spec.activation)},
          {"seed", spec.seed}};
}

inline MlpSpec spec_from_json(const nlohmann::json& j) {
  MlpSpec spec;
  spec.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
  spec.activation = parse_activation(j.value("activation", std::string("relu")));
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.validate();
  return spec;
}

inline nlohmann::json checkpoint_to_json(const MlpParams& params) {
  nlohmann::json j;
  j["format"] = "wpgd-mlp";
  j["format_version"] = kCheckpointFormatVersion;
  j["spec"] = spec_to_json(params.spec());
  j["params"] = std::vector<double>(params.flat().begin(), params.flat().end());
  return j;
}

inline MlpParams checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "wpgd-mlp")
      throw ValidationError("checkpoint: unknown format tag");
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion)
      throw ValidationError("checkpoint: unsupported format version");
    return MlpParams(spec_from_json(j.at("spec")), j.at("params").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(params).dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

inline MlpParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("checkpoint " + path.string() + ": " + e.what(), e.byte);
  }
  return checkpoint_from_json(j);
}

}  // namespace wpgd
