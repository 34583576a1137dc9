#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/example.hpp"

namespace wpgd::data {

enum class Provenance { synthetic, mnist };

inline const char* to_string(Provenance p) { return p == Provenance::synthetic ? "synthetic" : "mnist"; }

struct Dataset {
  std::vector<LabeledExample> examples;
  std::size_t num_classes = 0;
  std::size_t input_dim = 0;
  Provenance provenance = Provenance::synthetic;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(num_classes, 0);
    for (const auto& e : examples) ++counts.at(e.label);
    return counts;
  }

  void validate() const {
    for (std::size_t n = 0; n < examples.size(); ++n) {
      const auto& e = examples[n];
      if (e.label >= num_classes)
        throw ValidationError("dataset: example " + std::to_string(n) + " has label " +
                              std::to_string(e.label) + " >= K=" + std::to_string(num_classes));
      if (e.input.size() != input_dim)
        throw DimensionError("dataset: example " + std::to_string(n) + " has wrong input size");
      if (!e.input.all_finite())
        throw ValidationError("dataset: example " + std::to_string(n) + " has non-finite input");
    }
  }
};

/// Writes `x1,...,xd,label` rows with a header line.
inline void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < d.input_dim; ++i) out << 'x' << (i + 1) << ',';
  out << "label\n";
  char buf[32];
  for (const auto& e : d.examples) {
    for (double v : e.input.values()) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << e.label << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace wpgd::data
