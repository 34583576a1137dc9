#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"
#include "wpgd/random.hpp"

namespace wpgd::train {

/// Randomly subsamples `minority_class` to floor(ratio * m) examples, where
/// m is the largest count among the other classes. Other classes and the
/// relative order of kept examples are untouched.
inline data::Dataset unbalance(const data::Dataset& d, std::size_t minority_class, double ratio,
                               std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("unbalance: ratio must lie in (0, 1]");
  if (minority_class >= d.num_classes)
    throw ValidationError("unbalance: class " + std::to_string(minority_class) + " out of range");
  const auto counts = d.class_counts();
  std::size_t majority = 0;
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (c != minority_class) majority = std::max(majority, counts[c]);
  const auto target = static_cast<std::size_t>(ratio * static_cast<double>(majority));
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.examples[i].label == minority_class) members.push_back(i);
  const std::size_t keep = std::min(target, members.size());
  if (keep == 0) throw ValidationError("unbalance: class would be empty after subsampling");

  Rng rng = make_rng(seed, minority_class);
  shuffle(members.begin(), members.end(), rng);
  std::vector<char> kept(d.size(), 1);
  for (std::size_t i = keep; i < members.size(); ++i) kept[members[i]] = 0;

  data::Dataset out;
  out.num_classes = d.num_classes;
  out.input_dim = d.input_dim;
  out.provenance = d.provenance;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (kept[i]) out.examples.push_back(d.examples[i]);
  return out;
}

}  // namespace wpgd::train
