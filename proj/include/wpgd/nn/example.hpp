#pragma once

#include <cstddef>
#include <vector>

#include "wpgd/nn/tensor.hpp"

namespace wpgd {

struct LabeledExample {
  Tensor input;
  std::size_t label = 0;

  std::vector<double> one_hot(std::size_t num_classes) const {
    std::vector<double> y(num_classes, 0.0);
    y.at(label) = 1.0;
    return y;
  }

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

}  // namespace wpgd
