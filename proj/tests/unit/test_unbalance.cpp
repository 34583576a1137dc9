#include <gtest/gtest.h>

#include <algorithm>

#include "wpgd/wpgd.hpp"

using namespace wpgd;

namespace {

data::Dataset balanced(std::size_t per_class) {
  data::SyntheticDataSpec s;
  s.centers = {{0, 0}, {1, 1}};
  s.samples_per_class = per_class;
  s.seed = 1;
  return data::gen_synthetic(s);
}

}  // namespace

TEST(Unbalance, RatioOneKeepsEverything) {
  const auto d = balanced(50);
  const auto u = train::unbalance(d, 0, 1.0, 3);
  EXPECT_EQ(u.examples, d.examples);
}

TEST(Unbalance, ThreeHundredOfAThousand) {
  const auto d = balanced(1000);
  const auto u = train::unbalance(d, 1, 0.3, 3);
  EXPECT_EQ(u.class_counts(), (std::vector<std::size_t>{1000, 300}));
}

TEST(Unbalance, SubsetOfOriginalAndDeterministic) {
  const auto d = balanced(200);
  const auto a = train::unbalance(d, 0, 0.45, 8);
  const auto b = train::unbalance(d, 0, 0.45, 8);
  EXPECT_EQ(a.examples, b.examples);
  EXPECT_NE(a.examples, train::unbalance(d, 0, 0.45, 9).examples);
  // Order preserved and every kept example present in the source.
  std::size_t cursor = 0;
  for (const auto& e : a.examples) {
    while (cursor < d.size() && !(d.examples[cursor] == e)) ++cursor;
    ASSERT_LT(cursor, d.size());
    ++cursor;
  }
}

TEST(Unbalance, Errors) {
  const auto d = balanced(3);
  EXPECT_THROW(train::unbalance(d, 0, 0.1, 1), ValidationError);  // floor(0.3) = 0
  EXPECT_THROW(train::unbalance(d, 0, 0.0, 1), ValidationError);
  EXPECT_THROW(train::unbalance(d, 0, 1.5, 1), ValidationError);
  EXPECT_THROW(train::unbalance(d, 2, 0.5, 1), ValidationError);
}
