#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <fstream>

#include "wpgd/wpgd.hpp"

using namespace wpgd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "wpgd_test_checkpoint";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  auto p = init_params(MlpSpec{{5, 13, 7, 3}, Activation::tanh, 77});
  // Awkward values: subnormal, negative zero, values needing 17 digits.
  p.flat()[0] = 4.9406564584124654e-324;
  p.flat()[1] = -0.0;
  p.flat()[2] = 0.1 + 0.2;
  p.flat()[3] = 1.0 / 3.0;
  const auto path = scratch("ck.json");
  save_checkpoint(p, path);
  const auto q = load_checkpoint(path);
  ASSERT_EQ(q.spec(), p.spec());
  ASSERT_EQ(q.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(q.flat()[i]), std::bit_cast<std::uint64_t>(p.flat()[i]))
        << "param " << i;
  }
}

TEST(Checkpoint, SavedTwiceIsByteIdentical) {
  const auto p = init_params(MlpSpec{{2, 4, 3}, Activation::relu, 1});
  save_checkpoint(p, scratch("a.json"));
  save_checkpoint(p, scratch("b.json"));
  std::ifstream a(scratch("a.json")), b(scratch("b.json"));
  std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
}

TEST(Checkpoint, Errors) {
  EXPECT_THROW(load_checkpoint(scratch("missing.json")), IoError);
  {
    std::ofstream out(scratch("bad.json"));
    out << "{\"format\": \"wpgd-mlp\", ";
  }
  try {
    load_checkpoint(scratch("bad.json"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.offset(), 0u);
  }
  {
    std::ofstream out(scratch("wrong.json"));
    out << R"({"format":"wpgd-mlp","format_version":1,"spec":{"layer_widths":[2,2]},"params":[1,2]})";
  }
  EXPECT_THROW(load_checkpoint(scratch("wrong.json")), DimensionError);
  {
    std::ofstream out(scratch("version.json"));
    out << R"({"format":"wpgd-mlp","format_version":9,"spec":{"layer_widths":[1,2]},"params":[1,2,3,4]})";
  }
  EXPECT_THROW(load_checkpoint(scratch("version.json")), ValidationError);
}
