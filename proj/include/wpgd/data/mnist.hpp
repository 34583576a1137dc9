#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "wpgd/data/dataset.hpp"
#include "wpgd/error.hpp"

namespace wpgd::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // uint8, rank 3
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // uint8, rank 1

namespace detail {

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t offset,
                               const std::string& what) {
  if (offset + 4 > b.size()) throw ParseError(what + ": truncated header", b.size());
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

}  // namespace detail

struct IdxImages {
  std::size_t count = 0, rows = 0, cols = 0;
  std::vector<unsigned char> pixels;
};

inline IdxImages parse_idx_images(const std::vector<unsigned char>& b, const std::string& what) {
  const auto magic = detail::read_be32(b, 0, what);
  if (magic != kIdxImageMagic) throw ParseError(what + ": bad image magic", 0);
  IdxImages img;
  img.count = detail::read_be32(b, 4, what);
  img.rows = detail::read_be32(b, 8, what);
  img.cols = detail::read_be32(b, 12, what);
  const std::size_t need = 16 + img.count * img.rows * img.cols;
  if (b.size() < need) throw ParseError(what + ": truncated pixel data", b.size());
  img.pixels.assign(b.begin() + 16, b.begin() + static_cast<std::ptrdiff_t>(need));
  return img;
}

inline std::vector<unsigned char> parse_idx_labels(const std::vector<unsigned char>& b,
                                                   const std::string& what) {
  const auto magic = detail::read_be32(b, 0, what);
  if (magic != kIdxLabelMagic) throw ParseError(what + ": bad label magic", 0);
  const std::size_t count = detail::read_be32(b, 4, what);
  if (b.size() < 8 + count) throw ParseError(what + ": truncated label data", b.size());
  std::vector<unsigned char> labels(b.begin() + 8, b.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i)
    if (labels[i] >= 10) throw ParseError(what + ": label byte >= 10", 8 + i);
  return labels;
}

/// MNIST from IDX files, pixels scaled to [0, 1]. `limit` > 0 keeps only
/// the first `limit` examples.
inline Dataset load_mnist(const std::filesystem::path& images_path,
                          const std::filesystem::path& labels_path, std::size_t limit = 0) {
  const auto img = parse_idx_images(detail::read_bytes(images_path), images_path.string());
  const auto labels = parse_idx_labels(detail::read_bytes(labels_path), labels_path.string());
  if (img.count != labels.size())
    throw ParseError("mnist: " + std::to_string(img.count) + " images but " +
                         std::to_string(labels.size()) + " labels",
                     4);
  const std::size_t n = limit > 0 ? std::min(limit, img.count) : img.count;
  const std::size_t dim = img.rows * img.cols;
  Dataset d;
  d.num_classes = 10;
  d.input_dim = dim;
  d.provenance = Provenance::mnist;
  d.examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> px(dim);
    for (std::size_t p = 0; p < dim; ++p) px[p] = img.pixels[i * dim + p] / 255.0;
    d.examples.push_back({Tensor({dim}, std::move(px)), labels[i]});
  }
  return d;
}

}  // namespace wpgd::data
