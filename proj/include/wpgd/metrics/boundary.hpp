#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "wpgd/error.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/parallel.hpp"

namespace wpgd::metrics {

struct BoundingBox {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

/// Predicted class on a resolution x resolution lattice that includes the
/// box corners. classes[iy * resolution + ix].
struct BoundaryGrid {
  BoundingBox box;
  std::size_t resolution = 0;
  std::vector<std::size_t> classes;

  double x(std::size_t ix) const {
    return box.x_min + (box.x_max - box.x_min) * static_cast<double>(ix) / static_cast<double>(resolution - 1);
  }
  double y(std::size_t iy) const {
    return box.y_min + (box.y_max - box.y_min) * static_cast<double>(iy) / static_cast<double>(resolution - 1);
  }
  std::size_t at(std::size_t ix, std::size_t iy) const { return classes[iy * resolution + ix]; }
};

inline BoundaryGrid boundary_grid(const MlpParams& params, const BoundingBox& box,
                                  std::size_t resolution, unsigned threads = 1) {
  if (params.spec().input_dim() != 2)
    throw ValidationError("boundary_grid: only 2-D input models are supported");
  if (resolution < 2) throw ValidationError("boundary_grid: resolution must be >= 2");
  if (!(box.x_min < box.x_max && box.y_min < box.y_max))
    throw ValidationError("boundary_grid: empty bounding box");
  BoundaryGrid g{box, resolution, std::vector<std::size_t>(resolution * resolution)};
  parallel_for(resolution, threads, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      const double pt[2] = {g.x(ix), g.y(iy)};
      g.classes[iy * resolution + ix] = predict(params, std::span<const double>(pt, 2)).predicted_class;
    }
  });
  return g;
}

/// Number of horizontally or vertically adjacent lattice pairs whose
/// classes differ; a proxy for total boundary length.
inline std::size_t boundary_changes(const BoundaryGrid& g) {
  std::size_t n = 0;
  for (std::size_t iy = 0; iy < g.resolution; ++iy)
    for (std::size_t ix = 0; ix < g.resolution; ++ix) {
      if (ix + 1 < g.resolution && g.at(ix, iy) != g.at(ix + 1, iy)) ++n;
      if (iy + 1 < g.resolution && g.at(ix, iy) != g.at(ix, iy + 1)) ++n;
    }
  return n;
}

/// CSV with header `x,y,class`, one row per lattice point.
inline void write_boundary_csv(const BoundaryGrid& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "x,y,class\n";
  char buf[96];
  for (std::size_t iy = 0; iy < g.resolution; ++iy)
    for (std::size_t ix = 0; ix < g.resolution; ++ix) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n", g.x(ix), g.y(iy), g.at(ix, iy));
      out << buf;
    }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace wpgd::metrics
