#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gperc/errors.hpp"
#include "gperc/model.hpp"

namespace gperc {

struct Window {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  int resolution = 2000;  // cells per axis
};

namespace detail {

inline void validate_window(const Window& w) {
  if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max))
    throw ConfigError("window: min must be below max on both axes");
  if (w.resolution < 2) throw ConfigError("window: resolution must be >= 2");
}

}  // namespace detail

// Sampled zero-set of a 2-input model. For a gated model the curve is the
// hyperbola X2 = -(w1*X1 + b) / (w3*X1 + w2) with a vertical asymptote at
// X1 = -w2/w3 and a horizontal one at X2 = -w1/w3; with w3 = 0 it is the
// straight line of a plain perceptron.
struct BoundaryPolyline {
  std::vector<std::vector<std::array<double, 2>>> branches;
  std::optional<double> asymptote_x;
  std::optional<double> asymptote_y;
};

inline BoundaryPolyline boundary_curve(const GatedModel& model, const Window& window,
                                       int samples) {
  detail::validate_window(window);
  if (samples < 2) throw ConfigError("boundary_curve: need at least 2 samples");
  if (model.input_weights.size() != 2)
    throw ConfigError("boundary_curve: requires a 2-input model");
  const double w1 = model.input_weights[0];
  const double w2 = model.input_weights[1];
  const double w3 = model.gate_enabled ? model.gate_weight : 0.0;
  if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0)
    throw GeometryError("boundary_curve: all weights zero, boundary undefined");

  BoundaryPolyline poly;
  if (w3 != 0.0) {
    poly.asymptote_x = -w2 / w3;
    poly.asymptote_y = -w1 / w3;
  }

  if (w3 == 0.0 && w2 == 0.0) {
    // Vertical line x = -b/w1.
    const double x = -model.bias / w1;
    poly.branches.push_back({{x, window.y_min}, {x, window.y_max}});
    return poly;
  }

  const double width = window.x_max - window.x_min;
  const double exclusion = width / static_cast<double>(samples);
  std::vector<std::array<double, 2>> branch;
  for (int i = 0; i < samples; ++i) {
    const double x =
        window.x_min + width * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double denom = w3 * x + w2;
    if (poly.asymptote_x && std::abs(x - *poly.asymptote_x) < exclusion) {
      if (!branch.empty()) {
        poly.branches.push_back(std::move(branch));
        branch.clear();
      }
      continue;
    }
    if (denom == 0.0) continue;
    branch.push_back({x, -(w1 * x + model.bias) / denom});
  }
  if (!branch.empty()) poly.branches.push_back(std::move(branch));
  return poly;
}

// Grid of connected same-sign-tuple cells. Region ids are assigned in
// row-major scan order, so the labeling is deterministic.
struct RegionRaster {
  int resolution = 0;
  std::vector<std::int32_t> cell_labels;     // resolution x resolution, row-major
  std::vector<std::uint32_t> region_signs;   // per region id, bit k = model k positive
  int region_count = 0;

  std::int32_t label_at(int ix, int iy) const {
    return cell_labels[static_cast<std::size_t>(iy) * static_cast<std::size_t>(resolution) + ix];
  }
};

// Signs of all k models at every cell center, then 4-neighbor flood fill
// over cells with identical sign tuples. Zero sums count as positive.
// 8-connectivity would fuse regions that touch only at a hyperbola saddle.
inline RegionRaster rasterize_signs(std::span<const GatedModel> models,
                                    const Window& window) {
  detail::validate_window(window);
  if (models.empty()) throw ConfigError("rasterize_signs: need at least one model");
  if (models.size() > 32) throw ConfigError("rasterize_signs: at most 32 models");
  for (const GatedModel& m : models)
    if (m.input_weights.size() != 2)
      throw ConfigError("rasterize_signs: requires 2-input models");

  const int res = window.resolution;
  const std::size_t cells = static_cast<std::size_t>(res) * static_cast<std::size_t>(res);
  const double dx = (window.x_max - window.x_min) / static_cast<double>(res);
  const double dy = (window.y_max - window.y_min) / static_cast<double>(res);

  std::vector<std::uint32_t> masks(cells);
  std::array<double, 2> x{};
  for (int iy = 0; iy < res; ++iy) {
    x[1] = window.y_min + (iy + 0.5) * dy;
    for (int ix = 0; ix < res; ++ix) {
      x[0] = window.x_min + (ix + 0.5) * dx;
      std::uint32_t mask = 0;
      for (std::size_t k = 0; k < models.size(); ++k)
        if (weighted_sum(models[k], x) >= 0.0) mask |= (1u << k);
      masks[static_cast<std::size_t>(iy) * res + ix] = mask;
    }
  }

  RegionRaster raster;
  raster.resolution = res;
  raster.cell_labels.assign(cells, -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < cells; ++start) {
    if (raster.cell_labels[start] != -1) continue;
    const std::int32_t id = raster.region_count++;
    raster.region_signs.push_back(masks[start]);
    raster.cell_labels[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const int ix = static_cast<int>(c % static_cast<std::size_t>(res));
      const int iy = static_cast<int>(c / static_cast<std::size_t>(res));
      const std::array<std::ptrdiff_t, 4> neighbors = {
          ix > 0 ? static_cast<std::ptrdiff_t>(c) - 1 : -1,
          ix < res - 1 ? static_cast<std::ptrdiff_t>(c) + 1 : -1,
          iy > 0 ? static_cast<std::ptrdiff_t>(c) - res : -1,
          iy < res - 1 ? static_cast<std::ptrdiff_t>(c) + res : -1};
      for (std::ptrdiff_t n : neighbors) {
        if (n < 0) continue;
        const auto u = static_cast<std::size_t>(n);
        if (raster.cell_labels[u] == -1 && masks[u] == masks[start]) {
          raster.cell_labels[u] = id;
          stack.push_back(u);
        }
      }
    }
  }
  return raster;
}

inline int count_regions(std::span<const GatedModel> models, const Window& window,
                         int resolution) {
  Window w = window;
  w.resolution = resolution;
  return rasterize_signs(models, w).region_count;
}

// ---- exports -----------------------------------------------------------

// ASCII PGM, one gray level per region id, top row = y_max.
inline void write_pgm(const RegionRaster& raster, std::ostream& out) {
  const int res = raster.resolution;
  out << "P2\n" << res << ' ' << res << '\n'
      << std::max(raster.region_count - 1, 1) << '\n';
  for (int iy = res - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < res; ++ix) {
      if (ix) out << ' ';
      out << raster.label_at(ix, iy);
    }
    out << '\n';
  }
}

// JSON sidecar: region id -> sign tuple (+1/-1 per model).
inline std::string region_signs_json(const RegionRaster& raster, std::size_t k) {
  std::ostringstream out;
  out << "{\"region_count\":" << raster.region_count << ",\"signs\":{";
  for (int id = 0; id < raster.region_count; ++id) {
    if (id) out << ',';
    out << '"' << id << "\":[";
    for (std::size_t j = 0; j < k; ++j) {
      if (j) out << ',';
      out << ((raster.region_signs[static_cast<std::size_t>(id)] >> j) & 1u ? 1 : -1);
    }
    out << ']';
  }
  out << "}}";
  return out.str();
}

inline std::string boundary_csv(const BoundaryPolyline& poly) {
  std::ostringstream out;
  out << "branch_id,x1,x2\n";
  char buf[96];
  for (std::size_t b = 0; b < poly.branches.size(); ++b)
    for (const auto& p : poly.branches[b]) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", b, p[0], p[1]);
      out << buf;
    }
  return out.str();
}

// Raw model outputs sampled on a grid, for output-space scatter plots of
// small networks: columns x1,x2,y1..yk.
inline std::string output_scatter_csv(std::span<const GatedModel> models,
                                      const Window& window, int samples_per_axis) {
  detail::validate_window(window);
  if (samples_per_axis < 2)
    throw ConfigError("output_scatter_csv: need at least 2 samples per axis");
  std::ostringstream out;
  out << "x1,x2";
  for (std::size_t k = 0; k < models.size(); ++k) out << ",y" << (k + 1);
  out << '\n';
  char buf[40];
  const double dx = (window.x_max - window.x_min) / (samples_per_axis - 1);
  const double dy = (window.y_max - window.y_min) / (samples_per_axis - 1);
  std::array<double, 2> x{};
  for (int iy = 0; iy < samples_per_axis; ++iy) {
    x[1] = window.y_min + iy * dy;
    for (int ix = 0; ix < samples_per_axis; ++ix) {
      x[0] = window.x_min + ix * dx;
      std::snprintf(buf, sizeof(buf), "%.17g", x[0]);
      out << buf;
      std::snprintf(buf, sizeof(buf), ",%.17g", x[1]);
      out << buf;
      for (const GatedModel& m : models) {
        std::snprintf(buf, sizeof(buf), ",%.17g", weighted_sum(m, x));
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

// ---- committed generic fixtures -----------------------------------------
//
// Weight sets whose asymptote crossings all fall inside the unit window;
// validated by the resolution-stability tests. In the unit window they
// produce the reference region counts: gated-1 -> 3, plain-2 -> 4,
// plain-3 -> 7, gated-2 -> 7, gated-3 -> 13.

namespace fixtures {

inline GatedModel make(double w1, double w2, double w3, double b, bool gated) {
  GatedModel m;
  m.input_weights = {w1, w2};
  m.gate_weight = w3;
  m.bias = b;
  m.gate_enabled = gated;
  return m;
}

}  // namespace fixtures

inline std::vector<GatedModel> region_fixture(std::string_view name) {
  using fixtures::make;
  if (name == "gated-1") {
    return {make(0.3, -0.2, 1.0, -0.2, true)};
  }
  if (name == "gated-2") {
    return {make(0.3, -0.2, 1.0, -0.2, true),
            make(-0.25, 0.35, 1.0, 0.0325, true)};
  }
  if (name == "gated-3") {
    return {make(0.3, -0.2, 1.0, -0.2, true),
            make(-0.25, 0.35, 1.0, 0.0325, true),
            make(0.3, 0.3, 1.0, 0.03, true)};
  }
  if (name == "plain-2") {
    return {make(1.0, -1.0, 0.0, 0.0, false), make(1.0, 1.0, 0.0, 0.0, false)};
  }
  if (name == "plain-3") {
    return {make(1.0, -1.0, 0.0, 0.0, false), make(1.0, 1.0, 0.0, -0.2, false),
            make(1.0, 0.0, 0.0, 0.3, false)};
  }
  throw ConfigError("unknown region fixture: " + std::string(name));
}

}  // namespace gperc
