#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdsgen/rng.hpp"

namespace wdsgen {

struct MissingCoordinates : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square height grid of side 2^k+1 produced by midpoint displacement.
struct TerrainMap {
  int side = 0;
  std::vector<double> heights; // row-major, side*side

  double at(int r, int c) const { return heights[static_cast<std::size_t>(r) * side + c]; }
  double& at(int r, int c) { return heights[static_cast<std::size_t>(r) * side + c]; }

  // Bilinear sample at fractional grid coordinates (u, v) in [0, side-1].
  double sample(double u, double v) const {
    u = std::clamp(u, 0.0, static_cast<double>(side - 1));
    v = std::clamp(v, 0.0, static_cast<double>(side - 1));
    const int c0 = std::min(static_cast<int>(u), side - 2 < 0 ? 0 : side - 2);
    const int r0 = std::min(static_cast<int>(v), side - 2 < 0 ? 0 : side - 2);
    if (side == 1) return at(0, 0);
    const double fu = u - c0, fv = v - r0;
    const double a = at(r0, c0) * (1 - fu) + at(r0, c0 + 1) * fu;
    const double b = at(r0 + 1, c0) * (1 - fu) + at(r0 + 1, c0 + 1) * fu;
    return a * (1 - fv) + b * fv;
  }
};

// Classic diamond-square: corners seeded uniformly in corner_range, then the
// diamond step sets each square center to the mean of its four corners plus
// noise, and the square step sets edge midpoints to the mean of their
// (3 or 4) diamond neighbors plus noise. Noise amplitude starts at half the
// corner span, halves at each subdivision level, and is scaled by
// `roughness`; roughness 0 gives pure averaging.
inline TerrainMap diamond_square(int grid_side_exponent,
                                 std::pair<double, double> corner_range,
                                 double roughness, Rng& rng) {
  if (grid_side_exponent < 1) throw std::invalid_argument("grid_side_exponent must be >= 1");
  const int side = (1 << grid_side_exponent) + 1;
  TerrainMap map;
  map.side = side;
  map.heights.assign(static_cast<std::size_t>(side) * side, 0.0);

  const double lo = corner_range.first, hi = corner_range.second;
  map.at(0, 0) = rng.uniform(lo, hi);
  map.at(0, side - 1) = rng.uniform(lo, hi);
  map.at(side - 1, 0) = rng.uniform(lo, hi);
  map.at(side - 1, side - 1) = rng.uniform(lo, hi);

  double amp = (hi - lo) * 0.5;
  for (int step = side - 1; step > 1; step /= 2) {
    const int half = step / 2;
    // Diamond step.
    for (int r = half; r < side; r += step)
      for (int c = half; c < side; c += step) {
        const double avg = (map.at(r - half, c - half) + map.at(r - half, c + half) +
                            map.at(r + half, c - half) + map.at(r + half, c + half)) /
                           4.0;
        map.at(r, c) = avg + roughness * amp * rng.uniform(-1.0, 1.0);
      }
    // Square step.
    for (int r = 0; r < side; r += half)
      for (int c = (r / half) % 2 == 0 ? half : 0; c < side; c += step) {
        double sum = 0.0;
        int cnt = 0;
        if (r - half >= 0) { sum += map.at(r - half, c); ++cnt; }
        if (r + half < side) { sum += map.at(r + half, c); ++cnt; }
        if (c - half >= 0) { sum += map.at(r, c - half); ++cnt; }
        if (c + half < side) { sum += map.at(r, c + half); ++cnt; }
        map.at(r, c) = sum / cnt + roughness * amp * rng.uniform(-1.0, 1.0);
      }
    amp *= 0.5;
  }
  return map;
}

// Project network nodes onto a diamond-square height map and read their
// elevations off it. The coordinate bounding box is stretched over the
// grid; node heights are bilinearly interpolated and, when the generated
// grid exceeds elevation_bounds, affinely rescaled into them.
inline std::map<std::string, double> terrain_elevations(
    const std::map<std::string, std::array<double, 2>>& coordinates,
    std::span<const std::string> nodes, int grid_side_exponent,
    std::pair<double, double> corner_seed_range, double roughness,
    std::pair<double, double> elevation_bounds, Rng& rng) {
  for (const auto& n : nodes)
    if (!coordinates.count(std::string(n)))
      throw MissingCoordinates("node " + std::string(n) + " has no coordinates");

  const auto map = diamond_square(grid_side_exponent, corner_seed_range, roughness, rng);

  const double gmin = *std::min_element(map.heights.begin(), map.heights.end());
  const double gmax = *std::max_element(map.heights.begin(), map.heights.end());
  const auto [blo, bhi] = elevation_bounds;
  double scale = 1.0, shift = 0.0;
  if (gmax > gmin && (gmin < blo || gmax > bhi)) {
    scale = (bhi - blo) / (gmax - gmin);
    shift = blo - gmin * scale;
  }

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& n : nodes) {
    const auto& xy = coordinates.at(std::string(n));
    if (first) {
      xmin = xmax = xy[0];
      ymin = ymax = xy[1];
      first = false;
    } else {
      xmin = std::min(xmin, xy[0]);
      xmax = std::max(xmax, xy[0]);
      ymin = std::min(ymin, xy[1]);
      ymax = std::max(ymax, xy[1]);
    }
  }
  const double xspan = xmax > xmin ? xmax - xmin : 1.0;
  const double yspan = ymax > ymin ? ymax - ymin : 1.0;

  std::map<std::string, double> out;
  for (const auto& n : nodes) {
    const auto& xy = coordinates.at(std::string(n));
    const double u = (xy[0] - xmin) / xspan * (map.side - 1);
    const double v = (xy[1] - ymin) / yspan * (map.side - 1);
    const double h = map.sample(u, v) * scale + shift;
    out[std::string(n)] = std::clamp(h, blo, bhi);
  }
  return out;
}

}  // namespace wdsgen
