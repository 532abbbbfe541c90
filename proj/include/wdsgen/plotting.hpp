#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wdsgen {

// Minimal raster canvas writing binary PPM (P6). Enough for the diagnostic
// images: correlation heat maps, scatter clouds, and time-series strips.
struct Image {
  int width = 0, height = 0;
  std::vector<unsigned char> rgb; // 3 bytes per pixel, row-major

  Image(int w, int h, std::array<unsigned char, 3> fill = {255, 255, 255})
      : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
      rgb[i] = fill[0];
      rgb[i + 1] = fill[1];
      rgb[i + 2] = fill[2];
    }
  }

  void set(int x, int y, std::array<unsigned char, 3> c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
  }

  void fill_rect(int x0, int y0, int x1, int y1, std::array<unsigned char, 3> c) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) set(x, y, c);
  }

  void line(int x0, int y0, int x1, int y1, std::array<unsigned char, 3> c) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void save_ppm(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw std::runtime_error("cannot write image " + path.string());
    out << "P6\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()),
              static_cast<std::streamsize>(rgb.size()));
  }
};

namespace plot {

// Blue -> white -> red, for correlation values in [-1, 1].
inline std::array<unsigned char, 3> diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  auto ch = [](double x) {
    return static_cast<unsigned char>(std::clamp(x, 0.0, 255.0));
  };
  if (v < 0) {
    const double t = v + 1.0; // 0..1
    return {ch(60 + 195 * t), ch(90 + 165 * t), 255};
  }
  const double t = v; // 0..1
  return {255, ch(255 - 165 * t), ch(255 - 195 * t)};
}

// Dark blue -> yellow sequential map for densities in [0, 1].
inline std::array<unsigned char, 3> sequential(double v) {
  v = std::clamp(v, 0.0, 1.0);
  auto ch = [](double x) {
    return static_cast<unsigned char>(std::clamp(x, 0.0, 255.0));
  };
  return {ch(40 + 215 * v), ch(30 + 200 * v), ch(90 - 60 * v + 30)};
}

inline Image heatmap(const std::vector<std::vector<double>>& matrix, int cell = 4) {
  const int n = static_cast<int>(matrix.size());
  const int m = n > 0 ? static_cast<int>(matrix[0].size()) : 0;
  Image img(std::max(1, m * cell), std::max(1, n * cell));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c)
      img.fill_rect(c * cell, r * cell, (c + 1) * cell, (r + 1) * cell,
                    diverging(matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
  return img;
}

inline Image scatter(std::span<const double> xs, std::span<const double> ys, int width = 640,
                     int height = 480) {
  Image img(width, height);
  if (xs.empty()) return img;
  const double xmin = *std::min_element(xs.begin(), xs.end());
  const double xmax = *std::max_element(xs.begin(), xs.end());
  const double ymin = *std::min_element(ys.begin(), ys.end());
  const double ymax = *std::max_element(ys.begin(), ys.end());
  const double xs_span = xmax > xmin ? xmax - xmin : 1.0;
  const double ys_span = ymax > ymin ? ymax - ymin : 1.0;
  // 2D density bins drive the color so dense clouds read like the contours.
  const int bx = 64, by = 48;
  std::vector<double> bins(static_cast<std::size_t>(bx) * by, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int cx = std::min(bx - 1, static_cast<int>((xs[i] - xmin) / xs_span * bx));
    const int cy = std::min(by - 1, static_cast<int>((ys[i] - ymin) / ys_span * by));
    bins[static_cast<std::size_t>(cy) * bx + cx] += 1.0;
  }
  const double peak = *std::max_element(bins.begin(), bins.end());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int px = static_cast<int>((xs[i] - xmin) / xs_span * (width - 9)) + 4;
    const int py = height - 5 - static_cast<int>((ys[i] - ymin) / ys_span * (height - 9));
    const int cx = std::min(bx - 1, static_cast<int>((xs[i] - xmin) / xs_span * bx));
    const int cy = std::min(by - 1, static_cast<int>((ys[i] - ymin) / ys_span * by));
    const double d = peak > 0 ? bins[static_cast<std::size_t>(cy) * bx + cx] / peak : 0.0;
    img.fill_rect(px - 1, py - 1, px + 1, py + 1, sequential(1.0 - d));
  }
  return img;
}

inline Image line_chart(const std::vector<std::vector<double>>& series, int width = 900,
                        int height = 300) {
  Image img(width, height);
  static const std::array<std::array<unsigned char, 3>, 6> palette{{{{200, 40, 40}},
                                                                    {{40, 110, 200}},
                                                                    {{40, 160, 60}},
                                                                    {{200, 140, 20}},
                                                                    {{130, 60, 180}},
                                                                    {{90, 90, 90}}}};
  double lo = 0.0, hi = 1.0;
  bool first = true;
  std::size_t longest = 0;
  for (const auto& s : series) {
    longest = std::max(longest, s.size());
    for (double v : s) {
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  if (longest < 2) return img;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const auto color = palette[si % palette.size()];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      auto px = [&](std::size_t k) {
        return 4 + static_cast<int>(static_cast<double>(k) / (longest - 1) * (width - 9));
      };
      auto py = [&](double v) {
        return height - 5 - static_cast<int>((v - lo) / (hi - lo) * (height - 9));
      };
      img.line(px(i), py(s[i]), px(i + 1), py(s[i + 1]), color);
    }
  }
  return img;
}

}  // namespace plot
}  // namespace wdsgen
