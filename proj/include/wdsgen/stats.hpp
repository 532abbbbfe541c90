#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace wdsgen {

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace stats {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw EmptyInput("mean of empty range");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation (n-1 denominator); 0 when n == 1.
inline double sample_std(std::span<const double> v) {
  if (v.empty()) throw EmptyInput("std of empty range");
  if (v.size() == 1) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Linear interpolation between order statistics (the common "type 7"
// scheme): h = (n-1)p, result = x[floor(h)] + frac(h) * (x[floor(h)+1] -
// x[floor(h)]). `sorted` must be ascending.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptyInput("quantile of empty range");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  p = std::clamp(p, 0.0, 1.0);
  const double h = static_cast<double>(n - 1) * p;
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

inline double quantile(std::span<const double> v, double p) {
  std::vector<double> tmp(v.begin(), v.end());
  std::sort(tmp.begin(), tmp.end());
  return quantile_sorted(tmp, p);
}

inline double minimum(std::span<const double> v) {
  if (v.empty()) throw EmptyInput("min of empty range");
  return *std::min_element(v.begin(), v.end());
}

inline double maximum(std::span<const double> v) {
  if (v.empty()) throw EmptyInput("max of empty range");
  return *std::max_element(v.begin(), v.end());
}

// Pearson correlation; 0 when either side is constant.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

// Autocorrelation at integer lag, mean-removed.
inline double autocorrelation(std::span<const double> v, std::size_t lag) {
  const std::size_t n = v.size();
  if (lag >= n || n < 2) return 0.0;
  const double m = mean(v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) den += (v[i] - m) * (v[i] - m);
  for (std::size_t i = 0; i + lag < n; ++i) num += (v[i] - m) * (v[i + lag] - m);
  if (den <= 0.0) return 0.0;
  return num / den;
}

// Min-max rescale to [0,1]; a constant series maps to the constant 0.5 so
// the transform stays total.
inline std::vector<double> minmax_normalize(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  if (out.empty()) return out;
  const double lo = minimum(v), hi = maximum(v);
  if (hi <= lo) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  const double span = hi - lo;
  for (double& x : out) x = (x - lo) / span; // x == hi divides to exactly 1
  return out;
}

}  // namespace stats
}  // namespace wdsgen
