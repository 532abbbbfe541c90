#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace wdsgen {

struct BadWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Least-squares fit of a degree-`order` polynomial through
// series[first..last], evaluated at position `at` (indices relative to the
// series). Abscissae are centered on `at` so only the constant coefficient
// is needed.
inline double savgol_fit_eval(std::span<const double> series, std::size_t first,
                              std::size_t last, std::size_t at, int order) {
  const auto n = static_cast<Eigen::Index>(last - first + 1);
  // A truncated edge window may hold fewer points than order+1.
  order = std::min<int>(order, static_cast<int>(n) - 1);
  Eigen::MatrixXd v(n, order + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double x = static_cast<double>(first + static_cast<std::size_t>(r)) -
                     static_cast<double>(at);
    double pw = 1.0;
    for (int c = 0; c <= order; ++c) {
      v(r, c) = pw;
      pw *= x;
    }
    y(r) = series[first + static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd coef = (v.transpose() * v).ldlt().solve(v.transpose() * y);
  return coef(0);
}

}  // namespace detail

// Savitzky-Golay smoothing: local least-squares polynomial fit of the given
// order over a sliding window. Edge points are fitted on the window
// truncated to the series bounds, so output length equals input length.
inline std::vector<double> smooth_savgol(std::span<const double> series, int window,
                                         int order) {
  if (window < 1 || window % 2 == 0) throw BadWindow("window must be a positive odd integer");
  if (order < 0 || order >= window) throw BadWindow("order must satisfy 0 <= order < window");
  if (series.size() < static_cast<std::size_t>(window))
    throw BadWindow("series shorter than window");

  const std::size_t n = series.size();
  const auto half = static_cast<std::size_t>(window / 2);
  std::vector<double> out(n);

  // Interior points share one set of convolution weights.
  Eigen::VectorXd weights;
  {
    Eigen::MatrixXd v(window, order + 1);
    for (int r = 0; r < window; ++r) {
      const double x = static_cast<double>(r) - static_cast<double>(half);
      double pw = 1.0;
      for (int c = 0; c <= order; ++c) {
        v(r, c) = pw;
        pw *= x;
      }
    }
    const Eigen::MatrixXd pinv = (v.transpose() * v).ldlt().solve(v.transpose());
    weights = pinv.row(0);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (i >= half && i + half < n) {
      double s = 0.0;
      for (int k = 0; k < window; ++k) s += weights(k) * series[i - half + static_cast<std::size_t>(k)];
      out[i] = s;
    } else {
      const std::size_t first = i >= half ? i - half : 0;
      const std::size_t last = std::min(n - 1, i + half);
      out[i] = detail::savgol_fit_eval(series, first, last, i, order);
    }
  }
  return out;
}

}  // namespace wdsgen
