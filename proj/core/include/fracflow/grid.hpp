#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fracflow {

/// Order of the fractional operators. alpha = 1 selects the classical
/// (integer) operators exactly.
struct FractionalOrder {
  double alpha = 1.0;

  explicit FractionalOrder(double a) : alpha(a) {
    if (!(a > 0.0) || !(a <= 1.0))
      throw std::invalid_argument("fractional order must lie in (0, 1]");
  }
  bool classical() const { return alpha == 1.0; }
};

/// Uniform sampling of a closed interval [lower, upper]. The lower end is
/// the terminal of all left-sided fractional operators on this axis.
struct AxisGrid {
  double lower = 0.0;
  double upper = 1.0;
  int count = 0;

  AxisGrid() = default;
  AxisGrid(double lo, double hi, int n) : lower(lo), upper(hi), count(n) {
    if (n < 2 || !(hi > lo))
      throw std::invalid_argument("axis grid needs upper > lower and count >= 2");
  }
  double spacing() const { return (upper - lower) / (count - 1); }
  double node(int k) const { return lower + k * spacing(); }

  friend bool operator==(const AxisGrid& a, const AxisGrid& b) {
    return a.lower == b.lower && a.upper == b.upper && a.count == b.count;
  }
};

/// One-dimensional sampled function on an AxisGrid.
struct SampledCurve {
  AxisGrid grid;
  std::vector<double> values;

  SampledCurve() = default;
  explicit SampledCurve(const AxisGrid& g) : grid(g), values(g.count, 0.0) {}
  SampledCurve(const AxisGrid& g, std::function<double(double)> f) : SampledCurve(g) {
    for (int k = 0; k < g.count; ++k) values[k] = f(g.node(k));
  }
};

constexpr int kMaxDim = 6;

/// Sampled coordinate box with an h/v index split: the first n axes are
/// horizontal coordinates x^i, the remaining m are vertical y^a.
struct GridChart {
  int n = 0;  // h-dimension
  int m = 0;  // v-dimension
  std::vector<AxisGrid> axes;  // size n + m

  GridChart() = default;
  GridChart(int n_, int m_, std::vector<AxisGrid> ax) : n(n_), m(m_), axes(std::move(ax)) {
    if (n < 1 || m < 1) throw std::invalid_argument("chart needs n >= 1 and m >= 1");
    if (static_cast<int>(axes.size()) != n + m)
      throw std::invalid_argument("chart axis list must have n + m entries");
    if (n + m > kMaxDim) throw std::invalid_argument("chart dimension too large");
    for (const auto& a : axes)
      if (a.count < 3) throw std::invalid_argument("grid too small");
  }

  int dim() const { return n + m; }
  std::size_t node_count() const {
    std::size_t t = 1;
    for (const auto& a : axes) t *= static_cast<std::size_t>(a.count);
    return t;
  }
  /// Row-major stride of axis d (last axis fastest).
  std::size_t stride(int d) const {
    std::size_t s = 1;
    for (int k = dim() - 1; k > d; --k) s *= static_cast<std::size_t>(axes[k].count);
    return s;
  }
  std::size_t flatten(const std::array<int, kMaxDim>& idx) const {
    std::size_t f = 0;
    for (int d = 0; d < dim(); ++d) f = f * axes[d].count + idx[d];
    return f;
  }
  std::array<int, kMaxDim> unflatten(std::size_t flat) const {
    std::array<int, kMaxDim> idx{};
    for (int d = dim() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % axes[d].count);
      flat /= axes[d].count;
    }
    return idx;
  }
  std::array<double, kMaxDim> coords(const std::array<int, kMaxDim>& idx) const {
    std::array<double, kMaxDim> u{};
    for (int d = 0; d < dim(); ++d) u[d] = axes[d].node(idx[d]);
    return u;
  }

  /// True on nodes at least `margin` nodes away from the lower terminal of
  /// every axis and off the upper boundary; curvature diagnostics are
  /// evaluated here, where the one-sided kernels have enough history.
  bool interior(const std::array<int, kMaxDim>& idx, int margin = 2) const {
    for (int d = 0; d < dim(); ++d)
      if (idx[d] < margin || idx[d] >= axes[d].count - 1) return false;
    return true;
  }

  friend bool operator==(const GridChart& a, const GridChart& b) {
    return a.n == b.n && a.m == b.m && a.axes == b.axes;
  }
};

/// Scalar sample per chart node.
struct ScalarField {
  GridChart chart;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridChart& c) : chart(c), values(c.node_count(), 0.0) {}
  ScalarField(const GridChart& c,
              std::function<double(const std::array<double, kMaxDim>&)> f)
      : ScalarField(c) {
    for (std::size_t p = 0; p < values.size(); ++p)
      values[p] = f(c.coords(c.unflatten(p)));
  }
  double& operator[](std::size_t p) { return values[p]; }
  double operator[](std::size_t p) const { return values[p]; }
};

inline void require_same_chart(const GridChart& a, const GridChart& b) {
  if (!(a == b)) throw std::invalid_argument("chart mismatch");
}

template <class Fn>
void for_each_node(const GridChart& chart, Fn&& fn) {
  const std::size_t total = chart.node_count();
  for (std::size_t p = 0; p < total; ++p) fn(p);
}

inline double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

}  // namespace fracflow
