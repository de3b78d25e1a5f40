#include "fracflow/fraccalc.hpp"

#include <cmath>

#include "fracflow/parallel.hpp"

namespace fracflow {

namespace {

void check_curve(const SampledCurve& f) {
  if (f.grid.count < 3) throw std::invalid_argument("grid too small");
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::invalid_argument("invalid samples");
}

void rl_integral_line(const double* f, double* out, int count, std::size_t stride,
                      double spacing, double alpha) {
  // Product trapezoid: the piecewise-linear interpolant integrated exactly
  // against the kernel (x - s)^(alpha-1) / Gamma(alpha).
  const double pref = std::pow(spacing, alpha) / std::tgamma(alpha + 2.0);
  out[0] = 0.0;
  for (int k = 1; k < count; ++k) {
    double acc = f[static_cast<std::size_t>(k) * stride];  // weight 1 on node k
    const double kd = static_cast<double>(k);
    acc += (std::pow(kd - 1.0, alpha + 1.0) - (kd - 1.0 - alpha) * std::pow(kd, alpha)) * f[0];
    for (int j = 1; j < k; ++j) {
      const double q = static_cast<double>(k - j);
      const double w = std::pow(q + 1.0, alpha + 1.0) - 2.0 * std::pow(q, alpha + 1.0) +
                       std::pow(q - 1.0, alpha + 1.0);
      acc += w * f[static_cast<std::size_t>(j) * stride];
    }
    out[static_cast<std::size_t>(k) * stride] = pref * acc;
  }
}

}  // namespace

void caputo_line(const double* f, double* out, int count, std::size_t stride,
                 double spacing, double alpha) {
  // L1 scheme: piecewise-linear interpolant against (x - s)^(-alpha).
  const double pref = std::pow(spacing, -alpha) / std::tgamma(2.0 - alpha);
  out[0] = 0.0;
  for (int k = 1; k < count; ++k) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      const double q = static_cast<double>(k - 1 - j);
      const double b = std::pow(q + 1.0, 1.0 - alpha) - std::pow(q, 1.0 - alpha);
      acc += b * (f[static_cast<std::size_t>(j + 1) * stride] -
                  f[static_cast<std::size_t>(j) * stride]);
    }
    out[static_cast<std::size_t>(k) * stride] = pref * acc;
  }
}

void classical_derivative_line(const double* f, double* out, int count,
                               std::size_t stride, double spacing) {
  auto at = [&](int k) { return f[static_cast<std::size_t>(k) * stride]; };
  out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * spacing);
  for (int k = 1; k < count - 1; ++k)
    out[static_cast<std::size_t>(k) * stride] = (at(k + 1) - at(k - 1)) / (2.0 * spacing);
  out[static_cast<std::size_t>(count - 1) * stride] =
      (3.0 * at(count - 1) - 4.0 * at(count - 2) + at(count - 3)) / (2.0 * spacing);
}

SampledCurve caputo_left(const SampledCurve& f, FractionalOrder order) {
  check_curve(f);
  SampledCurve out(f.grid);
  if (order.classical())
    classical_derivative_line(f.values.data(), out.values.data(), f.grid.count, 1,
                              f.grid.spacing());
  else
    caputo_line(f.values.data(), out.values.data(), f.grid.count, 1, f.grid.spacing(),
                order.alpha);
  return out;
}

SampledCurve rl_derivative_left(const SampledCurve& f, FractionalOrder order) {
  check_curve(f);
  if (order.classical()) return caputo_left(f, order);
  SampledCurve out = caputo_left(f, order);
  const double c = f.values[0] / std::tgamma(1.0 - order.alpha);
  for (int k = 1; k < f.grid.count; ++k)
    out.values[k] += c * std::pow(f.grid.node(k) - f.grid.lower, -order.alpha);
  return out;
}

SampledCurve rl_integral_left(const SampledCurve& f, FractionalOrder order) {
  check_curve(f);
  SampledCurve out(f.grid);
  rl_integral_line(f.values.data(), out.values.data(), f.grid.count, 1, f.grid.spacing(),
                   order.alpha);
  return out;
}

double fundamental_theorem_residual(const SampledCurve& f, FractionalOrder order) {
  const SampledCurve recon = rl_integral_left(caputo_left(f, order), order);
  double r = 0.0;
  for (int k = 0; k < f.grid.count; ++k)
    r = std::max(r, std::abs(recon.values[k] - (f.values[k] - f.values[0])));
  return r;
}

ScalarField axis_caputo(const ScalarField& f, int axis, FractionalOrder order) {
  const GridChart& chart = f.chart;
  if (axis < 0 || axis >= chart.dim()) throw std::invalid_argument("axis out of range");
  for (double v : f.values)
    if (!std::isfinite(v)) throw std::invalid_argument("invalid samples");
  const int count = chart.axes[axis].count;
  const double h = chart.axes[axis].spacing();
  const std::size_t stride = chart.stride(axis);
  const std::size_t lines = chart.node_count() / count;
  ScalarField out(chart);

  parallel_for(lines, [&](std::size_t line) {
    // Decompose the line id into the base offset of the sweep.
    const std::size_t inner = stride;
    const std::size_t base = (line / inner) * inner * count + (line % inner);
    if (order.classical())
      classical_derivative_line(f.values.data() + base, out.values.data() + base, count,
                                stride, h);
    else
      caputo_line(f.values.data() + base, out.values.data() + base, count, stride, h,
                  order.alpha);
  });
  return out;
}

std::vector<ScalarField> frac_grad(const ScalarField& f, FractionalOrder order) {
  std::vector<ScalarField> g;
  g.reserve(f.chart.dim());
  for (int d = 0; d < f.chart.dim(); ++d) g.push_back(axis_caputo(f, d, order));
  return g;
}

ScalarField frac_div(const std::vector<ScalarField>& components,
                     const std::vector<double>& eta, FractionalOrder order) {
  if (components.empty()) throw std::invalid_argument("empty vector field");
  const GridChart& chart = components[0].chart;
  if (static_cast<int>(components.size()) != chart.dim() ||
      eta.size() != components.size())
    throw std::invalid_argument("component/metric count must match chart dimension");
  for (double e : eta)
    if (e != 1.0 && e != -1.0) throw std::invalid_argument("eta must be diagonal +/-1");
  ScalarField out(chart);
  for (int d = 0; d < chart.dim(); ++d) {
    require_same_chart(chart, components[d].chart);
    ScalarField dd = axis_caputo(components[d], d, order);
    for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] += dd.values[p];
  }
  return out;
}

}  // namespace fracflow
