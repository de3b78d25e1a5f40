#include <cmath>

#include <doctest.h>

#include "fracflow/forms.hpp"
#include "fracflow/fraccalc.hpp"

using namespace fracflow;

TEST_CASE("exterior derivative of a scalar gives the fractional gradient") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 64), AxisGrid(0.0, 1.0, 64)});
  const FractionalOrder order(0.5);
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) {
    return u[0] * u[0] + 2.0 * u[1];
  });
  const FormField df = exterior_derivative(form_from_scalar(f), order);
  REQUIRE(df.degree == 1);
  const auto grad = frac_grad(f, order);
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    for (int i = 0; i < 2; ++i)
      worst = std::max(worst, std::abs(df.at(p, i) - grad[i].values[p]));
  CHECK(worst == 0.0);  // same operator by construction
}

TEST_CASE("exterior derivative of a constant scalar vanishes") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 16), AxisGrid(0.0, 1.0, 16)});
  ScalarField f(chart);
  for (double& v : f.values) v = 4.2;
  const FormField df = exterior_derivative(form_from_scalar(f), FractionalOrder(0.4));
  CHECK(max_abs(df.coefficients) < 1e-13);
}

TEST_CASE("two-form coefficient follows the axis-wise power rule") {
  // 1-form with component (y)^2 on the first axis direction.
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 16), AxisGrid(0.0, 1.0, 1024)});
  const FractionalOrder order(0.5);
  FormField w(chart, 1);
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    w.at(p, 0) = std::pow(chart.coords(chart.unflatten(p))[1], 2.0);
  const FormField dw = exterior_derivative(w, order);
  REQUIRE(dw.degree == 2);

  // Independent one-dimensional oracle along the second axis.
  const AxisGrid& ay = chart.axes[1];
  const SampledCurve line(ay, [](double y) { return y * y; });
  const SampledCurve oracle = caputo_left(line, order);

  double worst = 0.0, anti = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto idx = chart.unflatten(p);
    worst = std::max(worst, std::abs(dw.at(p, 1, 0) - oracle.values[idx[1]]));
    anti = std::max(anti, std::abs(dw.at(p, 1, 0) + dw.at(p, 0, 1)));
  }
  CHECK(worst < 1e-12);
  CHECK(anti < 1e-12);

  // closed-form cross-check away from the terminal
  const double c = std::tgamma(3.0) / std::tgamma(2.5);
  double rel = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double y = chart.coords(chart.unflatten(p))[1];
    if (y < 0.05) continue;
    const double ref = c * std::pow(y, 1.5);
    rel = std::max(rel, std::abs(dw.at(p, 1, 0) - ref) / ref);
  }
  CHECK(rel < 2e-3);
}

TEST_CASE("mixed fractional partials commute on separated coordinates") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 96), AxisGrid(0.0, 1.0, 96)});
  const FractionalOrder order(0.5);
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) {
    return u[0] * u[0] * u[1] * u[1];
  });
  const FormField ddf = exterior_derivative(exterior_derivative(form_from_scalar(f), order),
                                            order);
  CHECK(max_abs(ddf.coefficients) < 1e-10);
}

TEST_CASE("top-degree forms are rejected") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 8), AxisGrid(0.0, 1.0, 8)});
  FormField two(chart, 2);
  CHECK_THROWS_WITH(exterior_derivative(two, FractionalOrder(0.5)),
                    "top degree at desk scale");
}
