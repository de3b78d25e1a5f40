#include <cmath>
#include <random>

#include <doctest.h>

#include "fracflow/geometry.hpp"

using namespace fracflow;

TEST_CASE("frame derivative reduces to the partial derivative when N vanishes") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 64), AxisGrid(0.0, 1.0, 64)});
  const NConnectionField N(chart);
  const FractionalOrder order(0.5);
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) {
    return u[0] * u[0] + u[1];
  });
  const ScalarField e0 = nadapted_derivative(f, 0, N, order);
  const ScalarField d0 = axis_caputo(f, 0, order);
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    worst = std::max(worst, std::abs(e0.values[p] - d0.values[p]));
  CHECK(worst == 0.0);
}

TEST_CASE("frame derivative of a vertical coordinate with constant N") {
  // e_1 y = d_1 y - N d_y y = -N for constant N, at order one.
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 16), AxisGrid(0.0, 1.0, 16)});
  NConnectionField N(chart);
  const double c = 2.5;
  for (std::size_t p = 0; p < chart.node_count(); ++p) N.at(p, 0, 0) = c;
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) { return u[1]; });
  const ScalarField e0 = nadapted_derivative(f, 0, N, FractionalOrder(1.0));
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    worst = std::max(worst, std::abs(e0.values[p] + c));
  CHECK(worst < 1e-12);
}

TEST_CASE("frame index bounds are checked") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 8), AxisGrid(0.0, 1.0, 8)});
  const NConnectionField N(chart);
  const ScalarField f(chart);
  CHECK_THROWS_WITH(nadapted_derivative(f, 2, N, FractionalOrder(1.0)),
                    "index out of range");
}

TEST_CASE("vielbein block pattern and duality") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 3), AxisGrid(0.0, 1.0, 3)});
  NConnectionField N(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) N.at(p, 0, 0) = 3.0;
  const FrameTransform e = vielbein(N);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    CHECK(e.fwd(p, 0, 0) == 1.0);
    CHECK(e.fwd(p, 0, 1) == 3.0);
    CHECK(e.fwd(p, 1, 0) == 0.0);
    CHECK(e.fwd(p, 1, 1) == 1.0);
    CHECK(e.inv(p, 0, 1) == -3.0);
  }
}

TEST_CASE("vielbein forward times inverse is the identity for random N") {
  const GridChart chart(2, 1, {AxisGrid(0.0, 1.0, 5), AxisGrid(0.0, 1.0, 5),
                               AxisGrid(0.0, 1.0, 5)});
  NConnectionField N(chart);
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (double& x : N.coeff) x = U(rng);
  const FrameTransform e = vielbein(N);
  const int d = chart.dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += e.fwd(p, r, k) * e.inv(p, k, c);
        worst = std::max(worst, std::abs(s - (r == c ? 1.0 : 0.0)));
      }
  CHECK(worst < 1e-12);
}

TEST_CASE("anholonomy coefficients against a finite-difference commutator") {
  // n=2, m=1, N_0^0 = x0^2, N_1^0 = 0, order one:
  // [e_0, e_1] f = Omega_01^0 e_y f with Omega_01^0 = e_1 N_0^0 - e_0 N_1^0.
  const GridChart chart(2, 1, {AxisGrid(0.0, 1.0, 24), AxisGrid(0.0, 1.0, 24),
                               AxisGrid(0.0, 1.0, 24)});
  const FractionalOrder order(1.0);
  NConnectionField N(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto u = chart.coords(chart.unflatten(p));
    N.at(p, 0, 0) = u[0] * u[0] + 0.5 * u[2];
    N.at(p, 1, 0) = 0.3 * u[1];
  }
  const Anholonomy an = anholonomy(N, order);

  // antisymmetry of Omega in its lower indices
  double anti = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    anti = std::max(anti, std::abs(an.om(p, 0, 1, 0) + an.om(p, 1, 0, 0)));
  CHECK(anti < 1e-12);

  // commutator on a test function, evaluated with independent differences
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) {
    return std::sin(u[0] + 2.0 * u[1]) + u[2] * u[2] + 0.4 * u[0] * u[2];
  });
  const ScalarField e1f = nadapted_derivative(f, 1, N, order);
  const ScalarField e0f = nadapted_derivative(f, 0, N, order);
  const ScalarField e0e1 = nadapted_derivative(e1f, 0, N, order);
  const ScalarField e1e0 = nadapted_derivative(e0f, 1, N, order);
  const ScalarField eyf = nadapted_derivative(f, 2, N, order);

  const double h = chart.axes[0].spacing();
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    if (!chart.interior(chart.unflatten(p))) continue;
    const double lhs = e0e1.values[p] - e1e0.values[p];
    const double rhs = an.om(p, 0, 1, 0) * eyf.values[p];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst < 25.0 * h * h);
}

TEST_CASE("anholonomy of a constant N vanishes") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 12), AxisGrid(0.0, 1.0, 12)});
  NConnectionField N(chart);
  for (double& x : N.coeff) x = 1.7;
  const Anholonomy an = anholonomy(N, FractionalOrder(0.5));
  CHECK(max_abs(an.w_ibv) < 1e-13);
  CHECK(max_abs(an.omega) < 1e-13);
}

TEST_CASE("metric parametrization round trip") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 4), AxisGrid(0.0, 1.0, 4)});
  DMetric g = DMetric::flat(chart);
  NConnectionField N(chart);
  const double c = 0.8;
  for (std::size_t p = 0; p < chart.node_count(); ++p) N.at(p, 0, 0) = c;

  const CoordinateMetric gc = dmetric_to_coordinate(g, N);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    CHECK(gc.at(p, 0, 0) == doctest::Approx(1.0 + c * c).epsilon(1e-14));
    CHECK(gc.at(p, 0, 1) == doctest::Approx(c).epsilon(1e-14));
    CHECK(gc.at(p, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  }

  const auto [g2, N2] = coordinate_to_dmetric(gc);
  double worst = 0.0;
  for (std::size_t q = 0; q < g.h.size(); ++q) worst = std::max(worst, std::abs(g2.h[q] - g.h[q]));
  for (std::size_t q = 0; q < g.v.size(); ++q) worst = std::max(worst, std::abs(g2.v[q] - g.v[q]));
  for (std::size_t q = 0; q < N.coeff.size(); ++q)
    worst = std::max(worst, std::abs(N2.coeff[q] - N.coeff[q]));
  CHECK(worst < 1e-12);
}

TEST_CASE("random well-conditioned coordinate metric round trip") {
  const GridChart chart(2, 1, {AxisGrid(0.0, 1.0, 4), AxisGrid(0.0, 1.0, 4),
                               AxisGrid(0.0, 1.0, 4)});
  const int d = chart.dim();
  CoordinateMetric gc(chart);
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    for (int a = 0; a < d; ++a) {
      gc.at(p, a, a) = 2.0 + U(rng);
      for (int b = a + 1; b < d; ++b) {
        const double off = U(rng);
        gc.at(p, a, b) = off;
        gc.at(p, b, a) = off;
      }
    }
  }
  const auto [g, N] = coordinate_to_dmetric(gc);
  const CoordinateMetric back = dmetric_to_coordinate(g, N);
  double worst = 0.0;
  for (std::size_t q = 0; q < gc.g.size(); ++q)
    worst = std::max(worst, std::abs(back.g[q] - gc.g[q]));
  CHECK(worst < 1e-12);
}

TEST_CASE("degenerate vertical block is rejected") {
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 3), AxisGrid(0.0, 1.0, 3)});
  CoordinateMetric gc(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    gc.at(p, 0, 0) = 1.0;
    gc.at(p, 1, 1) = 0.0;  // singular v-block
  }
  CHECK_THROWS_WITH(coordinate_to_dmetric(gc), "degenerate vertical metric");
}
