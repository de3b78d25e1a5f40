#include <cmath>
#include <random>

#include <doctest.h>

#include "fracflow/connection.hpp"

using namespace fracflow;

namespace {

GridChart small_chart() {
  return GridChart(2, 1, {AxisGrid(0.0, 1.0, 12), AxisGrid(0.0, 1.0, 12),
                          AxisGrid(0.0, 1.0, 12)});
}

struct TestGeometry {
  GridChart chart;
  DMetric g;
  NConnectionField N;
};

TestGeometry smooth_geometry() {
  TestGeometry t{small_chart(), DMetric(small_chart()), NConnectionField(small_chart())};
  for (std::size_t p = 0; p < t.chart.node_count(); ++p) {
    const auto u = t.chart.coords(t.chart.unflatten(p));
    t.g.hat(p, 0, 0) = 1.5 + 0.1 * std::sin(u[0] + u[2]);
    t.g.hat(p, 1, 1) = 1.4 + 0.1 * std::cos(u[1]);
    t.g.hat(p, 0, 1) = t.g.hat(p, 1, 0) = 0.1 * std::sin(u[0] + 2.0 * u[1]);
    t.g.vat(p, 0, 0) = 1.2 + 0.1 * std::sin(u[0] * u[2]);
    t.N.at(p, 0, 0) = 0.2 * std::sin(u[1] + u[2]);
    t.N.at(p, 1, 0) = 0.2 * std::cos(u[0]);
  }
  return t;
}

// Two nodes clear of every axis end: the centered derivative at the last
// pre-boundary node straddles a one-sided stencil and is only first order.
bool deep_interior(const GridChart& chart, const std::array<int, kMaxDim>& idx) {
  for (int d = 0; d < chart.dim(); ++d)
    if (idx[d] < 2 || idx[d] >= chart.axes[d].count - 2) return false;
  return true;
}

GridChart sphere_chart(int res) {
  return GridChart(2, 1, {AxisGrid(1.0, 2.0, res), AxisGrid(0.0, 1.0, res),
                          AxisGrid(0.0, 1.0, 5)});
}

DMetric sphere_metric(const GridChart& chart, double r) {
  DMetric g(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double th = chart.coords(chart.unflatten(p))[0];
    g.hat(p, 0, 0) = r * r;
    g.hat(p, 1, 1) = r * r * std::sin(th) * std::sin(th);
    g.vat(p, 0, 0) = 1.0;
  }
  return g;
}

}  // namespace

TEST_CASE("flat metric with zero N gives zero connection coefficients") {
  const GridChart chart = small_chart();
  const DMetric g = DMetric::flat(chart);
  const NConnectionField N(chart);
  for (double alpha : {0.5, 1.0}) {
    const DConnectionCoeffs gamma = canonical_dconnection(g, N, FractionalOrder(alpha));
    CHECK(max_abs(gamma.L_h) < 1e-13);
    CHECK(max_abs(gamma.L_v) < 1e-13);
    CHECK(max_abs(gamma.C_h) < 1e-13);
    CHECK(max_abs(gamma.C_v) < 1e-13);
  }
}

TEST_CASE("horizontal block reproduces sphere Christoffel symbols at order one") {
  const GridChart chart = sphere_chart(48);
  const double r = 1.3;
  const DMetric g = sphere_metric(chart, r);
  const NConnectionField N(chart);
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, FractionalOrder(1.0));
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto idx = chart.unflatten(p);
    if (!chart.interior(idx)) continue;
    const double th = chart.coords(idx)[0];
    const double cot = std::cos(th) / std::sin(th);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double ref = 0.0;
          if (i == 0 && j == 1 && k == 1) ref = -std::sin(th) * std::cos(th);
          if (i == 1 && ((j == 0 && k == 1) || (j == 1 && k == 0))) ref = cot;
          worst = std::max(worst, std::abs(gamma.Lh(p, i, j, k) - ref));
        }
  }
  const double h = chart.axes[0].spacing();
  CHECK(worst < 10.0 * h * h);
}

TEST_CASE("metric independent of vertical coordinates has no C-h block") {
  TestGeometry t = smooth_geometry();
  for (std::size_t p = 0; p < t.chart.node_count(); ++p) {
    const auto u = t.chart.coords(t.chart.unflatten(p));
    t.g.hat(p, 0, 0) = 1.5 + 0.1 * std::sin(u[0]);
    t.g.hat(p, 1, 1) = 1.4 + 0.1 * std::cos(u[1]);
    t.g.hat(p, 0, 1) = t.g.hat(p, 1, 0) = 0.1 * std::sin(u[0] + u[1]);
  }
  const DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, FractionalOrder(0.5));
  CHECK(max_abs(gamma.C_h) < 1e-13);
}

TEST_CASE("canonical torsion blocks with fixed symmetry vanish") {
  const TestGeometry t = smooth_geometry();
  for (double alpha : {0.5, 1.0}) {
    const FractionalOrder order(alpha);
    const DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, order);
    const TorsionBlocks tor = dtorsion(gamma, t.N, order);
    CHECK(max_abs(tor.T_hhh) < 1e-12);
    CHECK(max_abs(tor.T_vvv) < 1e-12);
  }
}

TEST_CASE("torsion reductions for special inputs") {
  const GridChart chart = small_chart();
  DMetric g = DMetric::flat(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto u = chart.coords(chart.unflatten(p));
    g.hat(p, 0, 0) = 1.0 + 0.2 * std::sin(u[0]);
    g.vat(p, 0, 0) = 1.0 + 0.2 * std::cos(u[2]);  // v-block independent of x
  }
  const NConnectionField N(chart);
  const FractionalOrder order(1.0);
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const TorsionBlocks tor = dtorsion(gamma, N, order);
  CHECK(max_abs(tor.T_vhh) < 1e-13);  // Omega vanishes with N = 0
  CHECK(max_abs(tor.T_vvh) < 1e-13);  // L^a_bi matches the derivative of N
}

TEST_CASE("curvature antisymmetry and flat reduction") {
  const TestGeometry t = smooth_geometry();
  const FractionalOrder order(0.5);
  const DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, order);
  const CurvatureBlocks curv = dcurvature(gamma, t.N, t.g, order);

  const GridChart& chart = t.chart;
  const int n = chart.n;
  double anti = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    for (int i = 0; i < n; ++i)
      for (int hh = 0; hh < n; ++hh)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            const std::size_t base = ((p * n + i) * n + hh) * n;
            anti = std::max(anti, std::abs(curv.R_hhhh[(base + j) * n + k] +
                                           curv.R_hhhh[(base + k) * n + j]));
          }
  CHECK(anti < 1e-12);

  const DMetric flat = DMetric::flat(chart);
  const NConnectionField zero(chart);
  const DConnectionCoeffs g0 = canonical_dconnection(flat, zero, order);
  const CurvatureBlocks c0 = dcurvature(g0, zero, flat, order);
  CHECK(max_abs(c0.R_hhhh) < 1e-13);
  CHECK(max_abs(c0.R_vvvv) < 1e-13);
  CHECK(max_abs(c0.R_hhhv) < 1e-13);
}

TEST_CASE("sphere Ricci and scalar curvature at order one") {
  const GridChart chart = sphere_chart(64);
  const double r = 1.0;
  const DMetric g = sphere_metric(chart, r);
  const NConnectionField N(chart);
  const FractionalOrder order(1.0);
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const ScalarCurvature sc = scalar_curvature(g, ric);

  double ric_err = 0.0, r_err = 0.0, mixed = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    if (!deep_interior(chart, chart.unflatten(p))) continue;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        ric_err = std::max(ric_err, std::abs(ric.hhat(p, i, j) - g.hat(p, i, j) / (r * r)));
    r_err = std::max(r_err, std::abs(sc.hR.values[p] - 2.0 / (r * r)));
    mixed = std::max(mixed, std::abs(ric.hvat(p, 0, 0)));
    mixed = std::max(mixed, std::abs(ric.vhat(p, 0, 0)));
  }
  CHECK(ric_err < 2e-3);
  CHECK(r_err < 2e-3);
  CHECK(mixed < 1e-10);  // product metric with zero N
}

TEST_CASE("scalar curvature scales inversely with a constant metric factor") {
  const GridChart chart = sphere_chart(32);
  const DMetric g = sphere_metric(chart, 1.0);
  DMetric g2 = g;
  const double c = 1.7;
  for (double& x : g2.h) x *= c;
  const NConnectionField N(chart);
  const FractionalOrder order(1.0);
  const ScalarCurvature s1 = scalar_curvature(
      g, ricci_contract(dcurvature(canonical_dconnection(g, N, order), N, g, order)));
  const ScalarCurvature s2 = scalar_curvature(
      g2, ricci_contract(dcurvature(canonical_dconnection(g2, N, order), N, g2, order)));
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    if (!chart.interior(chart.unflatten(p))) continue;
    worst = std::max(worst, std::abs(s2.hR.values[p] - s1.hR.values[p] / c));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Einstein tensor contraction identity") {
  const TestGeometry t = smooth_geometry();
  const FractionalOrder order(1.0);
  const DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, order);
  const RicciBlocks ric = ricci_contract(dcurvature(gamma, t.N, t.g, order));
  const ScalarCurvature sc = scalar_curvature(t.g, ric);
  const EinsteinBlocks G = einstein_tensor(t.g, ric, sc);

  // trace identity: g^{ij}G_ij + g^{ab}G_ab = (1 - dim/2)(R + S)
  const DMetricInverse inv = invert_dmetric(t.g);
  const GridChart& chart = t.chart;
  const int n = chart.n, m = chart.m;
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += inv.h[(p * n + i) * n + j] * G.hh[(p * n + i) * n + j];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) tr += inv.v[(p * m + a) * m + b] * G.vv[(p * m + a) * m + b];
    const double ref = (1.0 - 0.5 * chart.dim()) * (sc.hR.values[p] + sc.vS.values[p]);
    worst = std::max(worst, std::abs(tr - ref));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("metric compatibility of the canonical connection") {
  const TestGeometry t = smooth_geometry();
  for (double alpha : {0.5, 1.0}) {
    const FractionalOrder order(alpha);
    const DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, order);
    CHECK(metricity_residual(gamma, t.g, t.N, order) < 1e-10);
  }
}

TEST_CASE("a perturbed connection breaks metric compatibility") {
  const TestGeometry t = smooth_geometry();
  const FractionalOrder order(1.0);
  DConnectionCoeffs gamma = canonical_dconnection(t.g, t.N, order);
  const double before = metricity_residual(gamma, t.g, t.N, order);
  for (std::size_t p = 0; p < t.chart.node_count(); ++p) gamma.Lh(p, 0, 0, 0) += 0.1;
  const double after = metricity_residual(gamma, t.g, t.N, order);
  CHECK(before < 1e-10);
  CHECK(after > 0.01);
}

TEST_CASE("sign-flip hook makes the metricity check fail") {
  const TestGeometry t = smooth_geometry();
  const FractionalOrder order(1.0);
  testing::flip_candcon_sign = true;
  const DConnectionCoeffs bad = canonical_dconnection(t.g, t.N, order);
  testing::flip_candcon_sign = false;
  CHECK(metricity_residual(bad, t.g, t.N, order) > 1e-3);
}

TEST_CASE("distortion vanishes for a product metric with zero N") {
  const GridChart chart = small_chart();
  DMetric g(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto u = chart.coords(chart.unflatten(p));
    g.hat(p, 0, 0) = 1.5 + 0.2 * std::sin(u[0]);
    g.hat(p, 1, 1) = 1.3 + 0.2 * std::cos(u[1]);
    g.hat(p, 0, 1) = g.hat(p, 1, 0) = 0.1 * std::sin(u[0] + u[1]);
    g.vat(p, 0, 0) = 1.2 + 0.2 * std::sin(u[2]);
  }
  const NConnectionField N(chart);
  const DistortionBlocks dist = levi_civita_distortion(g, N, FractionalOrder(1.0));
  CHECK(max_abs(dist.z.L_hhh) < 1e-12);
  CHECK(max_abs(dist.z.L_vhh) < 1e-12);
  CHECK(max_abs(dist.z.L_hvh) < 1e-12);
  CHECK(max_abs(dist.z.L_vvh) < 1e-12);
  CHECK(max_abs(dist.z.C_hhv) < 1e-12);
  CHECK(max_abs(dist.z.C_vhv) < 1e-12);
  CHECK(max_abs(dist.z.C_hvv) < 1e-12);
  CHECK(max_abs(dist.z.C_vvv) < 1e-12);
}

TEST_CASE("purely horizontal and vertical distortion blocks are always zero") {
  const TestGeometry t = smooth_geometry();
  const DistortionBlocks dist = levi_civita_distortion(t.g, t.N, FractionalOrder(0.5));
  CHECK(max_abs(dist.z.L_hhh) == 0.0);
  CHECK(max_abs(dist.z.C_vvv) == 0.0);
}
