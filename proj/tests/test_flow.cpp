#include <cmath>

#include <doctest.h>

#include "fracflow/flow.hpp"

using namespace fracflow;

namespace {

GridChart flow_chart() {
  return GridChart(2, 1, {AxisGrid(0.0, 1.0, 8), AxisGrid(0.0, 1.0, 8),
                          AxisGrid(0.0, 1.0, 5)});
}

FlowState sphere_state(int res, double r) {
  const GridChart chart(2, 1, {AxisGrid(1.0, 2.0, res), AxisGrid(0.0, 1.0, res),
                               AxisGrid(0.0, 1.0, 5)});
  FlowState st(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double th = chart.coords(chart.unflatten(p))[0];
    st.g.hat(p, 0, 0) = r * r;
    st.g.hat(p, 1, 1) = r * r * std::sin(th) * std::sin(th);
    st.g.vat(p, 0, 0) = 1.0;
  }
  return st;
}

}  // namespace

TEST_CASE("flat state has zero right side and zero constraint residual") {
  const FlowState st(flow_chart());
  for (double alpha : {0.5, 1.0}) {
    const RhsResult r = hamilton_rhs_canonical(st, FractionalOrder(alpha), 0.0, false, false);
    CHECK(max_abs(r.dg.h) < 1e-12);
    CHECK(max_abs(r.dg.v) < 1e-12);
    CHECK(r.constraint_residual < 1e-12);
    const RhsResult rl = hamilton_rhs_lc(st, FractionalOrder(alpha), 0.0, false, false);
    CHECK(max_abs(rl.dg.h) < 1e-12);
    CHECK(max_abs(rl.dg.v) < 1e-12);
  }
}

TEST_CASE("sphere right side matches the analytic Ricci term") {
  const FlowState st = sphere_state(48, 1.3);
  const double r2 = 1.3 * 1.3;
  const RhsResult rhs = hamilton_rhs_canonical(st, FractionalOrder(1.0), 0.0, false, false);
  const GridChart& chart = st.chart;
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const auto idx = chart.unflatten(p);
    // stay two nodes clear of every axis end; the last pre-boundary node
    // mixes a centered and a one-sided stencil and is only first order
    bool deep = true;
    for (int d = 0; d < chart.dim(); ++d)
      if (idx[d] < 2 || idx[d] >= chart.axes[d].count - 2) deep = false;
    if (!deep) continue;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst,
                         std::abs(rhs.dg.hat(p, i, j) + (2.0 / r2) * st.g.hat(p, i, j)));
  }
  CHECK(worst < 5e-3);
  CHECK(rhs.constraint_residual < 1e-10);
}

TEST_CASE("both connection modes agree on a product metric with zero N") {
  const FlowState st = sphere_state(32, 1.0);
  const FractionalOrder order(1.0);
  const RhsResult a = hamilton_rhs_canonical(st, order, 0.0, false, false);
  const RhsResult b = hamilton_rhs_lc(st, order, 0.0, false, false);
  double worst = 0.0;
  for (std::size_t p = 0; p < st.chart.node_count(); ++p) {
    if (!st.chart.interior(st.chart.unflatten(p))) continue;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        worst = std::max(worst, std::abs(a.dg.hat(p, i, j) - b.dg.hat(p, i, j)));
  }
  CHECK(worst < 1e-8);  // distortion vanishes for this geometry
}

TEST_CASE("normalization factor for constant scalar curvature") {
  const FlowState st = sphere_state(32, 1.0);
  const double lam = normalization_lambda(st, LambdaMode::dimension, FractionalOrder(1.0));
  // R + S = 2 on the unit sphere block; r = 2, lambda = r / (n + m) = 2/3.
  CHECK(lam == doctest::Approx(2.0 / 3.0).epsilon(5e-3));
  const double lam5 = normalization_lambda(st, LambdaMode::paper_fixed, FractionalOrder(1.0));
  CHECK(lam5 == doctest::Approx(2.0 / 5.0).epsilon(5e-3));
  CHECK(normalization_lambda(st, LambdaMode::none, FractionalOrder(1.0)) == 0.0);
}

TEST_CASE("single step at order one reproduces Heun's method") {
  // du/dchi = -2u, u(0) = 1, one step.
  const double h = 0.1;
  auto rhs = [](const std::vector<double>& u, double) {
    return std::vector<double>{-2.0 * u[0]};
  };
  const std::vector<double> u1 = abm_step({1.0}, {{-2.0}}, h, 1.0, h, rhs);
  const double predictor = 1.0 + h * (-2.0);
  const double heun = 1.0 + 0.5 * h * (-2.0 + (-2.0 * predictor));
  CHECK(u1[0] == doctest::Approx(heun).epsilon(1e-14));
}

TEST_CASE("fractional stepper solves the constant-source problem exactly") {
  for (double alpha : {0.4, 0.7}) {
    const double h = 0.02;
    const double src = std::tgamma(alpha + 1.0);
    std::vector<double> u{0.0};
    std::vector<std::vector<double>> hist{{src}};
    for (int k = 0; k < 50; ++k) {
      u = abm_step({0.0}, hist, h, alpha, (k + 1) * h,
                   [&](const std::vector<double>&, double) {
                     return std::vector<double>{src};
                   });
      hist.push_back({src});
    }
    const double chi = 50 * h;
    CHECK(u[0] == doctest::Approx(std::pow(chi, alpha)).epsilon(1e-6));
  }
}

TEST_CASE("zero right side leaves the state unchanged for every order") {
  for (double alpha : {0.3, 0.6, 1.0}) {
    std::vector<double> u{1.5, -2.0};
    std::vector<std::vector<double>> hist{{0.0, 0.0}};
    for (int k = 0; k < 10; ++k) {
      u = abm_step({1.5, -2.0}, hist, 0.05, alpha, (k + 1) * 0.05,
                   [&](const std::vector<double>&, double) {
                     return std::vector<double>{0.0, 0.0};
                   });
      hist.push_back({0.0, 0.0});
    }
    CHECK(u[0] == 1.5);
    CHECK(u[1] == -2.0);
  }
}

TEST_CASE("coupled potential right side on a flat block") {
  // flat metric, f = x^2 on the first axis: RHS = -f'' + (f')^2 = -2 + 4x^2.
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, 32), AxisGrid(0.0, 1.0, 8)});
  FlowState st(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double x = chart.coords(chart.unflatten(p))[0];
    st.f.values[p] = x * x;
  }
  const ScalarField rhs = coupled_potential_rhs(st, FractionalOrder(1.0), false);
  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double x = chart.coords(chart.unflatten(p))[0];
    worst = std::max(worst, std::abs(rhs.values[p] - (-2.0 + 4.0 * x * x)));
  }
  CHECK(worst < 1e-9);  // stencils exact on quadratics

  // W-mode adds the dimension shift.
  st.tau = 0.5;
  const ScalarField rhsw = coupled_potential_rhs(st, FractionalOrder(1.0), true);
  double shift = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    shift = std::max(shift, std::abs(rhsw.values[p] - rhs.values[p] - 2.0));
  CHECK(shift < 1e-12);
}

TEST_CASE("evolution of the flat state is stationary") {
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(0.7);
  cfg.step = 1e-3;
  cfg.steps = 20;
  const FlowState initial(flow_chart());
  const FlowHistory hist = evolve(cfg, initial);
  REQUIRE_FALSE(hist.singular);
  REQUIRE(hist.states.size() == 21);
  double dev = 0.0;
  for (const FlowState& s : hist.states)
    for (std::size_t q = 0; q < s.g.h.size(); ++q)
      dev = std::max(dev, std::abs(s.g.h[q] - initial.g.h[q]));
  CHECK(dev < 1e-10);
}

TEST_CASE("metric blocks stay symmetric along the flow") {
  FlowState st = sphere_state(16, 1.0);
  // break the roundness a little so the right side is not diagonal
  for (std::size_t p = 0; p < st.chart.node_count(); ++p) {
    const auto u = st.chart.coords(st.chart.unflatten(p));
    st.g.hat(p, 0, 1) = st.g.hat(p, 1, 0) = 0.05 * std::sin(u[0] + u[1]);
  }
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(1.0);
  cfg.step = 1e-4;
  cfg.steps = 10;
  const FlowHistory hist = evolve(cfg, st);
  REQUIRE_FALSE(hist.singular);
  double asym = 0.0;
  for (const FlowState& s : hist.states)
    for (std::size_t p = 0; p < s.chart.node_count(); ++p)
      asym = std::max(asym, std::abs(s.g.hat(p, 0, 1) - s.g.hat(p, 1, 0)));
  CHECK(asym < 1e-12);
}

TEST_CASE("uniform scalings and shifts are classified as breathers") {
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(1.0);
  cfg.step = 1e-4;
  FlowHistory hist;
  hist.config = cfg;
  FlowState s1 = sphere_state(16, 1.0);
  hist.states.push_back(s1);

  // later snapshot = uniformly scaled earlier snapshot
  const double ratio = 0.92;
  FlowState s2 = s1;
  s2.chi = cfg.step;
  for (double& x : s2.g.h) x *= ratio;
  for (double& x : s2.g.v) x *= ratio;
  hist.states.push_back(s2);
  const BreatherResult shrink = breather_classify(hist, 0.0, cfg.step);
  CHECK(shrink.type == BreatherType::shrinking);
  CHECK(shrink.beta == doctest::Approx(ratio).epsilon(1e-3));

  // later snapshot = cyclic translation of the earlier one
  FlowState s3 = s1;
  s3.chi = cfg.step;
  const GridChart& chart = s1.chart;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    auto idx = chart.unflatten(p);
    idx[0] = (idx[0] + 3) % chart.axes[0].count;
    const std::size_t q = chart.flatten(idx);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s3.g.hat(p, i, j) = s1.g.hat(q, i, j);
    s3.g.vat(p, 0, 0) = s1.g.vat(q, 0, 0);
  }
  hist.states[1] = s3;
  const BreatherResult steady = breather_classify(hist, 0.0, cfg.step);
  CHECK(steady.type == BreatherType::steady);

  // expanding scaling
  FlowState s4 = s1;
  s4.chi = cfg.step;
  for (double& x : s4.g.h) x *= 1.1;
  for (double& x : s4.g.v) x *= 1.1;
  hist.states[1] = s4;
  CHECK(breather_classify(hist, 0.0, cfg.step).type == BreatherType::expanding);
}

TEST_CASE("stationary flow is a steady breather and generic states are not breathers") {
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(1.0);
  cfg.step = 1e-3;
  cfg.steps = 10;
  const FlowHistory flat = evolve(cfg, FlowState(flow_chart()));
  const BreatherResult steady = breather_classify(flat, 0.0, 5e-3);
  CHECK(steady.type == BreatherType::steady);
  CHECK(steady.beta == doctest::Approx(1.0).epsilon(1e-9));

  // a wildly different snapshot is not a scaling-plus-shift match
  FlowHistory mixed = flat;
  for (std::size_t p = 0; p < mixed.states[5].chart.node_count(); ++p) {
    const auto u = mixed.states[5].chart.coords(mixed.states[5].chart.unflatten(p));
    mixed.states[5].g.hat(p, 0, 0) = 1.0 + 0.5 * std::sin(7.0 * u[0] * u[1]);
  }
  const BreatherResult none = breather_classify(mixed, 0.0, 5e-3);
  CHECK(none.type == BreatherType::none);
  CHECK(breather_name(BreatherType::shrinking) == std::string("shrinking"));
}

TEST_CASE("out-of-range breather parameters are rejected") {
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(1.0);
  cfg.step = 1e-3;
  cfg.steps = 3;
  const FlowHistory hist = evolve(cfg, FlowState(flow_chart()));
  CHECK_THROWS_WITH(breather_classify(hist, 0.0, 1.0), "index out of range");
}

TEST_CASE("a collapsing metric raises a flow singularity with partial history") {
  // force rapid collapse with a huge step on the sphere flow
  FlowConfig cfg;
  cfg.alpha = FractionalOrder(1.0);
  cfg.step = 0.3;  // r^2 = 1 collapses within two steps
  cfg.steps = 10;
  const FlowHistory hist = evolve(cfg, sphere_state(16, 1.0));
  CHECK(hist.singular);
  CHECK(hist.states.size() >= 1);
  CHECK(hist.states.size() < 11);
  CHECK(hist.message.find("flow singularity") != std::string::npos);
}
