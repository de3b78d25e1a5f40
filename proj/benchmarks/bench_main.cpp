#include <cmath>

#include <benchmark/benchmark.h>

#include "fracflow/connection.hpp"
#include "fracflow/fraccalc.hpp"

namespace {

using namespace fracflow;

void BM_CaputoLine(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const AxisGrid ax(0.0, 1.0, count);
  const SampledCurve f(ax, [](double x) { return std::sin(3.0 * x) + x * x; });
  const FractionalOrder order(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(caputo_left(f, order));
  }
  state.SetComplexityN(count);
}
BENCHMARK(BM_CaputoLine)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_AxisCaputoField(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const GridChart chart(1, 1, {AxisGrid(0.0, 1.0, res), AxisGrid(0.0, 1.0, res)});
  const ScalarField f(chart, [](const std::array<double, kMaxDim>& u) {
    return std::sin(u[0] + 2.0 * u[1]);
  });
  const FractionalOrder order(0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(axis_caputo(f, 0, order));
  }
}
BENCHMARK(BM_AxisCaputoField)->Arg(64)->Arg(128)->Arg(256);

void BM_SphereRicci(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const GridChart chart(2, 1, {AxisGrid(1.0, 2.0, res), AxisGrid(0.0, 1.0, res),
                               AxisGrid(0.0, 1.0, 5)});
  DMetric g = DMetric::flat(chart);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double st = std::sin(chart.coords(chart.unflatten(p))[0]);
    g.hat(p, 1, 1) = st * st;
  }
  const NConnectionField N(chart);
  const FractionalOrder order(1.0);
  for (auto _ : state) {
    const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
    benchmark::DoNotOptimize(ricci_contract(dcurvature(gamma, N, g, order)));
  }
}
BENCHMARK(BM_SphereRicci)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
