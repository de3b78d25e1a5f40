#include "fracflow/geometry.hpp"

#include <cmath>

#include "fracflow/linalg.hpp"

namespace fracflow {

DMetric DMetric::flat(const GridChart& c) {
  DMetric g(c);
  for_each_node(c, [&](std::size_t p) {
    for (int i = 0; i < c.n; ++i) g.hat(p, i, i) = 1.0;
    for (int a = 0; a < c.m; ++a) g.vat(p, a, a) = 1.0;
  });
  return g;
}

ScalarField nadapted_derivative(const ScalarField& f, int beta, const NConnectionField& N,
                                FractionalOrder order) {
  require_same_chart(f.chart, N.chart);
  const GridChart& chart = f.chart;
  if (beta < 0 || beta >= chart.dim()) throw std::invalid_argument("index out of range");
  if (beta >= chart.n) return axis_caputo(f, beta, order);

  ScalarField out = axis_caputo(f, beta, order);
  for (int a = 0; a < chart.m; ++a) {
    ScalarField da = axis_caputo(f, chart.n + a, order);
    for (std::size_t p = 0; p < out.values.size(); ++p)
      out.values[p] -= N.at(p, beta, a) * da.values[p];
  }
  return out;
}

Anholonomy anholonomy(const NConnectionField& N, FractionalOrder order) {
  const GridChart& chart = N.chart;
  Anholonomy out(chart);

  // Per-component scalar views of N and their frame derivatives.
  for (int i = 0; i < chart.n; ++i)
    for (int a = 0; a < chart.m; ++a) {
      ScalarField Nia(chart);
      for (std::size_t p = 0; p < Nia.values.size(); ++p) Nia.values[p] = N.at(p, i, a);
      for (int b = 0; b < chart.m; ++b) {
        ScalarField db = axis_caputo(Nia, chart.n + b, order);
        for (std::size_t p = 0; p < db.values.size(); ++p) out.w(p, i, b, a) = db.values[p];
      }
      // e_j N_i^a enters Omega below.
      for (int j = 0; j < chart.n; ++j) {
        ScalarField ej = nadapted_derivative(Nia, j, N, order);
        for (std::size_t p = 0; p < ej.values.size(); ++p) {
          // Omega_ji^a = e_i N_j^a - e_j N_i^a; here we accumulate the
          // -e_j N_i^a part into slot (j,i,a) and +e_j N_i^a into (i,j,a).
          out.om(p, j, i, a) -= ej.values[p];
          out.om(p, i, j, a) += ej.values[p];
        }
      }
    }
  return out;
}

FrameTransform vielbein(const NConnectionField& N) {
  const GridChart& chart = N.chart;
  FrameTransform t(chart);
  const int d = chart.dim();
  for_each_node(chart, [&](std::size_t p) {
    for (int k = 0; k < d; ++k) {
      t.fwd(p, k, k) = 1.0;
      t.inv(p, k, k) = 1.0;
    }
    for (int i = 0; i < chart.n; ++i)
      for (int a = 0; a < chart.m; ++a) {
        t.fwd(p, i, chart.n + a) = N.at(p, i, a);
        t.inv(p, i, chart.n + a) = -N.at(p, i, a);
      }
  });
  return t;
}

CoordinateMetric dmetric_to_coordinate(const DMetric& g, const NConnectionField& N) {
  require_same_chart(g.chart, N.chart);
  const GridChart& chart = g.chart;
  CoordinateMetric out(chart);
  for_each_node(chart, [&](std::size_t p) {
    for (int i = 0; i < chart.n; ++i)
      for (int j = 0; j < chart.n; ++j) {
        double s = g.hat(p, i, j);
        for (int a = 0; a < chart.m; ++a)
          for (int b = 0; b < chart.m; ++b)
            s += N.at(p, i, a) * N.at(p, j, b) * g.vat(p, a, b);
        out.at(p, i, j) = s;
      }
    for (int i = 0; i < chart.n; ++i)
      for (int b = 0; b < chart.m; ++b) {
        double s = 0.0;
        for (int e = 0; e < chart.m; ++e) s += N.at(p, i, e) * g.vat(p, b, e);
        out.at(p, i, chart.n + b) = s;
        out.at(p, chart.n + b, i) = s;
      }
    for (int a = 0; a < chart.m; ++a)
      for (int b = 0; b < chart.m; ++b) out.at(p, chart.n + a, chart.n + b) = g.vat(p, a, b);
  });
  return out;
}

std::vector<std::vector<double>> frame_derivs_of(const std::vector<double>& comps, std::size_t K,
                                                 const GridChart& chart, const NConnectionField& N,
                                                 FractionalOrder order) {
  const std::size_t nodes = chart.node_count();
  const int d = chart.dim();
  std::vector<std::vector<double>> out(d, std::vector<double>(comps.size(), 0.0));
  ScalarField f(chart);
  std::vector<ScalarField> ax(d);
  for (std::size_t q = 0; q < K; ++q) {
    for (std::size_t p = 0; p < nodes; ++p) f.values[p] = comps[p * K + q];
    for (int k = 0; k < d; ++k) ax[k] = axis_caputo(f, k, order);
    for (int beta = 0; beta < d; ++beta) {
      if (beta >= chart.n) {
        for (std::size_t p = 0; p < nodes; ++p) out[beta][p * K + q] = ax[beta].values[p];
      } else {
        for (std::size_t p = 0; p < nodes; ++p) {
          double s = ax[beta].values[p];
          for (int a = 0; a < chart.m; ++a) s -= N.at(p, beta, a) * ax[chart.n + a].values[p];
          out[beta][p * K + q] = s;
        }
      }
    }
  }
  return out;
}

DMetricInverse invert_dmetric(const DMetric& g) {
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  DMetricInverse inv;
  inv.h.assign(g.h.size(), 0.0);
  inv.v.assign(g.v.size(), 0.0);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    invert_small(&g.h[p * n * n], &inv.h[p * n * n], n, "degenerate metric");
    invert_small(&g.v[p * m * m], &inv.v[p * m * m], m, "degenerate vertical metric");
  }
  return inv;
}

std::pair<DMetric, NConnectionField> coordinate_to_dmetric(const CoordinateMetric& gc) {
  const GridChart& chart = gc.chart;
  DMetric g(chart);
  NConnectionField N(chart);
  const int n = chart.n, m = chart.m;
  std::vector<double> vblock(m * m), vinv(m * m);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) vblock[a * m + b] = gc.at(p, n + a, n + b);
    invert_small(vblock.data(), vinv.data(), m, "degenerate vertical metric");
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) g.vat(p, a, b) = vblock[a * m + b];
    // N_i^e = g_ib (g^-1)^be
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m; ++e) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += gc.at(p, i, n + b) * vinv[b * m + e];
        N.at(p, i, e) = s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = gc.at(p, i, j);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) s -= N.at(p, i, a) * N.at(p, j, b) * vblock[a * m + b];
        g.hat(p, i, j) = s;
      }
  }
  return {std::move(g), std::move(N)};
}

}  // namespace fracflow
