#include "fracflow/connection.hpp"

#include <cmath>

#include "fracflow/linalg.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {

namespace testing {
bool flip_candcon_sign = false;
}

DConnectionCoeffs::DConnectionCoeffs(const GridChart& c)
    : chart(c),
      L_h(c.node_count() * c.n * c.n * c.n, 0.0),
      L_v(c.node_count() * c.m * c.m * c.n, 0.0),
      C_h(c.node_count() * c.n * c.n * c.m, 0.0),
      C_v(c.node_count() * c.m * c.m * c.m, 0.0) {}

FullConnection::FullConnection(const GridChart& c)
    : chart(c),
      L_hhh(c.node_count() * c.n * c.n * c.n, 0.0),
      L_vhh(c.node_count() * c.m * c.n * c.n, 0.0),
      L_hvh(c.node_count() * c.n * c.m * c.n, 0.0),
      L_vvh(c.node_count() * c.m * c.m * c.n, 0.0),
      C_hhv(c.node_count() * c.n * c.n * c.m, 0.0),
      C_vhv(c.node_count() * c.m * c.n * c.m, 0.0),
      C_hvv(c.node_count() * c.n * c.m * c.m, 0.0),
      C_vvv(c.node_count() * c.m * c.m * c.m, 0.0) {}

double FullConnection::coeff(std::size_t p, int gamma, int alpha, int beta) const {
  return const_cast<FullConnection*>(this)->coeff_ref(p, gamma, alpha, beta);
}

double& FullConnection::coeff_ref(std::size_t p, int gamma, int alpha, int beta) {
  const int n = chart.n, m = chart.m;
  const bool gh = gamma < n, ah = alpha < n, bh = beta < n;
  const int gi = gh ? gamma : gamma - n;
  const int ai = ah ? alpha : alpha - n;
  const int bi = bh ? beta : beta - n;
  if (bh) {
    if (gh && ah) return L_hhh[((p * n + gi) * n + ai) * n + bi];
    if (!gh && ah) return L_vhh[((p * m + gi) * n + ai) * n + bi];
    if (gh && !ah) return L_hvh[((p * n + gi) * m + ai) * n + bi];
    return L_vvh[((p * m + gi) * m + ai) * n + bi];
  }
  if (gh && ah) return C_hhv[((p * n + gi) * n + ai) * m + bi];
  if (!gh && ah) return C_vhv[((p * m + gi) * n + ai) * m + bi];
  if (gh && !ah) return C_hvv[((p * n + gi) * m + ai) * m + bi];
  return C_vvv[((p * m + gi) * m + ai) * m + bi];
}

TorsionBlocks::TorsionBlocks(const GridChart& c)
    : chart(c),
      T_hhh(c.node_count() * c.n * c.n * c.n, 0.0),
      T_hhv(c.node_count() * c.n * c.n * c.m, 0.0),
      T_vhh(c.node_count() * c.m * c.n * c.n, 0.0),
      T_vvh(c.node_count() * c.m * c.m * c.n, 0.0),
      T_vvv(c.node_count() * c.m * c.m * c.m, 0.0) {}

CurvatureBlocks::CurvatureBlocks(const GridChart& c)
    : chart(c),
      R_hhhh(c.node_count() * c.n * c.n * c.n * c.n, 0.0),
      R_vvhh(c.node_count() * c.m * c.m * c.n * c.n, 0.0),
      R_hhhv(c.node_count() * c.n * c.n * c.n * c.m, 0.0),
      R_vvhv(c.node_count() * c.m * c.m * c.n * c.m, 0.0),
      R_hhvv(c.node_count() * c.n * c.n * c.m * c.m, 0.0),
      R_vvvv(c.node_count() * c.m * c.m * c.m * c.m, 0.0) {}

RicciBlocks::RicciBlocks(const GridChart& c)
    : chart(c),
      hh(c.node_count() * c.n * c.n, 0.0),
      hv(c.node_count() * c.n * c.m, 0.0),
      vh(c.node_count() * c.m * c.n, 0.0),
      vv(c.node_count() * c.m * c.m, 0.0) {}

EinsteinBlocks::EinsteinBlocks(const GridChart& c)
    : chart(c),
      hh(c.node_count() * c.n * c.n, 0.0),
      hv(c.node_count() * c.n * c.m, 0.0),
      vh(c.node_count() * c.m * c.n, 0.0),
      vv(c.node_count() * c.m * c.m, 0.0) {}

DConnectionCoeffs canonical_dconnection(const DMetric& g, const NConnectionField& N,
                                        FractionalOrder order) {
  require_same_chart(g.chart, N.chart);
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  DConnectionCoeffs out(chart);

  const DMetricInverse inv = invert_dmetric(g);
  const auto dgh = frame_derivs_of(g.h, static_cast<std::size_t>(n) * n, chart, N, order);
  const auto dgv = frame_derivs_of(g.v, static_cast<std::size_t>(m) * m, chart, N, order);
  const Anholonomy anh = anholonomy(N, order);
  const double esign = testing::flip_candcon_sign ? 1.0 : -1.0;

  parallel_for(chart.node_count(), [&](std::size_t p) {
    const double* gh_inv = &inv.h[p * n * n];
    const double* gv_inv = &inv.v[p * m * m];
    auto dh = [&](int beta, int i, int j) { return dgh[beta][(p * n + i) * n + j]; };
    auto dv = [&](int beta, int a, int b) { return dgv[beta][(p * m + a) * m + b]; };
    auto w = [&](int k, int b, int a) {
      return anh.w_ibv[((p * n + k) * chart.m + b) * chart.m + a];
    };

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int r = 0; r < n; ++r)
            s += gh_inv[i * n + r] * (dh(k, j, r) + dh(j, k, r) + esign * dh(r, j, k));
          out.Lh(p, i, j, k) = 0.5 * s;
        }

    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < n; ++k) {
          double s = w(k, b, a);
          for (int c = 0; c < m; ++c) {
            double t = dv(k, b, c);
            for (int d = 0; d < m; ++d)
              t -= g.vat(p, d, c) * w(k, b, d) + g.vat(p, d, b) * w(k, c, d);
            s += 0.5 * gv_inv[a * m + c] * t;
          }
          out.Lv(p, a, b, k) = s;
        }

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += gh_inv[i * n + k] * dh(n + c, j, k);
          out.Ch(p, i, j, c) = 0.5 * s;
        }

    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int d = 0; d < m; ++d)
            s += gv_inv[a * m + d] * (dv(n + c, b, d) + dv(n + b, c, d) - dv(n + d, b, c));
          out.Cv(p, a, b, c) = 0.5 * s;
        }
  });
  return out;
}

TorsionBlocks dtorsion(const DConnectionCoeffs& gamma, const NConnectionField& N,
                       FractionalOrder order) {
  require_same_chart(gamma.chart, N.chart);
  const GridChart& chart = gamma.chart;
  const int n = chart.n, m = chart.m;
  TorsionBlocks out(chart);
  const Anholonomy anh = anholonomy(N, order);

  parallel_for(chart.node_count(), [&](std::size_t p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out.T_hhh[((p * n + i) * n + j) * n + k] = gamma.Lh(p, i, j, k) - gamma.Lh(p, i, k, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < m; ++a)
          out.T_hhv[((p * n + i) * n + j) * m + a] = gamma.Ch(p, i, j, a);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          out.T_vhh[((p * m + a) * n + j) * n + i] =
              anh.omega[((p * n + j) * n + i) * m + a];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
          out.T_vvh[((p * m + a) * m + b) * n + i] =
              anh.w_ibv[((p * n + i) * m + b) * m + a] - gamma.Lv(p, a, b, i);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          out.T_vvv[((p * m + a) * m + b) * m + c] = gamma.Cv(p, a, b, c) - gamma.Cv(p, a, c, b);
  });
  return out;
}

CurvatureBlocks dcurvature(const DConnectionCoeffs& gamma, const NConnectionField& N,
                           const DMetric& g, FractionalOrder order) {
  require_same_chart(gamma.chart, N.chart);
  require_same_chart(gamma.chart, g.chart);
  const GridChart& chart = gamma.chart;
  const int n = chart.n, m = chart.m;
  CurvatureBlocks out(chart);

  const std::size_t Klh = static_cast<std::size_t>(n) * n * n;
  const std::size_t Klv = static_cast<std::size_t>(m) * m * n;
  const std::size_t Kch = static_cast<std::size_t>(n) * n * m;
  const std::size_t Kcv = static_cast<std::size_t>(m) * m * m;
  const auto dLh = frame_derivs_of(gamma.L_h, Klh, chart, N, order);
  const auto dLv = frame_derivs_of(gamma.L_v, Klv, chart, N, order);
  const auto dCh = frame_derivs_of(gamma.C_h, Kch, chart, N, order);
  const auto dCv = frame_derivs_of(gamma.C_v, Kcv, chart, N, order);
  const Anholonomy anh = anholonomy(N, order);

  parallel_for(chart.node_count(), [&](std::size_t p) {
    auto lhD = [&](int beta, int i, int j, int k) {
      return dLh[beta][p * Klh + (static_cast<std::size_t>(i) * n + j) * n + k];
    };
    auto lvD = [&](int beta, int a, int b, int k) {
      return dLv[beta][p * Klv + (static_cast<std::size_t>(a) * m + b) * n + k];
    };
    auto chD = [&](int beta, int i, int j, int c) {
      return dCh[beta][p * Kch + (static_cast<std::size_t>(i) * n + j) * m + c];
    };
    auto cvD = [&](int beta, int a, int b, int c) {
      return dCv[beta][p * Kcv + (static_cast<std::size_t>(a) * m + b) * m + c];
    };
    auto om = [&](int j, int i, int a) { return anh.omega[((p * n + j) * n + i) * m + a]; };
    auto w = [&](int k, int b, int a) { return anh.w_ibv[((p * n + k) * m + b) * m + a]; };

    // R^i_hjk
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < n; ++h)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double s = lhD(k, i, h, j) - lhD(j, i, h, k);
            for (int mm = 0; mm < n; ++mm)
              s += gamma.Lh(p, mm, h, j) * gamma.Lh(p, i, mm, k) -
                   gamma.Lh(p, mm, h, k) * gamma.Lh(p, i, mm, j);
            for (int a = 0; a < m; ++a) s -= gamma.Ch(p, i, h, a) * om(k, j, a);
            out.R_hhhh[(((p * n + i) * n + h) * n + j) * n + k] = s;
          }

    // R^a_bjk
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double s = lvD(k, a, b, j) - lvD(j, a, b, k);
            for (int c = 0; c < m; ++c)
              s += gamma.Lv(p, c, b, j) * gamma.Lv(p, a, c, k) -
                   gamma.Lv(p, c, b, k) * gamma.Lv(p, a, c, j);
            for (int c = 0; c < m; ++c) s -= gamma.Cv(p, a, b, c) * om(k, j, c);
            out.R_vvhh[(((p * m + a) * m + b) * n + j) * n + k] = s;
          }

    // R^i_jka, with the h-covariant derivative of C^i_ja along e_k and the
    // mixed torsion T^b_ka = L^b_ak - d_a N_k^b.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int a = 0; a < m; ++a) {
            double dc = chD(k, i, j, a);
            for (int mm = 0; mm < n; ++mm)
              dc += gamma.Lh(p, i, mm, k) * gamma.Ch(p, mm, j, a) -
                    gamma.Lh(p, mm, j, k) * gamma.Ch(p, i, mm, a);
            for (int b = 0; b < m; ++b) dc -= gamma.Lv(p, b, a, k) * gamma.Ch(p, i, j, b);
            double s = lhD(n + a, i, j, k) - dc;
            for (int b = 0; b < m; ++b)
              s += gamma.Ch(p, i, j, b) * (gamma.Lv(p, b, a, k) - w(k, a, b));
            out.R_hhhv[(((p * n + i) * n + j) * n + k) * m + a] = s;
          }

    // R^c_bka
    for (int c = 0; c < m; ++c)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < n; ++k)
          for (int a = 0; a < m; ++a) {
            double dc = cvD(k, c, b, a);
            for (int d = 0; d < m; ++d)
              dc += gamma.Lv(p, c, d, k) * gamma.Cv(p, d, b, a) -
                    gamma.Lv(p, d, b, k) * gamma.Cv(p, c, d, a) -
                    gamma.Lv(p, d, a, k) * gamma.Cv(p, c, b, d);
            double s = lvD(n + a, c, b, k) - dc;
            for (int d = 0; d < m; ++d)
              s += gamma.Cv(p, c, b, d) * (gamma.Lv(p, d, a, k) - w(k, a, d));
            out.R_vvhv[(((p * m + c) * m + b) * n + k) * m + a] = s;
          }

    // R^i_jbc
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) {
            double s = chD(n + c, i, j, b) - chD(n + b, i, j, c);
            for (int h = 0; h < n; ++h)
              s += gamma.Ch(p, h, j, b) * gamma.Ch(p, i, h, c) -
                   gamma.Ch(p, h, j, c) * gamma.Ch(p, i, h, b);
            out.R_hhvv[(((p * n + i) * n + j) * m + b) * m + c] = s;
          }

    // R^a_bcd
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            double s = cvD(n + d, a, b, c) - cvD(n + c, a, b, d);
            for (int e = 0; e < m; ++e)
              s += gamma.Cv(p, e, b, c) * gamma.Cv(p, a, e, d) -
                   gamma.Cv(p, e, b, d) * gamma.Cv(p, a, e, c);
            out.R_vvvv[(((p * m + a) * m + b) * m + c) * m + d] = s;
          }
  });
  return out;
}

RicciBlocks ricci_contract(const CurvatureBlocks& R) {
  const GridChart& chart = R.chart;
  const int n = chart.n, m = chart.m;
  RicciBlocks out(chart);
  parallel_for(chart.node_count(), [&](std::size_t p) {
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += R.R_hhhh[(((p * n + k) * n + h) * n + j) * n + k];
        out.hh[(p * n + h) * n + j] = s;
      }
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += R.R_hhhv[(((p * n + k) * n + i) * n + k) * m + a];
        out.hv[(p * n + i) * m + a] = -s;
      }
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int b = 0; b < m; ++b) s += R.R_vvhv[(((p * m + b) * m + a) * n + i) * m + b];
        out.vh[(p * m + a) * n + i] = s;
      }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += R.R_vvvv[(((p * m + c) * m + a) * m + b) * m + c];
        out.vv[(p * m + a) * m + b] = s;
      }
  });
  return out;
}

ScalarCurvature scalar_curvature(const DMetric& g, const RicciBlocks& ric) {
  require_same_chart(g.chart, ric.chart);
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  const DMetricInverse inv = invert_dmetric(g);
  ScalarCurvature sc{ScalarField(chart), ScalarField(chart)};
  parallel_for(chart.node_count(), [&](std::size_t p) {
    double r = 0.0, s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r += inv.h[(p * n + i) * n + j] * ric.hh[(p * n + i) * n + j];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) s += inv.v[(p * m + a) * m + b] * ric.vv[(p * m + a) * m + b];
    sc.hR.values[p] = r;
    sc.vS.values[p] = s;
  });
  return sc;
}

EinsteinBlocks einstein_tensor(const DMetric& g, const RicciBlocks& ric,
                               const ScalarCurvature& sc) {
  require_same_chart(g.chart, ric.chart);
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  EinsteinBlocks out(chart);
  parallel_for(chart.node_count(), [&](std::size_t p) {
    const double half_total = 0.5 * (sc.hR.values[p] + sc.vS.values[p]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.hh[(p * n + i) * n + j] = ric.hh[(p * n + i) * n + j] - g.hat(p, i, j) * half_total;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        out.vv[(p * m + a) * m + b] = ric.vv[(p * m + a) * m + b] - g.vat(p, a, b) * half_total;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) out.hv[(p * n + i) * m + a] = ric.hv[(p * n + i) * m + a];
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i) out.vh[(p * m + a) * n + i] = ric.vh[(p * m + a) * n + i];
  });
  return out;
}

DistortionBlocks levi_civita_distortion(const DMetric& g, const NConnectionField& N,
                                        FractionalOrder order) {
  require_same_chart(g.chart, N.chart);
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  DistortionBlocks out(chart);

  const DConnectionCoeffs can = canonical_dconnection(g, N, order);
  const DMetricInverse inv = invert_dmetric(g);
  const auto dgh = frame_derivs_of(g.h, static_cast<std::size_t>(n) * n, chart, N, order);
  const auto dgv = frame_derivs_of(g.v, static_cast<std::size_t>(m) * m, chart, N, order);
  const Anholonomy anh = anholonomy(N, order);

  parallel_for(chart.node_count(), [&](std::size_t p) {
    auto dh = [&](int beta, int i, int j) { return dgh[beta][(p * n + i) * n + j]; };
    auto dv = [&](int beta, int a, int b) { return dgv[beta][(p * m + a) * m + b]; };
    auto om = [&](int j, int i, int a) { return anh.omega[((p * n + j) * n + i) * m + a]; };
    auto w = [&](int k, int b, int a) { return anh.w_ibv[((p * n + k) * m + b) * m + a]; };
    const double* gh_inv = &inv.h[p * n * n];
    const double* gv_inv = &inv.v[p * m * m];

    // Z^a_jk = (1/2) Omega_kj^a - (1/2) g^{ab} d_b g_jk
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.5 * om(k, j, a);
          for (int b = 0; b < m; ++b) s -= 0.5 * gv_inv[a * m + b] * dh(n + b, j, k);
          out.z.L_vhh[((p * m + a) * n + j) * n + k] = s;
        }

    // Z^i_bk = (1/2) g^{ij} ( d_b g_kj - Omega_kj^c g_cb )
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) {
            double t = dh(n + b, k, j);
            for (int c = 0; c < m; ++c) t -= om(k, j, c) * g.vat(p, c, b);
            s += gh_inv[i * n + j] * t;
          }
          out.z.L_hvh[((p * n + i) * m + b) * n + k] = 0.5 * s;
        }

    // Z^i_jb = -(1/2) g^{ir} Omega_jr^c g_cb
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < m; ++b) {
          double s = 0.0;
          for (int r = 0; r < n; ++r) {
            double t = 0.0;
            for (int c = 0; c < m; ++c) t += om(j, r, c) * g.vat(p, c, b);
            s += gh_inv[i * n + r] * t;
          }
          out.z.C_hhv[((p * n + i) * n + j) * m + b] = -0.5 * s;
        }

    // Z^a_jb = L^a_bj - d_b N_j^a
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < m; ++b)
          out.z.C_vhv[((p * m + a) * n + j) * m + b] = can.Lv(p, a, b, j) - w(j, b, a);

    // Z^i_bc = (1/2) g^{ij} ( -e_j g_bc + (d_c N_j^d) g_db + (d_b N_j^d) g_dc )
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) {
            double t = -dv(j, b, c);
            for (int d = 0; d < m; ++d)
              t += w(j, c, d) * g.vat(p, d, b) + w(j, b, d) * g.vat(p, d, c);
            s += gh_inv[i * n + j] * t;
          }
          out.z.C_hvv[((p * n + i) * m + b) * m + c] = 0.5 * s;
        }
  });

  // Levi-Civita = canonical (in its four slots) + distortion.
  out.levi_civita.L_hhh = can.L_h;
  out.levi_civita.L_vvh = can.L_v;
  out.levi_civita.C_vvv = can.C_v;
  out.levi_civita.L_vhh = out.z.L_vhh;
  out.levi_civita.L_hvh = out.z.L_hvh;
  out.levi_civita.C_vhv = out.z.C_vhv;
  out.levi_civita.C_hvv = out.z.C_hvv;
  out.levi_civita.C_hhv.resize(can.C_h.size());
  for (std::size_t q = 0; q < can.C_h.size(); ++q)
    out.levi_civita.C_hhv[q] = can.C_h[q] + out.z.C_hhv[q];
  return out;
}

RicciBlocks full_connection_ricci(const FullConnection& gamma, const NConnectionField& N,
                                  FractionalOrder order) {
  require_same_chart(gamma.chart, N.chart);
  const GridChart& chart = gamma.chart;
  const int n = chart.n, m = chart.m, d = chart.dim();
  const std::size_t nodes = chart.node_count();
  const std::size_t K = static_cast<std::size_t>(d) * d * d;

  // Dense coefficient table and its frame derivatives.
  std::vector<double> dense(nodes * K, 0.0);
  for (std::size_t p = 0; p < nodes; ++p)
    for (int ga = 0; ga < d; ++ga)
      for (int al = 0; al < d; ++al)
        for (int be = 0; be < d; ++be)
          dense[p * K + (static_cast<std::size_t>(ga) * d + al) * d + be] =
              gamma.coeff(p, ga, al, be);
  const auto dG = frame_derivs_of(dense, K, chart, N, order);
  const Anholonomy anh = anholonomy(N, order);

  RicciBlocks out(chart);
  parallel_for(nodes, [&](std::size_t p) {
    auto G = [&](int ga, int al, int be) {
      return dense[p * K + (static_cast<std::size_t>(ga) * d + al) * d + be];
    };
    auto dGat = [&](int dir, int ga, int al, int be) {
      return dG[dir][p * K + (static_cast<std::size_t>(ga) * d + al) * d + be];
    };
    // Structure functions [e_ga, e_be] = W^mu_{ga be} e_mu.
    auto W = [&](int mu, int ga, int be) -> double {
      if (mu < n) return 0.0;
      const int a = mu - n;
      if (ga < n && be < n) return anh.omega[((p * n + ga) * n + be) * m + a];
      if (ga < n && be >= n) return anh.w_ibv[((p * n + ga) * m + (be - n)) * m + a];
      if (ga >= n && be < n) return -anh.w_ibv[((p * n + be) * m + (ga - n)) * m + a];
      return 0.0;
    };

    for (int al = 0; al < d; ++al)
      for (int be = 0; be < d; ++be) {
        double s = 0.0;
        for (int ga = 0; ga < d; ++ga) {
          s += dGat(ga, ga, al, be) - dGat(be, ga, al, ga);
          for (int mu = 0; mu < d; ++mu) {
            s += G(mu, al, be) * G(ga, mu, ga) - G(mu, al, ga) * G(ga, mu, be);
            s -= W(mu, ga, be) * G(ga, al, mu);
          }
        }
        if (al < n && be < n)
          out.hh[(p * n + al) * n + be] = s;
        else if (al < n)
          out.hv[(p * n + al) * m + (be - n)] = s;
        else if (be < n)
          out.vh[(p * m + (al - n)) * n + be] = s;
        else
          out.vv[(p * m + (al - n)) * m + (be - n)] = s;
      }
  });
  return out;
}

double metricity_residual(const DConnectionCoeffs& gamma, const DMetric& g,
                          const NConnectionField& N, FractionalOrder order) {
  require_same_chart(gamma.chart, g.chart);
  require_same_chart(gamma.chart, N.chart);
  const GridChart& chart = gamma.chart;
  const int n = chart.n, m = chart.m;
  const auto dgh = frame_derivs_of(g.h, static_cast<std::size_t>(n) * n, chart, N, order);
  const auto dgv = frame_derivs_of(g.v, static_cast<std::size_t>(m) * m, chart, N, order);

  double worst = 0.0;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    auto dh = [&](int beta, int i, int j) { return dgh[beta][(p * n + i) * n + j]; };
    auto dv = [&](int beta, int a, int b) { return dgv[beta][(p * m + a) * m + b]; };
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double r = dh(k, i, j);
          for (int mm = 0; mm < n; ++mm)
            r -= gamma.Lh(p, mm, i, k) * g.hat(p, mm, j) + gamma.Lh(p, mm, j, k) * g.hat(p, i, mm);
          worst = std::max(worst, std::abs(r));
        }
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double r = dv(k, a, b);
          for (int c = 0; c < m; ++c)
            r -= gamma.Lv(p, c, a, k) * g.vat(p, c, b) + gamma.Lv(p, c, b, k) * g.vat(p, a, c);
          worst = std::max(worst, std::abs(r));
        }
    for (int c = 0; c < m; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double r = dh(n + c, i, j);
          for (int mm = 0; mm < n; ++mm)
            r -= gamma.Ch(p, mm, i, c) * g.hat(p, mm, j) + gamma.Ch(p, mm, j, c) * g.hat(p, i, mm);
          worst = std::max(worst, std::abs(r));
        }
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double r = dv(n + c, a, b);
          for (int d = 0; d < m; ++d)
            r -= gamma.Cv(p, d, a, c) * g.vat(p, d, b) + gamma.Cv(p, d, b, c) * g.vat(p, a, d);
          worst = std::max(worst, std::abs(r));
        }
  }
  return worst;
}

std::vector<double> push_connection_to_coordinate(const FullConnection& gamma,
                                                  const NConnectionField& N,
                                                  FractionalOrder order) {
  require_same_chart(gamma.chart, N.chart);
  const GridChart& chart = gamma.chart;
  const int n = chart.n, m = chart.m, d = chart.dim();
  const std::size_t nodes = chart.node_count();

  // e_beta N_i^a for every frame direction beta.
  const auto dN = frame_derivs_of(N.coeff, static_cast<std::size_t>(n) * m, chart, N, order);

  std::vector<double> out(nodes * d * d * d, 0.0);
  parallel_for(nodes, [&](std::size_t p) {
    // A: coordinate basis in the frame, d_al = sum A[al][alpha] e_alpha.
    // E: frame in the coordinate basis, e_ga = sum E[ga][gac] d_gac.
    double A[kMaxDim][kMaxDim] = {};
    double E[kMaxDim][kMaxDim] = {};
    for (int k = 0; k < d; ++k) A[k][k] = E[k][k] = 1.0;
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < m; ++a) {
        A[i][n + a] = N.at(p, i, a);
        E[i][n + a] = -N.at(p, i, a);
      }
    auto dNat = [&](int beta, int i, int a) { return dN[beta][(p * n + i) * m + a]; };

    for (int alc = 0; alc < d; ++alc)
      for (int bec = 0; bec < d; ++bec)
        for (int gac = 0; gac < d; ++gac) {
          double s = 0.0;
          for (int beta = 0; beta < d; ++beta) {
            if (A[bec][beta] == 0.0) continue;
            for (int gf = 0; gf < d; ++gf) {
              double inner = 0.0;
              if (alc < n && gf >= n) inner += dNat(beta, alc, gf - n);
              for (int alpha = 0; alpha < d; ++alpha) {
                if (A[alc][alpha] == 0.0) continue;
                inner += A[alc][alpha] * gamma.coeff(p, gf, alpha, beta);
              }
              s += A[bec][beta] * E[gf][gac] * inner;
            }
          }
          out[((p * d + gac) * d + alc) * d + bec] = s;
        }
  });
  return out;
}

CoordinateTensor push_ricci_to_coordinate(const RicciBlocks& ric, const NConnectionField& N) {
  require_same_chart(ric.chart, N.chart);
  const GridChart& chart = ric.chart;
  const int n = chart.n, m = chart.m, d = chart.dim();
  CoordinateTensor out{chart, std::vector<double>(chart.node_count() * d * d, 0.0)};
  parallel_for(chart.node_count(), [&](std::size_t p) {
    auto set = [&](int al, int be, double v) { out.comp[(p * d + al) * d + be] = v; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = ric.hhat(p, i, j);
        for (int b = 0; b < m; ++b) s += ric.hvat(p, i, b) * N.at(p, j, b);
        for (int a = 0; a < m; ++a) {
          s += N.at(p, i, a) * ric.vhat(p, a, j);
          for (int b = 0; b < m; ++b) s += N.at(p, i, a) * N.at(p, j, b) * ric.vvat(p, a, b);
        }
        set(i, j, s);
      }
    for (int i = 0; i < n; ++i)
      for (int b = 0; b < m; ++b) {
        double s = ric.hvat(p, i, b);
        for (int a = 0; a < m; ++a) s += N.at(p, i, a) * ric.vvat(p, a, b);
        set(i, n + b, s);
      }
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j) {
        double s = ric.vhat(p, a, j);
        for (int b = 0; b < m; ++b) s += ric.vvat(p, a, b) * N.at(p, j, b);
        set(n + a, j, s);
      }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) set(n + a, n + b, ric.vvat(p, a, b));
  });
  return out;
}

}  // namespace fracflow
