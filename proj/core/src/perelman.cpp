#include "fracflow/perelman.hpp"

#include <cmath>
#include <stdexcept>

#include "fracflow/linalg.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {

namespace {

/// Weights integrating a piecewise-linear interpolant against the kernel
/// (b - x)^(alpha-1) / Gamma(alpha) over [a, b]; exact trapezoid at alpha=1.
std::vector<double> axis_kernel_weights(const AxisGrid& axis, double alpha) {
  const int count = axis.count;
  const double h = axis.spacing();
  const double b = axis.upper;
  const double ga = std::tgamma(alpha);
  std::vector<double> w(count, 0.0);
  for (int j = 0; j + 1 < count; ++j) {
    const double t0 = b - axis.node(j);
    const double t1 = b - axis.node(j + 1);
    const double p0 = std::pow(t0, alpha), p1 = std::pow(t1, alpha);
    const double q0 = std::pow(t0, alpha + 1.0), q1 = std::pow(t1, alpha + 1.0);
    const double m0 = (p0 - p1) / (alpha * ga);
    const double m1 = (t0 * (p0 - p1) / alpha - (q0 - q1) / (alpha + 1.0)) / ga;
    w[j] += m0 - m1 / h;
    w[j + 1] += m1 / h;
  }
  return w;
}

}  // namespace

double VolumeElement::weight(std::size_t p) const {
  const auto idx = chart.unflatten(p);
  double w = density[p];
  for (int d = 0; d < chart.dim(); ++d) w *= axis_weights[d][idx[d]];
  return w;
}

VolumeElement volume_element(const DMetric& g, FractionalOrder order) {
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  VolumeElement vol;
  vol.chart = chart;
  vol.density.assign(chart.node_count(), 0.0);
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    const double dh = det_small(&g.h[p * n * n], n);
    const double dv = det_small(&g.v[p * m * m], m);
    const double dens = std::sqrt(std::abs(dh)) * std::sqrt(std::abs(dv));
    if (!(dens > 0.0) || !std::isfinite(dens)) throw std::runtime_error("degenerate metric");
    vol.density[p] = dens;
  }
  vol.axis_weights.reserve(chart.dim());
  for (int d = 0; d < chart.dim(); ++d)
    vol.axis_weights.push_back(axis_kernel_weights(chart.axes[d], order.alpha));
  return vol;
}

double volume_integrate(const VolumeElement& vol, const std::vector<double>& field) {
  if (field.size() != vol.density.size()) throw std::invalid_argument("chart mismatch");
  const GridChart& chart = vol.chart;
  const int d = chart.dim();
  std::array<int, kMaxDim> idx{};
  double total = 0.0;
  for (std::size_t p = 0; p < field.size(); ++p) {
    double w = vol.density[p];
    for (int k = 0; k < d; ++k) w *= vol.axis_weights[k][idx[k]];
    total += field[p] * w;
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < chart.axes[k].count) break;
      idx[k] = 0;
    }
  }
  return total;
}

double fractional_volume_integral(const ScalarField& field, const DMetric& g,
                                  FractionalOrder order) {
  require_same_chart(field.chart, g.chart);
  return volume_integrate(volume_element(g, order), field.values);
}

PotentialDerivs potential_derivs(const ScalarField& f, const DMetric& g,
                                 const NConnectionField& N, const DConnectionCoeffs& gamma,
                                 FractionalOrder order) {
  require_same_chart(f.chart, g.chart);
  require_same_chart(f.chart, N.chart);
  const GridChart& chart = f.chart;
  const int n = chart.n, m = chart.m, d = chart.dim();
  const std::size_t nodes = chart.node_count();

  PotentialDerivs out;
  const auto d1 = frame_derivs_of(f.values, 1, chart, N, order);
  out.first.assign(d, ScalarField(chart));
  for (int beta = 0; beta < d; ++beta) out.first[beta].values = d1[beta];

  std::vector<double> firsts(nodes * d);
  for (std::size_t p = 0; p < nodes; ++p)
    for (int beta = 0; beta < d; ++beta) firsts[p * d + beta] = d1[beta][p];
  const auto d2 = frame_derivs_of(firsts, static_cast<std::size_t>(d), chart, N, order);

  const DMetricInverse inv = invert_dmetric(g);
  out.hhess.assign(nodes * n * n, 0.0);
  out.vhess.assign(nodes * m * m, 0.0);
  out.hlap = ScalarField(chart);
  out.vlap = ScalarField(chart);
  out.hgrad_sq = ScalarField(chart);
  out.vgrad_sq = ScalarField(chart);

  parallel_for(nodes, [&](std::size_t p) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.5 * (d2[k][p * d + j] + d2[j][p * d + k]);
        for (int i = 0; i < n; ++i) s -= gamma.Lh(p, i, j, k) * d1[i][p];
        out.hhess[(p * n + j) * n + k] = s;
      }
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double s = 0.5 * (d2[n + c][p * d + n + b] + d2[n + b][p * d + n + c]);
        for (int a = 0; a < m; ++a) s -= gamma.Cv(p, a, b, c) * d1[n + a][p];
        out.vhess[(p * m + b) * m + c] = s;
      }
    double hl = 0.0, vl = 0.0, hg = 0.0, vg = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        hl += inv.h[(p * n + j) * n + k] * out.hhess[(p * n + j) * n + k];
        hg += inv.h[(p * n + j) * n + k] * d1[j][p] * d1[k][p];
      }
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        vl += inv.v[(p * m + b) * m + c] * out.vhess[(p * m + b) * m + c];
        vg += inv.v[(p * m + b) * m + c] * d1[n + b][p] * d1[n + c][p];
      }
    out.hlap.values[p] = hl;
    out.vlap.values[p] = vl;
    out.hgrad_sq.values[p] = hg;
    out.vgrad_sq.values[p] = vg;
  });
  return out;
}

double mu_mass(const DMetric& g, const ScalarField& f, double tau, FractionalOrder order) {
  require_same_chart(g.chart, f.chart);
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const double pref = std::pow(4.0 * M_PI * tau, -0.5 * g.chart.dim());
  std::vector<double> integrand(f.values.size());
  for (std::size_t p = 0; p < integrand.size(); ++p)
    integrand[p] = pref * std::exp(-f.values[p]);
  return volume_integrate(volume_element(g, order), integrand);
}

ScalarField normalize_potential(const DMetric& g, const ScalarField& f, double tau,
                                FractionalOrder order) {
  const double mass = mu_mass(g, f, tau, order);
  if (!std::isfinite(mass) || !(mass > 0.0)) throw std::runtime_error("non-finite mass");
  ScalarField out = f;
  const double shift = std::log(mass);
  for (double& v : out.values) v += shift;
  return out;
}

double functional_F(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                    FractionalOrder order) {
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const ScalarCurvature sc = scalar_curvature(g, ric);
  const PotentialDerivs pd = potential_derivs(f, g, N, gamma, order);

  std::vector<double> integrand(f.values.size());
  for (std::size_t p = 0; p < integrand.size(); ++p)
    integrand[p] = (sc.hR.values[p] + sc.vS.values[p] + pd.hgrad_sq.values[p] +
                    pd.vgrad_sq.values[p]) *
                   std::exp(-f.values[p]);
  return volume_integrate(volume_element(g, order), integrand);
}

double functional_W(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                    double tau, FractionalOrder order, bool norm_squared) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const ScalarCurvature sc = scalar_curvature(g, ric);
  const PotentialDerivs pd = potential_derivs(f, g, N, gamma, order);

  const double half_dim = 0.5 * g.chart.dim();
  const double pref = std::pow(4.0 * M_PI * tau, -half_dim);
  std::vector<double> integrand(f.values.size());
  for (std::size_t p = 0; p < integrand.size(); ++p) {
    const double rs = sc.hR.values[p] + sc.vS.values[p];
    double core;
    if (norm_squared) {
      core = tau * (rs + pd.hgrad_sq.values[p] + pd.vgrad_sq.values[p]);
    } else {
      const double q =
          rs + std::sqrt(std::max(pd.hgrad_sq.values[p], 0.0)) +
          std::sqrt(std::max(pd.vgrad_sq.values[p], 0.0));
      core = tau * q * q;
    }
    integrand[p] = (core + f.values[p] - half_dim) * pref * std::exp(-f.values[p]);
  }
  return volume_integrate(volume_element(g, order), integrand);
}

double first_variation_F(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                         const std::vector<double>& v_h, const std::vector<double>& v_v,
                         const ScalarField& fh, const ScalarField& fv, FractionalOrder order) {
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  if (v_h.size() != g.h.size() || v_v.size() != g.v.size())
    throw std::invalid_argument("chart mismatch");
  require_same_chart(chart, fh.chart);
  require_same_chart(chart, fv.chart);

  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const ScalarCurvature sc = scalar_curvature(g, ric);
  const PotentialDerivs pd = potential_derivs(f, g, N, gamma, order);
  const DMetricInverse inv = invert_dmetric(g);

  std::vector<double> integrand(f.values.size(), 0.0);
  parallel_for(chart.node_count(), [&](std::size_t p) {
    double vtrace = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) vtrace += inv.h[(p * n + i) * n + j] * v_h[(p * n + i) * n + j];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) vtrace += inv.v[(p * m + a) * m + b] * v_v[(p * m + a) * m + b];

    // -v^{ij}(R_ij + D_i D_j f) and the v-block analog.
    double pair_term = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double vij_up = 0.0;
        for (int i2 = 0; i2 < n; ++i2)
          for (int j2 = 0; j2 < n; ++j2)
            vij_up += inv.h[(p * n + i) * n + i2] * inv.h[(p * n + j) * n + j2] *
                      v_h[(p * n + i2) * n + j2];
        pair_term -= vij_up * (ric.hh[(p * n + i) * n + j] + pd.hhess[(p * n + i) * n + j]);
      }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double vab_up = 0.0;
        for (int a2 = 0; a2 < m; ++a2)
          for (int b2 = 0; b2 < m; ++b2)
            vab_up += inv.v[(p * m + a) * m + a2] * inv.v[(p * m + b) * m + b2] *
                      v_v[(p * m + a2) * m + b2];
        pair_term -= vab_up * (ric.vv[(p * m + a) * m + b] + pd.vhess[(p * m + a) * m + b]);
      }

    const double fvar = fh.values[p] + fv.values[p];
    const double trace_expr = 2.0 * (pd.hlap.values[p] + pd.vlap.values[p]) -
                              (pd.hgrad_sq.values[p] + pd.vgrad_sq.values[p]) +
                              sc.hR.values[p] + sc.vS.values[p];
    integrand[p] = (pair_term + (0.5 * vtrace - fvar) * trace_expr) * std::exp(-f.values[p]);
  });
  return volume_integrate(volume_element(g, order), integrand);
}

namespace {

/// 2 int scale [ |Ric_hh + Hess_h f - c g_h|^2 + v-analog ] weight dV.
double soliton_square_integral(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                               FractionalOrder order, double c, double scale, double mu_prefactor) {
  const GridChart& chart = g.chart;
  const int n = chart.n, m = chart.m;
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const PotentialDerivs pd = potential_derivs(f, g, N, gamma, order);
  const DMetricInverse inv = invert_dmetric(g);

  std::vector<double> integrand(f.values.size(), 0.0);
  parallel_for(chart.node_count(), [&](std::size_t p) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int i2 = 0; i2 < n; ++i2)
          for (int j2 = 0; j2 < n; ++j2) {
            const double t1 = ric.hh[(p * n + i) * n + j] + pd.hhess[(p * n + i) * n + j] -
                              c * g.hat(p, i, j);
            const double t2 = ric.hh[(p * n + i2) * n + j2] + pd.hhess[(p * n + i2) * n + j2] -
                              c * g.hat(p, i2, j2);
            sq += inv.h[(p * n + i) * n + i2] * inv.h[(p * n + j) * n + j2] * t1 * t2;
          }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int a2 = 0; a2 < m; ++a2)
          for (int b2 = 0; b2 < m; ++b2) {
            const double t1 = ric.vv[(p * m + a) * m + b] + pd.vhess[(p * m + a) * m + b] -
                              c * g.vat(p, a, b);
            const double t2 = ric.vv[(p * m + a2) * m + b2] + pd.vhess[(p * m + a2) * m + b2] -
                              c * g.vat(p, a2, b2);
            sq += inv.v[(p * m + a) * m + a2] * inv.v[(p * m + b) * m + b2] * t1 * t2;
          }
    integrand[p] = 2.0 * scale * sq * mu_prefactor * std::exp(-f.values[p]);
  });
  return volume_integrate(volume_element(g, order), integrand);
}

}  // namespace

double dF_dchi_integral(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                        FractionalOrder order) {
  return soliton_square_integral(g, N, f, order, 0.0, 1.0, 1.0);
}

double dW_dchi_integral(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                        double tau, FractionalOrder order) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const double pref = std::pow(4.0 * M_PI * tau, -0.5 * g.chart.dim());
  return soliton_square_integral(g, N, f, order, 0.5 / tau, tau, pref);
}

ThermoRecord thermodynamics(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                            double tau, FractionalOrder order) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const GridChart& chart = g.chart;
  const double half_dim = 0.5 * chart.dim();
  const DConnectionCoeffs gamma = canonical_dconnection(g, N, order);
  const CurvatureBlocks curv = dcurvature(gamma, N, g, order);
  const RicciBlocks ric = ricci_contract(curv);
  const ScalarCurvature sc = scalar_curvature(g, ric);
  const PotentialDerivs pd = potential_derivs(f, g, N, gamma, order);

  const double pref = std::pow(4.0 * M_PI * tau, -half_dim);
  const VolumeElement vol = volume_element(g, order);
  std::vector<double> e_int(f.values.size()), s_int(f.values.size()), z_int(f.values.size());
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    const double q = sc.hR.values[p] + sc.vS.values[p] + pd.hgrad_sq.values[p] +
                     pd.vgrad_sq.values[p];
    const double mu = pref * std::exp(-f.values[p]);
    e_int[p] = -tau * tau * (q - half_dim / tau) * mu;
    s_int[p] = -(tau * q + f.values[p] - half_dim) * mu;
    z_int[p] = (-f.values[p] + half_dim) * mu;
  }
  ThermoRecord rec;
  rec.energy = volume_integrate(vol, e_int);
  rec.entropy = volume_integrate(vol, s_int);
  rec.log_partition = volume_integrate(vol, z_int);
  rec.fluctuation = tau * tau * tau * dW_dchi_integral(g, N, f, tau, order);
  return rec;
}

}  // namespace fracflow
