#pragma once

#include "fracflow/connection.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// Fractional volume element: pointwise metric density together with
/// per-axis quadrature weights for the left fractional integral whose
/// kernel is singular at the upper end of each axis. At order 1 the
/// weights are the plain trapezoid rule.
struct VolumeElement {
  GridChart chart;
  std::vector<double> density;                    // sqrt|det g_h| * sqrt|det g_v| per node
  std::vector<std::vector<double>> axis_weights;  // per axis, per node index

  /// Full quadrature weight of a node (axis-weight product times density).
  double weight(std::size_t p) const;
};

VolumeElement volume_element(const DMetric& g, FractionalOrder order);

/// Integral of field * density over the chart with the fractional weights.
double volume_integrate(const VolumeElement& vol, const std::vector<double>& field);

double fractional_volume_integral(const ScalarField& field, const DMetric& g,
                                  FractionalOrder order);

/// First and second canonical covariant derivatives of a scalar field.
struct PotentialDerivs {
  std::vector<ScalarField> first;  // e_beta f, one field per frame index
  std::vector<double> hhess;       // D_j D_k f, node * n * n, symmetrized
  std::vector<double> vhess;       // D_b D_c f, node * m * m, symmetrized
  ScalarField hlap, vlap;          // block Laplacians
  ScalarField hgrad_sq, vgrad_sq;  // |hDf|^2, |vDf|^2
};

PotentialDerivs potential_derivs(const ScalarField& f, const DMetric& g,
                                 const NConnectionField& N, const DConnectionCoeffs& gamma,
                                 FractionalOrder order);

struct FunctionalRecord {
  double F = 0.0;
  double W = 0.0;
  double mu_mass = 0.0;
};

struct ThermoRecord {
  double energy = 0.0;
  double entropy = 0.0;
  double fluctuation = 0.0;
  double log_partition = 0.0;
};

/// Mass of the measure mu = (4 pi tau)^{-(n+m)/2} e^{-f} dV.
double mu_mass(const DMetric& g, const ScalarField& f, double tau, FractionalOrder order);

/// Shift f by log(mu-mass) so the mass becomes 1.
ScalarField normalize_potential(const DMetric& g, const ScalarField& f, double tau,
                                FractionalOrder order);

/// F(g, N, f) = int (R + S + |Df|^2) e^{-f} dV.
double functional_F(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                    FractionalOrder order);

/// W(g, N, f, tau) = int [tau (R + S + |hDf| + |vDf|)^2 + f - (n+m)/2] mu dV
/// as printed; with norm_squared the factor becomes
/// tau (R + S + |hDf|^2 + |vDf|^2) without the outer square, matching the
/// classical entropy functional.
double functional_W(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                    double tau, FractionalOrder order, bool norm_squared = false);

/// First variation of F under metric variations (v_h, v_v) with lower
/// indices and potential variations (fh + fv), evaluated so that it equals
/// the derivative of functional_F along the variation direction.
double first_variation_F(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                         const std::vector<double>& v_h, const std::vector<double>& v_v,
                         const ScalarField& fh, const ScalarField& fv, FractionalOrder order);

/// 2 int [ |Ric_hh + Hess_h f|^2 + |Ric_vv + Hess_v f|^2 ] e^{-f} dV.
double dF_dchi_integral(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                        FractionalOrder order);

/// 2 int tau [ |Ric_hh + Hess_h f - g_h/2tau|^2 + v-analog ] mu dV.
double dW_dchi_integral(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                        double tau, FractionalOrder order);

/// Energy, entropy, fluctuation and log-partition integrals; expects a
/// normalized potential (mu-mass 1) for the statistical identities.
ThermoRecord thermodynamics(const DMetric& g, const NConnectionField& N, const ScalarField& f,
                            double tau, FractionalOrder order);

}  // namespace fracflow
