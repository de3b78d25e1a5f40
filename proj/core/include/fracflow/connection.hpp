#pragma once

#include "fracflow/geometry.hpp"

namespace fracflow {

/// Coefficient blocks of a d-connection: L^i_jk, L^a_bk, C^i_jc, C^a_bc.
struct DConnectionCoeffs {
  GridChart chart;
  std::vector<double> L_h;  // L^i_jk, node * n*n*n, layout (i,j,k)
  std::vector<double> L_v;  // L^a_bk, node * m*m*n, layout (a,b,k)
  std::vector<double> C_h;  // C^i_jc, node * n*n*m, layout (i,j,c)
  std::vector<double> C_v;  // C^a_bc, node * m*m*m, layout (a,b,c)

  DConnectionCoeffs() = default;
  explicit DConnectionCoeffs(const GridChart& c);

  double& Lh(std::size_t p, int i, int j, int k) {
    return L_h[((p * chart.n + i) * chart.n + j) * chart.n + k];
  }
  double Lh(std::size_t p, int i, int j, int k) const {
    return L_h[((p * chart.n + i) * chart.n + j) * chart.n + k];
  }
  double& Lv(std::size_t p, int a, int b, int k) {
    return L_v[((p * chart.m + a) * chart.m + b) * chart.n + k];
  }
  double Lv(std::size_t p, int a, int b, int k) const {
    return L_v[((p * chart.m + a) * chart.m + b) * chart.n + k];
  }
  double& Ch(std::size_t p, int i, int j, int c) {
    return C_h[((p * chart.n + i) * chart.n + j) * chart.m + c];
  }
  double Ch(std::size_t p, int i, int j, int c) const {
    return C_h[((p * chart.n + i) * chart.n + j) * chart.m + c];
  }
  double& Cv(std::size_t p, int a, int b, int c) {
    return C_v[((p * chart.m + a) * chart.m + b) * chart.m + c];
  }
  double Cv(std::size_t p, int a, int b, int c) const {
    return C_v[((p * chart.m + a) * chart.m + b) * chart.m + c];
  }
};

/// All eight coefficient blocks of a linear connection in the N-adapted
/// frame (a d-connection extended by the mixing blocks, as needed for the
/// Levi-Civita connection).
struct FullConnection {
  GridChart chart;
  std::vector<double> L_hhh;  // L^i_jk  (i,j,k)
  std::vector<double> L_vhh;  // L^a_jk  (a,j,k)
  std::vector<double> L_hvh;  // L^i_bk  (i,b,k)
  std::vector<double> L_vvh;  // L^a_bk  (a,b,k)
  std::vector<double> C_hhv;  // C^i_jb  (i,j,b)
  std::vector<double> C_vhv;  // C^a_jb  (a,j,b)
  std::vector<double> C_hvv;  // C^i_bc  (i,b,c)
  std::vector<double> C_vvv;  // C^a_bc  (a,b,c)

  FullConnection() = default;
  explicit FullConnection(const GridChart& c);

  /// Coefficient Gamma^gamma_{alpha beta} with frame indices in 0..dim-1
  /// (h first), defined by D_{e_beta} e_alpha = Gamma^gamma_{alpha beta} e_gamma.
  double coeff(std::size_t p, int gamma, int alpha, int beta) const;
  double& coeff_ref(std::size_t p, int gamma, int alpha, int beta);
};

/// d-torsion blocks of a d-connection.
struct TorsionBlocks {
  GridChart chart;
  std::vector<double> T_hhh;  // T^i_jk  (i,j,k)
  std::vector<double> T_hhv;  // T^i_ja  (i,j,a)
  std::vector<double> T_vhh;  // T^a_ji  (a,j,i)
  std::vector<double> T_vvh;  // T^a_bi  (a,b,i)
  std::vector<double> T_vvv;  // T^a_bc  (a,b,c)

  TorsionBlocks() = default;
  explicit TorsionBlocks(const GridChart& c);
};

/// The six d-curvature blocks.
struct CurvatureBlocks {
  GridChart chart;
  std::vector<double> R_hhhh;  // R^i_hjk  (i,h,j,k)
  std::vector<double> R_vvhh;  // R^a_bjk  (a,b,j,k)
  std::vector<double> R_hhhv;  // R^i_jka  (i,j,k,a)
  std::vector<double> R_vvhv;  // R^c_bka  (c,b,k,a)
  std::vector<double> R_hhvv;  // R^i_jbc  (i,j,b,c)
  std::vector<double> R_vvvv;  // R^a_bcd  (a,b,c,d)

  CurvatureBlocks() = default;
  explicit CurvatureBlocks(const GridChart& c);
};

/// Ricci d-tensor blocks; not symmetric in general, and the two mixed
/// blocks are independent.
struct RicciBlocks {
  GridChart chart;
  std::vector<double> hh;  // R_ij, node * n*n
  std::vector<double> hv;  // R_ia, node * n*m
  std::vector<double> vh;  // R_ai, node * m*n
  std::vector<double> vv;  // R_ab, node * m*m

  RicciBlocks() = default;
  explicit RicciBlocks(const GridChart& c);

  double hhat(std::size_t p, int i, int j) const { return hh[(p * chart.n + i) * chart.n + j]; }
  double vvat(std::size_t p, int a, int b) const { return vv[(p * chart.m + a) * chart.m + b]; }
  double hvat(std::size_t p, int i, int a) const { return hv[(p * chart.n + i) * chart.m + a]; }
  double vhat(std::size_t p, int a, int i) const { return vh[(p * chart.m + a) * chart.n + i]; }
};

/// h- and v-scalar curvatures; the total is their sum.
struct ScalarCurvature {
  ScalarField hR;  // R = g^ij R_ij
  ScalarField vS;  // S = g^ab R_ab
};

/// Einstein d-tensor blocks G = Ric - (1/2) g (R + S); the mixed blocks
/// carry no metric weight.
struct EinsteinBlocks {
  GridChart chart;
  std::vector<double> hh, hv, vh, vv;

  EinsteinBlocks() = default;
  explicit EinsteinBlocks(const GridChart& c);
};

/// Distortion Z = (Levi-Civita) - (canonical d-connection), both in the
/// N-adapted frame, together with the reconstructed Levi-Civita blocks.
/// Z^i_jk and Z^a_bc vanish identically.
struct DistortionBlocks {
  GridChart chart;
  FullConnection z;            // the distortion itself, block for block
  FullConnection levi_civita;  // canonical + z

  DistortionBlocks() = default;
  explicit DistortionBlocks(const GridChart& c) : chart(c), z(c), levi_civita(c) {}
};

namespace testing {
/// Test hook: flips the sign of the e_r g_jk term in the canonical L^i_jk
/// formula so mutation checks can watch the metricity criterion fail.
extern bool flip_candcon_sign;
}  // namespace testing

DConnectionCoeffs canonical_dconnection(const DMetric& g, const NConnectionField& N,
                                        FractionalOrder order);

TorsionBlocks dtorsion(const DConnectionCoeffs& gamma, const NConnectionField& N,
                       FractionalOrder order);

CurvatureBlocks dcurvature(const DConnectionCoeffs& gamma, const NConnectionField& N,
                           const DMetric& g, FractionalOrder order);

RicciBlocks ricci_contract(const CurvatureBlocks& R);

ScalarCurvature scalar_curvature(const DMetric& g, const RicciBlocks& ric);

EinsteinBlocks einstein_tensor(const DMetric& g, const RicciBlocks& ric,
                               const ScalarCurvature& sc);

DistortionBlocks levi_civita_distortion(const DMetric& g, const NConnectionField& N,
                                        FractionalOrder order);

/// Ricci tensor of a full eight-block connection in the N-adapted frame,
/// contracted from the general frame curvature with the structure
/// functions of the frame (used for the Levi-Civita connection).
RicciBlocks full_connection_ricci(const FullConnection& gamma, const NConnectionField& N,
                                  FractionalOrder order);

/// Max-norm of the four blockwise covariant derivatives of the d-metric.
double metricity_residual(const DConnectionCoeffs& gamma, const DMetric& g,
                          const NConnectionField& N, FractionalOrder order);

/// Coefficients of a full connection with respect to the coordinate frame
/// du^alpha, layout node * (gamma, alpha, beta), beta the direction.
std::vector<double> push_connection_to_coordinate(const FullConnection& gamma,
                                                  const NConnectionField& N,
                                                  FractionalOrder order);

/// Covariant 2-tensor with d-blocks (hh, hv, vh, vv) pushed to coordinate
/// components through the N-elongated coframe.
struct CoordinateTensor {
  GridChart chart;
  std::vector<double> comp;  // node * dim * dim
  double at(std::size_t p, int al, int be) const {
    return comp[(p * chart.dim() + al) * chart.dim() + be];
  }
};

CoordinateTensor push_ricci_to_coordinate(const RicciBlocks& ric, const NConnectionField& N);

}  // namespace fracflow
