#pragma once

#include <functional>
#include <string>

#include "fracflow/connection.hpp"
#include "fracflow/geometry.hpp"
#include "fracflow/perelman.hpp"

namespace fracflow {

enum class ConnectionMode { canonical, levi_civita };
enum class LambdaMode { none, paper_fixed, dimension };

struct FlowConfig {
  FractionalOrder alpha{1.0};
  double step = 1e-3;
  int steps = 100;
  ConnectionMode mode = ConnectionMode::canonical;
  LambdaMode normalization = LambdaMode::none;
  bool coupled_potential = false;
  bool w_mode = false;          // evolve tau (rate -1) and add (n+m)/2tau to the potential RHS
  bool w_norm_squared = false;  // forwarded to functional_W
};

struct FlowState {
  GridChart chart;
  DMetric g;
  NConnectionField N;
  ScalarField f;
  double tau = 1.0;
  double chi = 0.0;

  FlowState() = default;
  explicit FlowState(const GridChart& c)
      : chart(c), g(DMetric::flat(c)), N(c), f(c) {}
};

/// Right sides of the metric evolution together with flow diagnostics.
struct RhsResult {
  DMetric dg;                       // symmetrized right sides for both blocks
  ScalarField df;                   // potential right side (empty if uncoupled)
  double dtau = 0.0;                // -1 in W-mode, else 0
  double lambda = 0.0;              // normalization factor used
  double constraint_residual = 0.0; // max |mixed Ricci blocks|
};

/// Thrown when the metric degenerates during stepping; chi is the
/// parameter value at which the failure occurred.
struct FlowSingularity : std::runtime_error {
  double chi;
  explicit FlowSingularity(double c)
      : std::runtime_error("flow singularity at chi=" + std::to_string(c)), chi(c) {}
};

struct StepDiagnostics {
  int step = 0;
  double chi = 0.0;
  double F = 0.0;
  double W = 0.0;
  double mean_R = 0.0;
  double mean_S = 0.0;
  double lambda = 0.0;
  double constraint_residual = 0.0;
  double mu_mass = 0.0;
  double g_min_eig = 0.0;
  double g_max_eig = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double sigma = 0.0;
};

struct FlowHistory {
  FlowConfig config;
  std::vector<FlowState> states;            // one per recorded chi, uniform step
  std::vector<std::vector<double>> rhs;     // flattened RHS of the evolving fields
  std::vector<StepDiagnostics> diagnostics;
  bool singular = false;
  double chi_singular = 0.0;
  std::string message;
};

/// Normalizing factor r = (integral of R+S dV) / (integral of dV), mapped
/// to lambda by the configured mode.
double normalization_lambda(const FlowState& state, LambdaMode mode, FractionalOrder order);

/// Right side of the canonical N-adapted evolution equations; the mixed
/// canonical Ricci blocks are reported as the constraint residual.
RhsResult hamilton_rhs_canonical(const FlowState& state, FractionalOrder order, double lambda,
                                 bool coupled, bool w_mode);

/// Right side of the Levi-Civita-mode equations, with the Ricci tensor of
/// the distortion-reconstructed connection in place of the canonical one.
RhsResult hamilton_rhs_lc(const FlowState& state, FractionalOrder order, double lambda,
                          bool coupled, bool w_mode);

/// Right side of the coupled potential equation
/// -Laplacian(f) + |Df|^2 - R - S (+ (n+m)/2tau in W-mode).
ScalarField coupled_potential_rhs(const FlowState& state, FractionalOrder order, bool w_mode);

/// One Adams-Bashforth-Moulton step of the Caputo initial-value problem
/// D^alpha u = F(u, chi): given the RHS values at nodes 0..k and the value
/// at node 0, returns u at node k+1. The evaluator is called once at the
/// predicted point. At alpha = 1 a single step reproduces Heun's method.
std::vector<double> abm_step(
    const std::vector<double>& u0, const std::vector<std::vector<double>>& rhs_history,
    double h, double alpha, double chi_next,
    const std::function<std::vector<double>(const std::vector<double>&, double)>& rhs_eval);

/// One predictor-corrector step of the fractional initial-value problem
/// over the full history; appends the new state and its RHS.
void step_caputo_ivp(FlowHistory& history,
                     const std::function<std::vector<double>(const FlowState&)>& rhs_eval,
                     const FlowConfig& config);

/// Run the configured number of steps from the initial state, recording
/// per-step diagnostics; on a singularity the partial history is returned
/// with the singular flag set.
FlowHistory evolve(const FlowConfig& config, const FlowState& initial);

enum class BreatherType { steady, shrinking, expanding, none };

struct BreatherResult {
  BreatherType type = BreatherType::none;
  double beta = 1.0;
  double residual = 0.0;
};

/// Restricted breather detector: scalings plus single-axis cyclic
/// translations; classifies when the relative residual is at most 1e-4.
BreatherResult breather_classify(const FlowHistory& history, double chi1, double chi2);

const char* breather_name(BreatherType t);

}  // namespace fracflow
