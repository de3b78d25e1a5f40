#pragma once

#include "fracflow/grid.hpp"

namespace fracflow {

// One-dimensional operators. All are left-sided with terminal at grid.lower;
// the value at the terminal node is 0 (empty integral). At alpha = 1 they
// dispatch to second-order classical finite differences / trapezoid sums.

/// Left Caputo derivative, L1 product-integration scheme. Exact on
/// constants and linears; annihilates constants at every node.
SampledCurve caputo_left(const SampledCurve& f, FractionalOrder order);

/// Left Riemann-Liouville derivative. Cross-check operator only: equals the
/// Caputo derivative plus f(lower) * (x - lower)^(-alpha) / Gamma(1-alpha).
SampledCurve rl_derivative_left(const SampledCurve& f, FractionalOrder order);

/// Left Riemann-Liouville integral, product-trapezoid weights.
SampledCurve rl_integral_left(const SampledCurve& f, FractionalOrder order);

/// Max-norm of  I^a(D^a f) - (f - f(lower)) , the discrete residual of the
/// fundamental theorem of fractional calculus.
double fundamental_theorem_residual(const SampledCurve& f, FractionalOrder order);

// Low-level line kernels used by the axis-wise chart operators. `stride`
// walks the line inside a larger array.
void caputo_line(const double* f, double* out, int count, std::size_t stride,
                 double spacing, double alpha);
void classical_derivative_line(const double* f, double* out, int count,
                               std::size_t stride, double spacing);

/// Axis-wise left Caputo partial derivative of a chart field along `axis`,
/// all other coordinates frozen.
ScalarField axis_caputo(const ScalarField& f, int axis, FractionalOrder order);

/// Fractional gradient on a flat chart: component i is axis_caputo along i.
/// Returned as dim() scalar fields (covector components).
std::vector<ScalarField> frac_grad(const ScalarField& f, FractionalOrder order);

/// Fractional divergence of a vector field (one component field per axis)
/// against a diagonal +/-1 flat metric eta.
ScalarField frac_div(const std::vector<ScalarField>& components,
                     const std::vector<double>& eta, FractionalOrder order);

}  // namespace fracflow
