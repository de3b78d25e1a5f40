#pragma once

#include "fracflow/grid.hpp"

namespace fracflow {

/// Fractional differential form on a chart, degree 0, 1 or 2.
///  degree 0: one coefficient per node;
///  degree 1: coefficient F_i per node on (du^i)^alpha;
///  degree 2: full antisymmetric matrix w_{gb} per node, the coefficient on
///            (du^g)^alpha wedge (du^b)^alpha.
struct FormField {
  GridChart chart;
  int degree = 0;
  std::vector<double> coefficients;  // node-major, dim^degree per node

  FormField() = default;
  FormField(const GridChart& c, int deg);

  std::size_t comps_per_node() const;
  double& at(std::size_t node, int i, int j = 0);
  double at(std::size_t node, int i, int j = 0) const;
};

FormField form_from_scalar(const ScalarField& f);

/// Fractional exterior derivative d^alpha. Degree 0 -> 1 with components
/// the axis-wise Caputo partials; degree 1 -> 2 with coefficient
/// w_{ji} = d_j F_i - d_i F_j on the wedge pair (du^j)^a ^ (du^i)^a.
FormField exterior_derivative(const FormField& w, FractionalOrder order);

}  // namespace fracflow
