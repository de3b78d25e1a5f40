#include "fracflow/forms.hpp"

#include <cmath>

#include "fracflow/fraccalc.hpp"

namespace fracflow {

FormField::FormField(const GridChart& c, int deg) : chart(c), degree(deg) {
  if (deg < 0 || deg > 2) throw std::invalid_argument("form degree must be 0, 1 or 2");
  coefficients.assign(chart.node_count() * comps_per_node(), 0.0);
}

std::size_t FormField::comps_per_node() const {
  const std::size_t d = chart.dim();
  if (degree == 0) return 1;
  if (degree == 1) return d;
  return d * d;
}

double& FormField::at(std::size_t node, int i, int j) {
  const std::size_t d = chart.dim();
  if (degree == 0) return coefficients[node];
  if (degree == 1) return coefficients[node * d + i];
  return coefficients[node * d * d + i * d + j];
}

double FormField::at(std::size_t node, int i, int j) const {
  return const_cast<FormField*>(this)->at(node, i, j);
}

FormField form_from_scalar(const ScalarField& f) {
  FormField w(f.chart, 0);
  w.coefficients = f.values;
  return w;
}

FormField exterior_derivative(const FormField& w, FractionalOrder order) {
  if (w.degree == 2) throw std::invalid_argument("top degree at desk scale");
  const GridChart& chart = w.chart;
  const int d = chart.dim();
  if (w.degree == 0) {
    ScalarField f(chart);
    f.values = w.coefficients;
    FormField out(chart, 1);
    for (int i = 0; i < d; ++i) {
      ScalarField di = axis_caputo(f, i, order);
      for (std::size_t p = 0; p < di.values.size(); ++p) out.at(p, i) = di.values[p];
    }
    return out;
  }
  // degree 1 -> 2
  FormField out(chart, 2);
  std::vector<std::vector<ScalarField>> dF(d);  // dF[i][j] = d_j F_i
  for (int i = 0; i < d; ++i) {
    ScalarField Fi(chart);
    for (std::size_t p = 0; p < Fi.values.size(); ++p) Fi.values[p] = w.at(p, i);
    dF[i].reserve(d);
    for (int j = 0; j < d; ++j) dF[i].push_back(axis_caputo(Fi, j, order));
  }
  for (std::size_t p = 0; p < chart.node_count(); ++p)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i)
        out.at(p, j, i) = dF[i][j].values[p] - dF[j][i].values[p];
  return out;
}

}  // namespace fracflow
