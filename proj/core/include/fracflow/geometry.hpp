#pragma once

#include <utility>

#include "fracflow/fraccalc.hpp"
#include "fracflow/grid.hpp"

namespace fracflow {

/// N-connection coefficients N_i^a(u) on the chart; i is an h-index
/// (0..n-1), a a v-index (0..m-1).
struct NConnectionField {
  GridChart chart;
  std::vector<double> coeff;  // node * (n*m)

  NConnectionField() = default;
  explicit NConnectionField(const GridChart& c)
      : chart(c), coeff(c.node_count() * c.n * c.m, 0.0) {}

  double& at(std::size_t node, int i, int a) { return coeff[(node * chart.n + i) * chart.m + a]; }
  double at(std::size_t node, int i, int a) const {
    return coeff[(node * chart.n + i) * chart.m + a];
  }
};

/// d-metric: symmetric h-block g_ij and v-block g_ab per node.
struct DMetric {
  GridChart chart;
  std::vector<double> h;  // node * n * n
  std::vector<double> v;  // node * m * m

  DMetric() = default;
  explicit DMetric(const GridChart& c)
      : chart(c), h(c.node_count() * c.n * c.n, 0.0), v(c.node_count() * c.m * c.m, 0.0) {}

  double& hat(std::size_t node, int i, int j) { return h[(node * chart.n + i) * chart.n + j]; }
  double hat(std::size_t node, int i, int j) const {
    return h[(node * chart.n + i) * chart.n + j];
  }
  double& vat(std::size_t node, int a, int b) { return v[(node * chart.m + a) * chart.m + b]; }
  double vat(std::size_t node, int a, int b) const {
    return v[(node * chart.m + a) * chart.m + b];
  }

  /// Identity blocks everywhere.
  static DMetric flat(const GridChart& c);
};

/// Full symmetric (n+m) x (n+m) coordinate metric per node.
struct CoordinateMetric {
  GridChart chart;
  std::vector<double> g;  // node * dim * dim

  CoordinateMetric() = default;
  explicit CoordinateMetric(const GridChart& c)
      : chart(c), g(c.node_count() * c.dim() * c.dim(), 0.0) {}

  double& at(std::size_t node, int al, int be) {
    return g[(node * chart.dim() + al) * chart.dim() + be];
  }
  double at(std::size_t node, int al, int be) const {
    return g[(node * chart.dim() + al) * chart.dim() + be];
  }
};

/// Pointwise vielbein pair; forward * inverse = identity at every node.
struct FrameTransform {
  GridChart chart;
  std::vector<double> forward;  // node * dim * dim, row = frame, col = coordinate
  std::vector<double> inverse;

  FrameTransform() = default;
  explicit FrameTransform(const GridChart& c)
      : chart(c),
        forward(c.node_count() * c.dim() * c.dim(), 0.0),
        inverse(c.node_count() * c.dim() * c.dim(), 0.0) {}

  double& fwd(std::size_t node, int r, int c_) {
    return forward[(node * chart.dim() + r) * chart.dim() + c_];
  }
  double fwd(std::size_t node, int r, int c_) const {
    return forward[(node * chart.dim() + r) * chart.dim() + c_];
  }
  double& inv(std::size_t node, int r, int c_) {
    return inverse[(node * chart.dim() + r) * chart.dim() + c_];
  }
  double inv(std::size_t node, int r, int c_) const {
    return inverse[(node * chart.dim() + r) * chart.dim() + c_];
  }
};

/// Anholonomy coefficients of the N-adapted frame. All components other
/// than W_ib^a and Omega_ji^a vanish.
struct Anholonomy {
  GridChart chart;
  std::vector<double> w_ibv;   // W_ib^a, node * n * m * m
  std::vector<double> omega;   // Omega_ji^a, node * n * n * m

  Anholonomy() = default;
  explicit Anholonomy(const GridChart& c)
      : chart(c),
        w_ibv(c.node_count() * c.n * c.m * c.m, 0.0),
        omega(c.node_count() * c.n * c.n * c.m, 0.0) {}

  double& w(std::size_t node, int i, int b, int a) {
    return w_ibv[((node * chart.n + i) * chart.m + b) * chart.m + a];
  }
  double& om(std::size_t node, int j, int i, int a) {
    return omega[((node * chart.n + j) * chart.n + i) * chart.m + a];
  }
  double om(std::size_t node, int j, int i, int a) const {
    return omega[((node * chart.n + j) * chart.n + i) * chart.m + a];
  }
};

/// N-adapted frame derivative of a scalar field along frame index beta
/// (0..n+m-1): e_j f = d_j f - N_j^a d_a f for h-indices, e_b f = d_b f.
ScalarField nadapted_derivative(const ScalarField& f, int beta, const NConnectionField& N,
                                FractionalOrder order);

Anholonomy anholonomy(const NConnectionField& N, FractionalOrder order);

FrameTransform vielbein(const NConnectionField& N);

CoordinateMetric dmetric_to_coordinate(const DMetric& g, const NConnectionField& N);

/// N-adapted frame derivative of every component of a node-major block
/// array with K components: result[beta][p * K + q] = e_beta comps(., q).
std::vector<std::vector<double>> frame_derivs_of(const std::vector<double>& comps, std::size_t K,
                                                 const GridChart& chart, const NConnectionField& N,
                                                 FractionalOrder order);

/// Pointwise inverses of both d-metric blocks.
struct DMetricInverse {
  std::vector<double> h;  // node * n * n
  std::vector<double> v;  // node * m * m
};

DMetricInverse invert_dmetric(const DMetric& g);

/// Inverse of the block parametrization; requires an invertible v-block.
std::pair<DMetric, NConnectionField> coordinate_to_dmetric(const CoordinateMetric& gc);

}  // namespace fracflow
