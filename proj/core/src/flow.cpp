#include "fracflow/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracflow/linalg.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {

namespace {

std::size_t packed_size(const FlowState& s, const FlowConfig& c) {
  std::size_t t = s.g.h.size() + s.g.v.size();
  if (c.coupled_potential) t += s.f.values.size();
  if (c.w_mode) t += 1;
  return t;
}

std::vector<double> pack_state(const FlowState& s, const FlowConfig& c) {
  std::vector<double> u;
  u.reserve(packed_size(s, c));
  u.insert(u.end(), s.g.h.begin(), s.g.h.end());
  u.insert(u.end(), s.g.v.begin(), s.g.v.end());
  if (c.coupled_potential) u.insert(u.end(), s.f.values.begin(), s.f.values.end());
  if (c.w_mode) u.push_back(s.tau);
  return u;
}

FlowState unpack_state(const std::vector<double>& u, const FlowState& proto, const FlowConfig& c,
                       double chi) {
  FlowState s = proto;
  s.chi = chi;
  std::size_t off = 0;
  std::copy(u.begin(), u.begin() + s.g.h.size(), s.g.h.begin());
  off += s.g.h.size();
  std::copy(u.begin() + off, u.begin() + off + s.g.v.size(), s.g.v.begin());
  off += s.g.v.size();
  if (c.coupled_potential) {
    std::copy(u.begin() + off, u.begin() + off + s.f.values.size(), s.f.values.begin());
    off += s.f.values.size();
  }
  if (c.w_mode) s.tau = u[off];
  return s;
}

std::vector<double> pack_rhs(const RhsResult& r, const FlowState& s, const FlowConfig& c) {
  std::vector<double> u;
  u.reserve(packed_size(s, c));
  u.insert(u.end(), r.dg.h.begin(), r.dg.h.end());
  u.insert(u.end(), r.dg.v.begin(), r.dg.v.end());
  if (c.coupled_potential) u.insert(u.end(), r.df.values.begin(), r.df.values.end());
  if (c.w_mode) u.push_back(r.dtau);
  return u;
}

void validate_state(const FlowState& s, double chi) {
  for (double x : s.g.h)
    if (!std::isfinite(x)) throw FlowSingularity(chi);
  for (double x : s.g.v)
    if (!std::isfinite(x)) throw FlowSingularity(chi);
  for (double x : s.f.values)
    if (!std::isfinite(x)) throw FlowSingularity(chi);
  if (!(s.tau > 0.0)) throw FlowSingularity(chi);
  const int n = s.chart.n, m = s.chart.m;
  for (std::size_t p = 0; p < s.chart.node_count(); ++p) {
    double lo, hi;
    sym_eig_range(&s.g.h[p * n * n], n, lo, hi);
    if (!(lo > 0.0)) throw FlowSingularity(chi);
    sym_eig_range(&s.g.v[p * m * m], m, lo, hi);
    if (!(lo > 0.0)) throw FlowSingularity(chi);
  }
  try {
    invert_dmetric(s.g);
  } catch (const std::exception&) {
    throw FlowSingularity(chi);
  }
}

RhsResult assemble_metric_rhs(const FlowState& state, const RicciBlocks& ric,
                              FractionalOrder order, double lambda, bool coupled, bool w_mode) {
  const GridChart& chart = state.chart;
  const int n = chart.n, m = chart.m;
  const DMetric& g = state.g;
  const NConnectionField& N = state.N;

  RhsResult out;
  out.dg = DMetric(chart);
  out.lambda = lambda;

  double cres = 0.0;
  for (double x : ric.hv) cres = std::max(cres, std::abs(x));
  for (double x : ric.vh) cres = std::max(cres, std::abs(x));
  out.constraint_residual = cres;

  const CoordinateTensor rbar = push_ricci_to_coordinate(ric, N);
  parallel_for(chart.node_count(), [&](std::size_t p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = -rbar.at(p, i, j) + lambda * g.hat(p, i, j);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            s += N.at(p, i, a) * N.at(p, j, b) *
                 (ric.vvat(p, a, b) - lambda * g.vat(p, a, b));
        out.dg.hat(p, i, j) = 2.0 * s;
      }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        out.dg.vat(p, a, b) = -2.0 * (ric.vvat(p, a, b) - lambda * g.vat(p, a, b));
    // enforce exact symmetry of both blocks
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double s = 0.5 * (out.dg.hat(p, i, j) + out.dg.hat(p, j, i));
        out.dg.hat(p, i, j) = out.dg.hat(p, j, i) = s;
      }
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const double s = 0.5 * (out.dg.vat(p, a, b) + out.dg.vat(p, b, a));
        out.dg.vat(p, a, b) = out.dg.vat(p, b, a) = s;
      }
  });

  if (coupled) out.df = coupled_potential_rhs(state, order, w_mode);
  out.dtau = w_mode ? -1.0 : 0.0;
  return out;
}

}  // namespace

double normalization_lambda(const FlowState& state, LambdaMode mode, FractionalOrder order) {
  if (mode == LambdaMode::none) return 0.0;
  const DConnectionCoeffs gamma = canonical_dconnection(state.g, state.N, order);
  const CurvatureBlocks curv = dcurvature(gamma, state.N, state.g, order);
  const ScalarCurvature sc = scalar_curvature(state.g, ricci_contract(curv));
  const VolumeElement vol = volume_element(state.g, order);
  std::vector<double> rs(sc.hR.values.size());
  for (std::size_t p = 0; p < rs.size(); ++p) rs[p] = sc.hR.values[p] + sc.vS.values[p];
  const double volume = volume_integrate(vol, std::vector<double>(rs.size(), 1.0));
  if (!(volume > 0.0)) throw std::runtime_error("zero volume");
  const double r = volume_integrate(vol, rs) / volume;
  if (mode == LambdaMode::paper_fixed) return r / 5.0;
  return r / state.chart.dim();
}

RhsResult hamilton_rhs_canonical(const FlowState& state, FractionalOrder order, double lambda,
                                 bool coupled, bool w_mode) {
  const DConnectionCoeffs gamma = canonical_dconnection(state.g, state.N, order);
  const CurvatureBlocks curv = dcurvature(gamma, state.N, state.g, order);
  const RicciBlocks ric = ricci_contract(curv);
  return assemble_metric_rhs(state, ric, order, lambda, coupled, w_mode);
}

RhsResult hamilton_rhs_lc(const FlowState& state, FractionalOrder order, double lambda,
                          bool coupled, bool w_mode) {
  const DistortionBlocks dist = levi_civita_distortion(state.g, state.N, order);
  const RicciBlocks ric = full_connection_ricci(dist.levi_civita, state.N, order);
  return assemble_metric_rhs(state, ric, order, lambda, coupled, w_mode);
}

ScalarField coupled_potential_rhs(const FlowState& state, FractionalOrder order, bool w_mode) {
  const DConnectionCoeffs gamma = canonical_dconnection(state.g, state.N, order);
  const CurvatureBlocks curv = dcurvature(gamma, state.N, state.g, order);
  const ScalarCurvature sc = scalar_curvature(state.g, ricci_contract(curv));
  const PotentialDerivs pd = potential_derivs(state.f, state.g, state.N, gamma, order);
  const double shift = w_mode ? 0.5 * state.chart.dim() / state.tau : 0.0;

  ScalarField out(state.chart);
  for (std::size_t p = 0; p < out.values.size(); ++p)
    out.values[p] = -(pd.hlap.values[p] + pd.vlap.values[p]) + pd.hgrad_sq.values[p] +
                    pd.vgrad_sq.values[p] - sc.hR.values[p] - sc.vS.values[p] + shift;
  return out;
}

std::vector<double> abm_step(
    const std::vector<double>& u0, const std::vector<std::vector<double>>& rhs_history,
    double h, double alpha, double chi_next,
    const std::function<std::vector<double>(const std::vector<double>&, double)>& rhs_eval) {
  if (rhs_history.empty()) throw std::invalid_argument("index out of range");
  const int k = static_cast<int>(rhs_history.size()) - 1;
  const std::size_t dim = u0.size();

  // Predictor: fractional rectangle rule over the stored history.
  std::vector<double> up = u0;
  const double pfac = std::pow(h, alpha) / std::tgamma(alpha + 1.0);
  for (int j = 0; j <= k; ++j) {
    const double b = std::pow(double(k + 1 - j), alpha) - std::pow(double(k - j), alpha);
    const std::vector<double>& Fj = rhs_history[j];
    for (std::size_t q = 0; q < dim; ++q) up[q] += pfac * b * Fj[q];
  }
  const std::vector<double> fp = rhs_eval(up, chi_next);

  // Corrector: fractional trapezoid weights.
  std::vector<double> un = u0;
  const double cfac = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
  for (int j = 0; j <= k; ++j) {
    double a;
    if (j == 0)
      a = std::pow(double(k), alpha + 1.0) - (k - alpha) * std::pow(double(k + 1), alpha);
    else
      a = std::pow(double(k - j + 2), alpha + 1.0) + std::pow(double(k - j), alpha + 1.0) -
          2.0 * std::pow(double(k - j + 1), alpha + 1.0);
    const std::vector<double>& Fj = rhs_history[j];
    for (std::size_t q = 0; q < dim; ++q) un[q] += cfac * a * Fj[q];
  }
  for (std::size_t q = 0; q < dim; ++q) un[q] += cfac * fp[q];
  return un;
}

void step_caputo_ivp(FlowHistory& history,
                     const std::function<std::vector<double>(const FlowState&)>& rhs_eval,
                     const FlowConfig& config) {
  if (history.states.empty()) throw std::invalid_argument("index out of range");
  const double h = config.step;
  const int k = static_cast<int>(history.states.size()) - 1;
  const double chi_next = history.states.front().chi + (k + 1) * h;
  const FlowState& proto = history.states.back();

  const std::vector<double> u0 = pack_state(history.states.front(), config);
  std::vector<double> un;
  try {
    un = abm_step(u0, history.rhs, h, config.alpha.alpha, chi_next,
                  [&](const std::vector<double>& u, double chi) {
                    return rhs_eval(unpack_state(u, proto, config, chi));
                  });
  } catch (const FlowSingularity&) {
    throw;
  } catch (const std::exception&) {
    throw FlowSingularity(chi_next);
  }

  FlowState next = unpack_state(un, proto, config, chi_next);
  validate_state(next, chi_next);

  std::vector<double> fn;
  try {
    fn = rhs_eval(next);
  } catch (const FlowSingularity&) {
    throw;
  } catch (const std::exception&) {
    throw FlowSingularity(chi_next);
  }
  history.states.push_back(std::move(next));
  history.rhs.push_back(std::move(fn));
}

namespace {

StepDiagnostics make_diagnostics(int step, const FlowState& s, const FlowConfig& config,
                                 double lambda, double constraint_residual) {
  const FractionalOrder order = config.alpha;
  StepDiagnostics d;
  d.step = step;
  d.chi = s.chi;
  d.lambda = lambda;
  d.constraint_residual = constraint_residual;
  d.F = functional_F(s.g, s.N, s.f, order);
  d.W = functional_W(s.g, s.N, s.f, s.tau, order, config.w_norm_squared);
  d.mu_mass = mu_mass(s.g, s.f, s.tau, order);

  const DConnectionCoeffs gamma = canonical_dconnection(s.g, s.N, order);
  const CurvatureBlocks curv = dcurvature(gamma, s.N, s.g, order);
  const ScalarCurvature sc = scalar_curvature(s.g, ricci_contract(curv));
  const VolumeElement vol = volume_element(s.g, order);
  const double volume =
      volume_integrate(vol, std::vector<double>(sc.hR.values.size(), 1.0));
  d.mean_R = volume_integrate(vol, sc.hR.values) / volume;
  d.mean_S = volume_integrate(vol, sc.vS.values) / volume;

  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  const int n = s.chart.n, m = s.chart.m;
  for (std::size_t p = 0; p < s.chart.node_count(); ++p) {
    double lo, hi;
    sym_eig_range(&s.g.h[p * n * n], n, lo, hi);
    mn = std::min(mn, lo);
    mx = std::max(mx, hi);
    sym_eig_range(&s.g.v[p * m * m], m, lo, hi);
    mn = std::min(mn, lo);
    mx = std::max(mx, hi);
  }
  d.g_min_eig = mn;
  d.g_max_eig = mx;

  const ThermoRecord th = thermodynamics(s.g, s.N, s.f, s.tau, order);
  d.energy = th.energy;
  d.entropy = th.entropy;
  d.sigma = th.fluctuation;
  return d;
}

}  // namespace

FlowHistory evolve(const FlowConfig& config, const FlowState& initial) {
  FlowHistory history;
  history.config = config;

  double last_lambda = 0.0;
  double last_constraint = 0.0;
  auto rhs_eval = [&](const FlowState& s) {
    const double lam = normalization_lambda(s, config.normalization, config.alpha);
    const RhsResult r =
        config.mode == ConnectionMode::canonical
            ? hamilton_rhs_canonical(s, config.alpha, lam, config.coupled_potential,
                                     config.w_mode)
            : hamilton_rhs_lc(s, config.alpha, lam, config.coupled_potential, config.w_mode);
    last_lambda = r.lambda;
    last_constraint = r.constraint_residual;
    return pack_rhs(r, s, config);
  };

  FlowState s0 = initial;
  s0.chi = initial.chi;
  history.states.push_back(s0);
  try {
    history.rhs.push_back(rhs_eval(history.states.back()));
    history.diagnostics.push_back(
        make_diagnostics(0, history.states.back(), config, last_lambda, last_constraint));
    for (int step = 1; step <= config.steps; ++step) {
      step_caputo_ivp(history, rhs_eval, config);
      history.diagnostics.push_back(make_diagnostics(step, history.states.back(), config,
                                                     last_lambda, last_constraint));
    }
  } catch (const FlowSingularity& e) {
    history.singular = true;
    history.chi_singular = e.chi;
    history.message = e.what();
  }
  return history;
}

namespace {

std::vector<double> metric_flat_components(const DMetric& g) {
  std::vector<double> v;
  v.reserve(g.h.size() + g.v.size());
  v.insert(v.end(), g.h.begin(), g.h.end());
  v.insert(v.end(), g.v.begin(), g.v.end());
  return v;
}

/// Cyclic shift of node-major component data by `shift` nodes along `axis`.
std::vector<double> shifted_components(const GridChart& chart, const std::vector<double>& comps,
                                       std::size_t K, int axis, int shift) {
  std::vector<double> out(comps.size());
  const int count = chart.axes[axis].count;
  for (std::size_t p = 0; p < chart.node_count(); ++p) {
    auto idx = chart.unflatten(p);
    idx[axis] = (idx[axis] + shift) % count;
    const std::size_t q = chart.flatten(idx);
    for (std::size_t c = 0; c < K; ++c) out[p * K + c] = comps[q * K + c];
  }
  return out;
}

}  // namespace

BreatherResult breather_classify(const FlowHistory& history, double chi1, double chi2) {
  if (history.states.empty()) throw std::invalid_argument("index out of range");
  const double h = history.config.step;
  const double chi0 = history.states.front().chi;
  auto locate = [&](double chi) -> std::size_t {
    const double pos = (chi - chi0) / h;
    const long idx = std::lround(pos);
    if (idx < 0 || idx >= static_cast<long>(history.states.size()) ||
        std::abs(pos - idx) > 1e-6)
      throw std::invalid_argument("index out of range");
    return static_cast<std::size_t>(idx);
  };
  const std::size_t i1 = locate(chi1), i2 = locate(chi2);
  const GridChart& chart = history.states[i1].chart;

  const std::vector<double> A = metric_flat_components(history.states[i1].g);
  const std::vector<double> B0 = metric_flat_components(history.states[i2].g);
  const std::size_t Kh = static_cast<std::size_t>(chart.n) * chart.n;
  const std::size_t hsize = history.states[i1].g.h.size();

  double aa = 0.0;
  for (double x : A) aa += x * x;
  const double anorm = std::sqrt(aa);

  BreatherResult best;
  best.residual = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& B) {
    double ab = 0.0;
    for (std::size_t q = 0; q < A.size(); ++q) ab += A[q] * B[q];
    const double beta = ab / aa;
    double rr = 0.0;
    for (std::size_t q = 0; q < A.size(); ++q) {
      const double dlt = beta * A[q] - B[q];
      rr += dlt * dlt;
    }
    const double res = std::sqrt(rr) / anorm;
    if (res < best.residual) {
      best.residual = res;
      best.beta = beta;
    }
  };

  consider(B0);
  const std::size_t Kv = static_cast<std::size_t>(chart.m) * chart.m;
  for (int axis = 0; axis < chart.dim(); ++axis)
    for (int shift = 1; shift < chart.axes[axis].count; ++shift) {
      std::vector<double> hshift(B0.begin(), B0.begin() + hsize);
      std::vector<double> vshift(B0.begin() + hsize, B0.end());
      hshift = shifted_components(chart, hshift, Kh, axis, shift);
      vshift = shifted_components(chart, vshift, Kv, axis, shift);
      std::vector<double> B = hshift;
      B.insert(B.end(), vshift.begin(), vshift.end());
      consider(B);
    }

  if (best.residual <= 1e-4) {
    if (std::abs(best.beta - 1.0) <= 1e-6)
      best.type = BreatherType::steady;
    else
      best.type = best.beta < 1.0 ? BreatherType::shrinking : BreatherType::expanding;
  } else {
    best.type = BreatherType::none;
  }
  return best;
}

const char* breather_name(BreatherType t) {
  switch (t) {
    case BreatherType::steady: return "steady";
    case BreatherType::shrinking: return "shrinking";
    case BreatherType::expanding: return "expanding";
    default: return "none";
  }
}

}  // namespace fracflow
