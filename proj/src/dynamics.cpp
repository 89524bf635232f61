#include "projlab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace projlab {

Vector map_step(const Vector& x, const Subspace& a, const Subspace& b) {
  return project(a, project(b, x));
}

Vector msp_step(const Vector& x, const Subspace& a, const Subspace& b) {
  return 0.5 * (project(a, x) + project(b, x));
}

IterationTrace run(Method method, const Vector& x0, const Subspace& a, const Subspace& b,
                   const RunOptions& options) {
  if (x0.size() != a.ambient_dim || x0.size() != b.ambient_dim)
    throw InvalidInput("run: dimension mismatch");
  if (x0.norm() == 0.0) throw InvalidInput("run: zero starting point");
  if (options.max_iter < 1) throw InvalidInput("run: max_iter must be positive");
  if (options.floor < 0.0) throw InvalidInput("run: floor must be nonnegative");

  IterationTrace trace;
  trace.method = method;
  trace.x0 = x0;
  trace.limit = project(intersect(a, b), x0);

  // Both projectors fix the limit, so the residual y_k = x_k - limit obeys
  // the same recursion. Iterating it directly keeps the error norms accurate
  // in relative terms even when they decay far below ||limit||.
  Vector y = x0 - trace.limit;
  const double e0 = y.norm();
  trace.errors.push_back(e0);
  trace.floor_abs = options.floor * e0;

  if (e0 == 0.0) {
    // The start already sits on the limit.
    trace.stopped_reason = StopReason::ConvergedOneStep;
    return trace;
  }
  if (options.record_directions) trace.directions.push_back(y / e0);

  for (int k = 1; k <= options.max_iter; ++k) {
    y = (method == Method::Map) ? map_step(y, a, b) : msp_step(y, a, b);
    const double ek = y.norm();
    trace.errors.push_back(ek);

    const double prev = trace.errors[k - 1];
    if (prev > 0.0 && ek > 0.0) {
      trace.ratios.push_back(ek / prev);
    } else {
      trace.ratios.push_back(std::nullopt);
    }
    if (options.record_directions && ek > 0.0) trace.directions.push_back(y / ek);

    if (k == 1 && ek <= kOneStepTol * e0) {
      trace.stopped_reason = StopReason::ConvergedOneStep;
      return trace;
    }
    if (ek < trace.floor_abs) {
      trace.stopped_reason = StopReason::Floor;
      return trace;
    }
  }
  trace.stopped_reason = StopReason::Budget;
  return trace;
}

RateReport predicted_rates(const Vector& x0, const Subspace& a, const Subspace& b,
                           double eps_act, double cluster_tol) {
  if (x0.size() != a.ambient_dim) throw InvalidInput("predicted_rates: dimension mismatch");
  const double nx = x0.norm();
  if (nx == 0.0) throw InvalidInput("predicted_rates: zero starting point");

  const Subspace cap = intersect(a, b);
  const Vector limit = project(cap, x0);

  RateReport report;
  report.map_degenerate = (map_step(x0, a, b) - limit).norm() <= eps_act * nx;
  report.msp_degenerate = (msp_step(x0, a, b) - limit).norm() <= eps_act * nx;

  auto top_active = [&](const SymmetricOperator& op) -> std::optional<double> {
    const SpectralDecomposition d = eig_sym(op, cluster_tol);
    const ActiveSpectrum spec = active_spectrum(d, x0, eps_act);
    for (const auto& e : spec.entries) {  // descending by value
      if (std::abs(e.value) <= d.cluster_tol) continue;
      if (std::abs(e.value - 1.0) <= d.cluster_tol) continue;
      return e.value;
    }
    return std::nullopt;
  };

  if (!report.map_degenerate) {
    report.predicted_lambda = top_active(symmetrized_product(b, a));
    report.lambda_active_value = report.predicted_lambda;
    if (!report.predicted_lambda) report.map_degenerate = true;
  }
  if (!report.msp_degenerate) {
    report.predicted_mu = top_active(average_projector(a, b));
    report.mu_active_value = report.predicted_mu;
    if (!report.predicted_mu) report.msp_degenerate = true;
  }
  return report;
}

QRateEstimate estimate_q_rate(const IterationTrace& trace, int window) {
  if (window < 1) throw InvalidInput("estimate_q_rate: window must be positive");

  // Usable ratios: defined, and the trailing error still above the floor.
  std::vector<double> usable;
  for (std::size_t k = 0; k < trace.ratios.size(); ++k) {
    if (!trace.ratios[k].has_value()) continue;
    if (trace.errors[k + 1] < trace.floor_abs) continue;
    usable.push_back(*trace.ratios[k]);
  }
  if (static_cast<int>(usable.size()) < window)
    throw InsufficientData("estimate_q_rate: not enough usable ratios");

  QRateEstimate est;
  const auto first = usable.end() - window;
  for (auto it = first; it != usable.end(); ++it) est.rate += *it;
  est.rate /= window;
  for (auto it = first; it != usable.end(); ++it)
    est.max_deviation = std::max(est.max_deviation, std::abs(*it - est.rate));
  return est;
}

OperatorErrorNorms operator_error_norms(const Subspace& a, const Subspace& b, int k_max) {
  if (k_max < 1) throw InvalidInput("operator_error_norms: k_max must be positive");
  const Matrix pa = projector(a).matrix;
  const Matrix pb = projector(b).matrix;
  const Matrix p_cap = projector(intersect(a, b)).matrix;
  const Matrix map_op = pa * pb;
  const Matrix msp_op = 0.5 * (pa + pb);

  OperatorErrorNorms out;
  Matrix map_pow = Matrix::Identity(a.ambient_dim, a.ambient_dim);
  Matrix msp_pow = map_pow;
  for (int k = 1; k <= k_max; ++k) {
    map_pow = (map_pow * map_op).eval();
    msp_pow = (msp_pow * msp_op).eval();
    out.map_norms.push_back(Eigen::JacobiSVD<Matrix>(map_pow - p_cap).singularValues()(0));
    out.msp_norms.push_back(Eigen::JacobiSVD<Matrix>(msp_pow - p_cap).singularValues()(0));
  }
  return out;
}

DirectionLimit direction_limit(const IterationTrace& trace, const Vector& x0,
                               const Subspace& a, const Subspace& b, double eps_act,
                               double cluster_tol) {
  const SymmetricOperator op = (trace.method == Method::Map)
                                   ? symmetrized_product(b, a)
                                   : average_projector(a, b);
  const SpectralDecomposition d = eig_sym(op, cluster_tol);
  const ActiveSpectrum spec = active_spectrum(d, x0, eps_act);

  std::vector<double> candidates;
  for (const auto& e : spec.entries) {
    if (std::abs(e.value) <= d.cluster_tol) continue;
    if (std::abs(e.value - 1.0) <= d.cluster_tol) continue;
    candidates.push_back(e.value);
  }
  if (candidates.empty())
    throw NotApplicable("direction_limit: no nontrivial active eigenvalue");
  if (candidates.size() >= 2 && candidates[0] - candidates[1] <= d.cluster_tol)
    throw NotApplicable("direction_limit: tied dominant active eigenvalues");
  if (static_cast<int>(trace.directions.size()) < 10)
    throw InsufficientData("direction_limit: need at least 10 recorded directions");

  const double achieving = candidates[0];
  Vector component = eigenspace_projection(d, achieving, x0);
  if (trace.method == Method::Map) component = project(a, component);
  const double cn = component.norm();
  if (cn == 0.0) throw NumericalFailure("direction_limit: vanished component");

  DirectionLimit out;
  out.predicted = component / cn;
  out.empirical = trace.directions.back();
  out.angle_between =
      std::acos(std::clamp(out.predicted.dot(out.empirical), -1.0, 1.0));
  return out;
}

}  // namespace projlab
