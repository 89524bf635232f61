#pragma once

#include <optional>
#include <vector>

#include "projlab/spectral.hpp"
#include "projlab/subspace.hpp"

namespace projlab {

enum class Method { Map, Msp };

enum class StopReason { Budget, Floor, ConvergedOneStep };

/// e_1 <= kOneStepTol * e_0 counts as convergence after one iteration.
inline constexpr double kOneStepTol = 1e-12;

/// Default relative error floor; below it ratio estimates degrade.
inline constexpr double kDefaultFloor = 1e-10;

/// One MAP or MSP run. Errors are measured against the precomputed limit
/// P_{A cap B}(x0); ratios[k-1] = e_k / e_{k-1} where both are positive.
struct IterationTrace {
  Method method = Method::Map;
  Vector x0;
  Vector limit;
  std::vector<double> errors;              // e_0 .. e_K
  std::vector<std::optional<double>> ratios;  // size K; absent where undefined
  std::vector<Vector> directions;          // unit (iterate - limit)/e_k, when recorded
  StopReason stopped_reason = StopReason::Budget;
  double floor_abs = 0.0;                  // floor * e_0
};

struct RunOptions {
  int max_iter = 200;
  double floor = kDefaultFloor;
  bool record_directions = true;
};

/// P_A(P_B(x)).
Vector map_step(const Vector& x, const Subspace& a, const Subspace& b);

/// (P_A(x) + P_B(x)) / 2.
Vector msp_step(const Vector& x, const Subspace& a, const Subspace& b);

IterationTrace run(Method method, const Vector& x0, const Subspace& a, const Subspace& b,
                   const RunOptions& options = {});

/// Predicted and measured Q-linear rates for one starting point.
///
/// predicted_lambda = max Lambda(x0, P_B P_A P_B)\{0,1} and predicted_mu the
/// averaged-operator analogue; either is absent when the start is degenerate
/// for that method.
struct RateReport {
  std::optional<double> predicted_lambda;
  std::optional<double> predicted_mu;
  std::optional<double> empirical_lambda;
  std::optional<double> empirical_mu;
  std::optional<double> lambda_active_value;  // the achieving eigenvalue
  std::optional<double> mu_active_value;
  std::optional<double> lambda_agreement;     // |empirical - predicted|
  std::optional<double> mu_agreement;
  bool map_degenerate = false;
  bool msp_degenerate = false;
};

RateReport predicted_rates(const Vector& x0, const Subspace& a, const Subspace& b,
                           double eps_act = kEpsAct, double cluster_tol = kClusterTolRel);

struct QRateEstimate {
  double rate = 0.0;
  double max_deviation = 0.0;  // max |ratio - rate| inside the window
};

/// Mean of the last `window` usable consecutive-error ratios.
QRateEstimate estimate_q_rate(const IterationTrace& trace, int window = 5);

/// Spectral norms ||(P_A P_B)^k - P_cap|| and ||((P_A+P_B)/2)^k - P_cap|| for
/// k = 1..k_max.
struct OperatorErrorNorms {
  std::vector<double> map_norms;
  std::vector<double> msp_norms;
};

OperatorErrorNorms operator_error_norms(const Subspace& a, const Subspace& b, int k_max);

struct DirectionLimit {
  Vector empirical;
  Vector predicted;
  double angle_between = 0.0;
};

/// Limit direction of (iterate - limit)/e_k: P_A(v_lambda) normalized for the
/// MAP, w_mu normalized for the MSP, with lambda/mu the achieving active
/// eigenvalues of x0.
DirectionLimit direction_limit(const IterationTrace& trace, const Vector& x0,
                               const Subspace& a, const Subspace& b,
                               double eps_act = kEpsAct,
                               double cluster_tol = kClusterTolRel);

}  // namespace projlab
