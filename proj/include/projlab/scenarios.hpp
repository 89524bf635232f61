#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projlab/dynamics.hpp"

namespace projlab {

enum class Verdict { MapWins, MspWins, Tie };

std::string to_string(Verdict v);

/// Strict-inequality slack, scaled by e_0; absorbs rounding in comparisons
/// that are exact in the reals.
inline constexpr double kStrictSlack = 1e-12;

/// Relative tie band for per-k dominance flags. Two error values within this
/// relative distance are indistinguishable from equal after ~30 iterations of
/// accumulated rounding.
inline constexpr double kTieBandRel = 1e-9;

struct ComparisonRow {
  int k = 0;
  double map_error = 0.0;
  double msp_error = 0.0;
  int dominance = 0;  // +1 when msp > map (MAP ahead), -1 opposite, 0 tie
};

/// Head-to-head record of one MAP-vs-MSP run from a shared start.
struct ComparisonReport {
  int d = 0;
  std::vector<double> requested_angles;  // empty unless generated
  std::uint64_t seed = 0;
  double cos_f = 0.0;
  std::string start_kind;  // "A", "B", "mu_minus", "random", "explicit"
  bool no_such_start = false;   // mu_minus requested but cos(theta_F) <= 1/2
  bool degenerate_start = false;
  std::vector<ComparisonRow> rows;  // k = 1..K
  std::optional<double> lambda;     // predicted MAP rate
  std::optional<double> mu;         // predicted MSP rate
  std::optional<double> mu_identity_residual;  // |mu - (1/2 + sqrt(lambda)/2)|
  bool dominance_all_map = false;   // msp_k > map_k > 0 for every k
  bool dominance_all_msp = false;
  Verdict verdict = Verdict::Tie;
};

/// Plain comparison from any nondegenerate start (no membership requirement).
ComparisonReport compare_methods(const Subspace& a, const Subspace& b, const Vector& x0,
                                 int k_iters = 30, double eps_act = kEpsAct,
                                 double cluster_tol = kClusterTolRel);

/// Strict check for starts in A union B: msp_k > map_k > 0 for k = 1..K and
/// mu = 1/2 + sqrt(lambda)/2. Throws PreconditionViolated for starts outside
/// A union B and DegenerateStart when the MAP converges in one step.
ComparisonReport verify_main2(const Subspace& a, const Subspace& b, const Vector& x0,
                              int k_iters = 30, double eps_act = kEpsAct,
                              double cluster_tol = kClusterTolRel);

/// A unit vector in the eigenspace of (P_A+P_B)/2 at mu_minus =
/// (1 - cos(theta_F))/2, from which the MSP beats the MAP. Exists only when
/// cos(theta_F) > 1/2; the returned start's guarantees are verified before
/// returning. Throws NoSuchStart otherwise.
Vector msp_beats_map_start(const Subspace& a, const Subspace& b, int k_check = 30,
                           double eps_act = kEpsAct, double cluster_tol = kClusterTolRel);

/// The three active spectra of x = P_{B^perp}(u) for an eigenvector u of
/// P_A P_B P_A at lambda: {0}, {0, lambda} and {mu_-, mu_+}. The sets break
/// the correspondence because x lies outside A union B.
struct LambdaxCaseReport {
  double lambda = 0.0;
  Vector x;
  double norm_x = 0.0;
  std::vector<double> set_product;         // Lambda(x, P_B P_A P_B)
  std::vector<double> set_product_mirror;  // Lambda(x, P_A P_B P_A)
  std::vector<double> set_average;         // Lambda(x, (P_A+P_B)/2)
  bool sets_ok = false;
  double max_residual = 0.0;
  // x = coef_plus * w_+ + coef_minus * w_- in the averaged-projector basis.
  double coef_plus = 0.0;
  double coef_minus = 0.0;
};

LambdaxCaseReport example_lambdax_case(const Subspace& a, const Subspace& b, double lambda,
                                       double cluster_tol = kClusterTolRel);

struct SweepSpec {
  int d = 0;
  std::vector<std::vector<double>> angle_sets;
  std::vector<std::string> starts;  // "A", "B", "mu_minus", "random"
  std::vector<std::uint64_t> seeds;
  int k_iters = 30;
};

/// One ComparisonReport per (angle_set, start, seed) cell, in grid order
/// regardless of `jobs`.
std::vector<ComparisonReport> sweep(const SweepSpec& spec, int jobs = 1,
                                    double eps_act = kEpsAct,
                                    double cluster_tol = kClusterTolRel);

}  // namespace projlab
