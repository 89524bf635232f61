#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projlab/subspace.hpp"

namespace projlab {

/// Raw eigenvalues closer than kClusterTolRel * max(1, ||T||) merge into one
/// cluster, so geometric multiplicity survives floating point.
inline constexpr double kClusterTolRel = 1e-9;

/// Relative activity threshold for Lambda(x, T) membership.
inline constexpr double kEpsAct = 1e-8;

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
  Matrix eigenbasis;  // d x multiplicity, orthonormal
};

/// Eigen-structure of a symmetric operator: clusters with strictly decreasing
/// values, pairwise orthogonal eigenbases, multiplicities summing to d.
struct SpectralDecomposition {
  std::vector<EigenCluster> clusters;
  double cluster_tol = 0.0;  // absolute tolerance used for merging
  int dim = 0;

  /// Cluster whose value is within cluster_tol of `value` (nearest if two
  /// qualify); nullptr when none does.
  const EigenCluster* find(double value) const;
};

struct ActiveEntry {
  double value = 0.0;
  double projection_norm = 0.0;
};

/// Lambda(x, T): clusters carrying a component of x above eps_act * ||x||,
/// in descending eigenvalue order.
struct ActiveSpectrum {
  std::vector<ActiveEntry> entries;
  double eps_act = kEpsAct;

  bool has(double value, double tol) const;
  std::vector<double> values() const;
};

SpectralDecomposition eig_sym(const SymmetricOperator& t, double cluster_tol = kClusterTolRel);

/// P_{N(value - T)}(x); the zero vector when `value` is not in the spectrum.
Vector eigenspace_projection(const SpectralDecomposition& d, double value, const Vector& x);

ActiveSpectrum active_spectrum(const SpectralDecomposition& d, const Vector& x,
                               double eps_act = kEpsAct);

/// T - lambda * P_{N(lambda - T)}: removes lambda from the spectrum and keeps
/// everything else.
SymmetricOperator spectral_shift(const SymmetricOperator& t, double lambda,
                                 const SpectralDecomposition& d);

/// Spectral split of an eigenvector u of P_A P_B P_A (eigenvalue lambda in
/// (0,1)) with respect to P_B P_A P_B: null_part = P_{B^perp}(u) lies in the
/// nullspace, eig_part = P_B(u) is an eigenvector at the same lambda, and
/// ||null_part||^2 = (1-lambda)||u||^2, ||eig_part||^2 = lambda ||u||^2.
struct EigvecSplit {
  Vector null_part;
  Vector eig_part;
};

EigvecSplit lift_product_eigvec(const Vector& u, double lambda, const Subspace& a,
                                const Subspace& b);

/// Spectral split of an eigenvector w of (P_A+P_B)/2 (eigenvalue mu in (0,1))
/// with respect to P_B P_A P_B. For mu != 1/2 the eig_part sits at
/// lambda = (2 mu - 1)^2; at mu = 1/2 the whole vector lies in the nullspace
/// and lambda_out is absent.
struct AvgEigvecSplit {
  Vector null_part;
  Vector eig_part;
  std::optional<double> lambda_out;
};

AvgEigvecSplit split_avg_eigvec(const Vector& w, double mu, const Subspace& a,
                                const Subspace& b, double half_tol = kClusterTolRel);

/// The two averaged-projector eigencomponents of an eigenvector u of
/// P_A P_B P_A: w_pm = u/2 pm P_B(u)/(2 sqrt(lambda)), eigenvalues
/// mu_pm = 1/2 pm sqrt(lambda)/2, with ||w_pm||^2 = mu_pm ||u||^2.
struct AvgPair {
  Vector w_minus;
  Vector w_plus;
  double mu_minus = 0.0;
  double mu_plus = 0.0;
};

AvgPair avg_pair_from_product_eigvec(const Vector& u, double lambda, const Subspace& a,
                                     const Subspace& b);

/// One nullspace computed two ways: spectrally (eigenspace of the operator at
/// the target value) and by the closed-form direct sum.
struct NullspaceEntry {
  std::string name;
  Subspace spectral;
  Subspace formula;
  int dim_spectral = 0;
  int dim_formula = 0;
  double distance = 0.0;  // largest principal angle (radians)
};

struct NullspaceReport {
  std::vector<NullspaceEntry> entries;
  double max_distance = 0.0;
  bool dims_match = true;
};

NullspaceReport nullspace_report(const Subspace& a, const Subspace& b,
                                 double cluster_tol = kClusterTolRel);

/// One matched eigenvalue: lambda of P_B P_A P_B against mu_pm of (P_A+P_B)/2.
struct MatchedEigenvalue {
  double lambda = 0.0;
  int lambda_mult = 0;
  double mu_minus = 0.0;
  double mu_plus = 0.0;
  int mu_minus_mult = 0;
  int mu_plus_mult = 0;
  double residual_minus = 0.0;  // |mu_minus - (1/2 - sqrt(lambda)/2)|
  double residual_plus = 0.0;
};

struct CorrespondenceReport {
  std::vector<MatchedEigenvalue> matches;
  double friedrichs = 0.0;
  bool bijection_ok = false;        // every nontrivial mu consumed, multiplicities equal
  double max_residual = 0.0;
  double max_mu = 0.0;              // observed max of Lambda(T)\{0,1/2,1}
  double min_mu = 0.0;
  double max_mu_residual = 0.0;     // |max_mu - (1/2 + cos/2)|
  double min_mu_residual = 0.0;
  bool products_agree = false;      // Lambda(P_B P_A P_B)\{0,1} == Lambda(P_A P_B P_A)\{0,1}
  double products_residual = 0.0;
  double cluster_tol = 0.0;
};

/// Checks that Lambda((P_A+P_B)/2)\{0,1/2,1} equals
/// {1/2 pm sqrt(lambda)/2} with multiplicities. Requires cos(theta_F) > 0.
CorrespondenceReport eigenvalue_correspondence(const Subspace& a, const Subspace& b,
                                               double cluster_tol = kClusterTolRel);

struct ActiveCorrespondenceReport {
  std::vector<double> lambda_values;    // Lambda(x, P_B P_A P_B) \ {0, 1}
  std::vector<double> lambda_mirror;    // Lambda(x, P_A P_B P_A) \ {0, 1}
  std::vector<double> mu_values;        // Lambda(x, (P_A+P_B)/2) \ {0, 1/2, 1}
  bool mu_matches = false;
  bool mirror_matches = false;
  double max_residual = 0.0;
  double eps_act = kEpsAct;
};

/// Per-trajectory version of the correspondence, valid for x in A union B
/// with a nondegenerate component.
ActiveCorrespondenceReport active_correspondence(const Vector& x, const Subspace& a,
                                                 const Subspace& b,
                                                 double eps_act = kEpsAct,
                                                 double cluster_tol = kClusterTolRel);

/// Eigenspace of `t` at `target` (all clusters within the decomposition's
/// merge tolerance of the target), as a subspace.
Subspace eigenspace_of(const SymmetricOperator& t, double target,
                       double cluster_tol = kClusterTolRel);

}  // namespace projlab
