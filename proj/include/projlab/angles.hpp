#pragma once

#include <vector>

#include "projlab/subspace.hpp"

namespace projlab {

/// One reciprocal pair: unit vectors u in A, v in B with <u, v> = cos(theta_n),
/// P_A(v) = cos(theta_n) u and P_B(u) = cos(theta_n) v.
struct PrincipalPair {
  Vector u;
  Vector v;
};

/// Full angle structure of a pair of nontrivial subspaces.
///
/// cosines are nonincreasing; the first f-1 equal 1 (the common part A cap B),
/// the entries f..r are the nonzero non-unit cosines, and r+1..p are zero.
struct AngleProfile {
  std::vector<double> cosines;        // c_1 >= ... >= c_p in [0, 1]
  std::vector<PrincipalPair> pairs;   // size p
  int p = 0;                          // min(dim A, dim B)
  int f = 1;                          // dim(A cap B) + 1
  int r = 0;                          // rank(P_B P_A P_B) = count of nonzero cosines
  double dixmier_cos = 0.0;           // c_1
  double friedrichs_cos = 0.0;        // c_f if f <= r, else 0
  bool degenerate_nested = false;     // A subset of B or B subset of A
};

/// Principal angles via the SVD of A.basis^T B.basis. Singular values are
/// clamped into [0, 1]. f is derived from the subspace intersection and
/// cross-checked against the count of cosines >= 1 - tol.
AngleProfile principal_angles(const Subspace& a, const Subspace& b, double tol = kRankTol);

/// c_1 = ||P_A P_B||.
double dixmier_cos(const AngleProfile& profile);

/// The cosine of the smallest nonzero principal angle; 0 when every nonzero
/// cosine equals 1 (nested or orthogonal pairs).
double friedrichs_cos(const AngleProfile& profile);

/// Convenience: friedrichs_cos(principal_angles(a, b)).
double friedrichs_cos(const Subspace& a, const Subspace& b);

}  // namespace projlab
