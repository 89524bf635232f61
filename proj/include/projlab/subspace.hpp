#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "projlab/errors.hpp"

namespace projlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value threshold for rank decisions.
inline constexpr double kRankTol = 1e-10;

/// A linear subspace of R^d, stored as a d x k matrix with orthonormal
/// columns. k = 0 encodes the zero subspace {0}.
struct Subspace {
  int ambient_dim = 0;
  Matrix basis;  // d x k, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// A dense symmetric d x d operator (P_A, P_B P_A P_B, (P_A+P_B)/2, ...).
struct SymmetricOperator {
  Matrix matrix;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// True when |M - M^T| <= 1e-12 * (1 + max|entry|) entrywise.
bool is_symmetric(const Matrix& m);

Subspace zero_space(int d);
Subspace full_space(int d);

/// Orthonormal basis of the column space of `raw`. Numerical rank counts
/// singular values above tol * sigma_max.
Subspace orthonormalize(const Matrix& raw, double tol = kRankTol);

/// The orthogonal projector basis * basis^T (zero matrix for k = 0).
SymmetricOperator projector(const Subspace& s);

/// Orthogonal complement, dimension d - k.
Subspace complement(const Subspace& s);

/// A cap B, recovered as the eigenspace of (P_A+P_B)/2 at the eigenvalue
/// cluster within `tol` of 1.
Subspace intersect(const Subspace& a, const Subspace& b, double tol = kRankTol);

/// Haar-like random k-dimensional subspace (orthonormalized Gaussian),
/// deterministic for a fixed seed.
Subspace random_subspace(int d, int k, std::uint64_t seed);

/// A pair of subspaces whose principal angles equal `angles` (nondecreasing,
/// in [0, pi/2]). Built in standard coordinates from reciprocal vector pairs,
/// then rotated by a seeded random orthogonal matrix.
std::pair<Subspace, Subspace> subspaces_with_angles(int d,
                                                    const std::vector<double>& angles,
                                                    std::uint64_t seed);

// -- small helpers shared across modules --

/// P_S(x) without forming the projector matrix.
Vector project(const Subspace& s, const Vector& x);

/// ||P_S(x) - x|| / ||x||; zero for the zero vector.
double membership_residual(const Subspace& s, const Vector& x);

bool contains(const Subspace& s, const Vector& x, double tol = 1e-10);

/// Span of the union of two subspaces (re-orthonormalized).
Subspace direct_sum(const Subspace& a, const Subspace& b);

/// Largest principal angle between equal-dimensional subspaces, computed as
/// asin(||(I - P_a) Q_b||) so that near-zero angles are not lost to acos
/// cancellation. Returns pi/2 when dimensions differ; 0 when both trivial.
double largest_principal_angle(const Subspace& a, const Subspace& b);

/// Seeded standard Gaussian vector/matrix (mt19937_64 + normal_distribution).
Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed);

/// Seeded random unit vector in R^d.
Vector random_unit_vector(int d, std::uint64_t seed);

/// Seeded random unit vector inside a nontrivial subspace.
Vector random_unit_in(const Subspace& s, std::uint64_t seed);

/// Deterministic seed derivation for sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// -- operator factories --

/// P_outer P_inner P_outer.
SymmetricOperator symmetrized_product(const Subspace& outer, const Subspace& inner);

/// (P_A + P_B) / 2.
SymmetricOperator average_projector(const Subspace& a, const Subspace& b);

}  // namespace projlab
