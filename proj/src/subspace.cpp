#include "projlab/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace projlab {

bool is_symmetric(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

Subspace zero_space(int d) {
  if (d < 1) throw InvalidInput("ambient dimension must be positive");
  return Subspace{d, Matrix::Zero(d, 0)};
}

Subspace full_space(int d) {
  if (d < 1) throw InvalidInput("ambient dimension must be positive");
  return Subspace{d, Matrix::Identity(d, d)};
}

Subspace orthonormalize(const Matrix& raw, double tol) {
  const int d = static_cast<int>(raw.rows());
  if (d < 1) throw InvalidInput("orthonormalize: empty ambient space");
  if (tol <= 0) throw InvalidInput("orthonormalize: tol must be positive");
  if (!raw.allFinite()) throw InvalidInput("orthonormalize: non-finite entries");
  if (raw.cols() == 0) return zero_space(d);

  Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
  }
  return Subspace{d, svd.matrixU().leftCols(rank)};
}

SymmetricOperator projector(const Subspace& s) {
  if (s.dim() == 0) return SymmetricOperator{Matrix::Zero(s.ambient_dim, s.ambient_dim)};
  return SymmetricOperator{s.basis * s.basis.transpose()};
}

Subspace complement(const Subspace& s) {
  const int d = s.ambient_dim;
  const int k = s.dim();
  if (k == 0) return full_space(d);
  if (k == d) return zero_space(d);
  Eigen::JacobiSVD<Matrix> svd(s.basis, Eigen::ComputeFullU);
  return Subspace{d, svd.matrixU().rightCols(d - k)};
}

Subspace intersect(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("intersect: ambient dimensions differ");
  if (tol <= 0) throw InvalidInput("intersect: tol must be positive");
  const int d = a.ambient_dim;
  if (a.dim() == 0 || b.dim() == 0) return zero_space(d);

  const SymmetricOperator avg = average_projector(a, b);
  Eigen::SelfAdjointEigenSolver<Matrix> es(avg.matrix);
  if (es.info() != Eigen::Success) throw NumericalFailure("intersect: eigensolver failed");

  std::vector<int> idx;
  for (int i = 0; i < d; ++i) {
    if (std::abs(es.eigenvalues()(i) - 1.0) <= tol) idx.push_back(i);
  }
  Matrix basis(d, static_cast<int>(idx.size()));
  for (int j = 0; j < static_cast<int>(idx.size()); ++j) basis.col(j) = es.eigenvectors().col(idx[j]);
  return Subspace{d, std::move(basis)};
}

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

namespace {

// QR with the R diagonal forced positive, so the Q factor of a Gaussian
// matrix is Haar-distributed and reproducible.
Matrix qr_orthonormal(const Matrix& g) {
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < g.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

Subspace random_subspace(int d, int k, std::uint64_t seed) {
  if (d < 1) throw InvalidInput("random_subspace: d must be positive");
  if (k < 0 || k > d) throw InvalidInput("random_subspace: k out of range");
  if (k == 0) return zero_space(d);
  return Subspace{d, qr_orthonormal(gaussian_matrix(d, k, seed))};
}

std::pair<Subspace, Subspace> subspaces_with_angles(int d,
                                                    const std::vector<double>& angles,
                                                    std::uint64_t seed) {
  if (d < 1) throw InvalidInput("subspaces_with_angles: d must be positive");
  const int p = static_cast<int>(angles.size());
  if (p == 0) throw InvalidInput("subspaces_with_angles: empty angle list");
  int nonzero = 0;
  constexpr double kHalfPi = 1.5707963267948966;
  for (int i = 0; i < p; ++i) {
    if (!std::isfinite(angles[i]) || angles[i] < 0.0 || angles[i] > kHalfPi + 1e-12)
      throw InvalidInput("subspaces_with_angles: angle outside [0, pi/2]");
    if (i > 0 && angles[i] < angles[i - 1])
      throw InvalidInput("subspaces_with_angles: angles must be nondecreasing");
    if (angles[i] > 0.0) ++nonzero;
  }
  if (d < p + nonzero)
    throw InvalidInput("subspaces_with_angles: ambient dimension too small");

  // u_n = e_n; each nonzero angle consumes one extra direction g_n.
  Matrix a_std = Matrix::Zero(d, p);
  Matrix b_std = Matrix::Zero(d, p);
  int next_g = p;
  for (int n = 0; n < p; ++n) {
    a_std(n, n) = 1.0;
    if (angles[n] == 0.0) {
      b_std(n, n) = 1.0;
    } else {
      b_std(n, n) = std::cos(angles[n]);
      b_std(next_g, n) = std::sin(angles[n]);
      ++next_g;
    }
  }

  const Matrix q = qr_orthonormal(gaussian_matrix(d, d, seed));
  return {Subspace{d, q * a_std}, Subspace{d, q * b_std}};
}

Vector project(const Subspace& s, const Vector& x) {
  if (x.size() != s.ambient_dim) throw InvalidInput("project: dimension mismatch");
  if (s.dim() == 0) return Vector::Zero(s.ambient_dim);
  return s.basis * (s.basis.transpose() * x);
}

double membership_residual(const Subspace& s, const Vector& x) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  return (project(s, x) - x).norm() / nx;
}

bool contains(const Subspace& s, const Vector& x, double tol) {
  return membership_residual(s, x) <= tol;
}

Subspace direct_sum(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("direct_sum: ambient dimensions differ");
  Matrix joined(a.ambient_dim, a.dim() + b.dim());
  joined << a.basis, b.basis;
  Subspace s = orthonormalize(joined);
  if (s.dim() != a.dim() + b.dim())
    throw InvalidInput("direct_sum: summands are not independent");
  return s;
}

double largest_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("largest_principal_angle: ambient dimensions differ");
  if (a.dim() != b.dim()) return 1.5707963267948966;
  if (a.dim() == 0) return 0.0;
  // sin of the largest angle: ||(I - P_a) Q_b||.
  const Matrix residual = b.basis - a.basis * (a.basis.transpose() * b.basis);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = std::clamp(svd.singularValues()(0), 0.0, 1.0);
  return std::asin(s);
}

Vector random_unit_vector(int d, std::uint64_t seed) {
  if (d < 1) throw InvalidInput("random_unit_vector: d must be positive");
  Vector v = gaussian_matrix(d, 1, seed).col(0);
  const double n = v.norm();
  if (n == 0.0) throw NumericalFailure("random_unit_vector: zero draw");
  return v / n;
}

Vector random_unit_in(const Subspace& s, std::uint64_t seed) {
  if (s.dim() == 0) throw InvalidInput("random_unit_in: trivial subspace");
  Vector coeff = gaussian_matrix(s.dim(), 1, seed).col(0);
  Vector v = s.basis * coeff;
  const double n = v.norm();
  if (n == 0.0) throw NumericalFailure("random_unit_in: zero draw");
  return v / n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over seed ^ salt.
  std::uint64_t z = seed ^ (salt + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SymmetricOperator symmetrized_product(const Subspace& outer, const Subspace& inner) {
  if (outer.ambient_dim != inner.ambient_dim)
    throw InvalidInput("symmetrized_product: ambient dimensions differ");
  const Matrix po = projector(outer).matrix;
  const Matrix pi = projector(inner).matrix;
  Matrix m = po * pi * po;
  // round-off symmetrization
  m = 0.5 * (m + m.transpose()).eval();
  return SymmetricOperator{std::move(m)};
}

SymmetricOperator average_projector(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("average_projector: ambient dimensions differ");
  return SymmetricOperator{0.5 * (projector(a).matrix + projector(b).matrix)};
}

}  // namespace projlab
