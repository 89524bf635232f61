#include <doctest.h>

#include <cmath>

#include "projlab/angles.hpp"
#include "projlab/subspace.hpp"
#include "test_support.hpp"

using namespace projlab;
using namespace testsupport;

TEST_SUITE("subspace") {

TEST_CASE("orthonormalize collapses duplicate directions") {
  Matrix raw(2, 2);
  raw << 1, 2, 0, 0;
  const Subspace s = orthonormalize(raw);
  CHECK(s.dim() == 1);
  CHECK(std::abs(std::abs(s.basis(0, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(s.basis(1, 0)) < 1e-14);
}

TEST_CASE("orthonormalize keeps an already orthonormal basis") {
  const Subspace s = orthonormalize(Matrix::Identity(2, 2));
  CHECK(s.dim() == 2);
  const Matrix gram = s.basis.transpose() * s.basis;
  CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("orthonormalize rank decision follows the singular values") {
  Matrix raw(2, 2);
  raw << 0.6, 0.6 + 1e-16, 0.8, 0.8;
  // Oracle: singular values from the characteristic polynomial of raw^T raw.
  const auto [s1, s2] = sv2(raw);
  REQUIRE(s2 < 1e-10 * s1);
  CHECK(orthonormalize(raw, 1e-10).dim() == 1);
}

TEST_CASE("orthonormalize rejects non-finite input") {
  Matrix raw(2, 1);
  raw << 1.0, std::nan("");
  CHECK_THROWS_AS(orthonormalize(raw), InvalidInput);
}

TEST_CASE("projector of a coordinate axis") {
  const auto [a, b] = orthogonal_lines();
  const Matrix p = projector(a).matrix;
  Matrix expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((p - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projector of the zero subspace is the zero matrix") {
  const Matrix p = projector(zero_space(3)).matrix;
  CHECK(p.rows() == 3);
  CHECK(p.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projector matches the outer product b b^T") {
  const auto [a, b] = plane_pair();
  // Oracle: direct outer product of the unit vector (0.6, 0.8).
  Matrix expected(2, 2);
  expected << 0.36, 0.48, 0.48, 0.64;
  CHECK((projector(b).matrix - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("complement of a line in the plane") {
  const auto [a, b] = plane_pair();
  const Subspace ap = complement(a);
  REQUIRE(ap.dim() == 1);
  CHECK(std::abs(ap.basis(0, 0)) < 1e-14);
  CHECK(std::abs(std::abs(ap.basis(1, 0)) - 1.0) < 1e-14);

  const Subspace bp = complement(b);
  REQUIRE(bp.dim() == 1);
  Vector expected(2);
  expected << 0.8, -0.6;  // nullspace of b^T, up to sign
  CHECK(std::abs(std::abs(bp.basis.col(0).dot(expected)) - 1.0) < 1e-14);
}

TEST_CASE("complement of the full space is trivial") {
  CHECK(complement(full_space(2)).dim() == 0);
  CHECK(complement(zero_space(2)).dim() == 2);
}

TEST_CASE("intersect of identical lines") {
  Matrix e1(2, 1);
  e1 << 1, 0;
  const Subspace a{2, e1};
  const Subspace cap = intersect(a, a);
  REQUIRE(cap.dim() == 1);
  CHECK(std::abs(std::abs(cap.basis(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("intersect of orthogonal lines is trivial") {
  const auto [a, b] = orthogonal_lines();
  CHECK(intersect(a, b).dim() == 0);
}

TEST_CASE("intersect recovers the common direction of the 3d pair") {
  const auto [a, b] = pair3d();
  const Subspace cap = intersect(a, b);
  REQUIRE(cap.dim() == 1);
  Vector e3(3);
  e3 << 0, 0, 1;
  CHECK(std::abs(std::abs(cap.basis.col(0).dot(e3)) - 1.0) < 1e-12);
}

TEST_CASE("intersect rejects mismatched ambient dimensions") {
  CHECK_THROWS_AS(intersect(full_space(2), full_space(3)), InvalidInput);
}

TEST_CASE("random_subspace edge cases and determinism") {
  CHECK(random_subspace(5, 0, 1).dim() == 0);
  const Subspace full = random_subspace(5, 5, 7);
  CHECK(full.dim() == 5);
  CHECK((full.basis.transpose() * full.basis - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <
        1e-13);

  const Subspace s1 = random_subspace(8, 3, 42);
  const Subspace s2 = random_subspace(8, 3, 42);
  CHECK(s1.basis == s2.basis);  // bit-for-bit
  CHECK_THROWS_AS(random_subspace(3, 4, 0), InvalidInput);
}

TEST_CASE("subspaces_with_angles reproduces a single requested angle") {
  const double theta = std::acos(0.6);
  const auto [a, b] = subspaces_with_angles(2, {theta}, 5);
  // Oracle: recompute the cosine from the SVD of basis^T basis (2x2 closed form).
  const auto [c1, c2] = sv2(a.basis.transpose() * b.basis);
  CHECK(std::abs(c1 - 0.6) < 1e-10);
  CHECK(c2 < 1e-12);
}

TEST_CASE("subspaces_with_angles with a zero angle creates an intersection") {
  const double theta = std::acos(0.6);
  const auto [a, b] = subspaces_with_angles(3, {0.0, theta}, 9);
  CHECK(intersect(a, b).dim() == 1);
  CHECK(std::abs(friedrichs_cos(a, b) - 0.6) < 1e-10);
}

TEST_CASE("subspaces_with_angles with a right angle gives P_A P_B = 0") {
  const auto [a, b] = subspaces_with_angles(2, {1.5707963267948966}, 3);
  const Matrix prod = projector(a).matrix * projector(b).matrix;
  CHECK(prod.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("subspaces_with_angles validates its inputs") {
  CHECK_THROWS_AS(subspaces_with_angles(2, {0.0, 0.5}, 1), InvalidInput);  // needs d >= 3
  CHECK_THROWS_AS(subspaces_with_angles(4, {0.5, 0.1}, 1), InvalidInput);  // not sorted
  CHECK_THROWS_AS(subspaces_with_angles(4, {-0.1}, 1), InvalidInput);
}

TEST_CASE("projector idempotence and trace over random subspaces") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 3 + static_cast<int>(seed % 14);
    const int k = static_cast<int>(seed % (d + 1));
    const Subspace s = random_subspace(d, k, mix_seed(seed, 100));
    const Matrix p = projector(s).matrix;
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(p.trace() - k) < 1e-10);
    const Matrix q = projector(complement(s)).matrix;
    CHECK((p + q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("intersection vectors are fixed by both projectors") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int d = 4 + static_cast<int>(seed % 10);
    const Subspace a = random_subspace(d, 2 + static_cast<int>(seed % (d - 2)), mix_seed(seed, 7));
    const Subspace b = random_subspace(d, 2 + static_cast<int>(seed % (d - 2)), mix_seed(seed, 8));
    const Subspace cap = intersect(a, b);
    for (int j = 0; j < cap.dim(); ++j) {
      const Vector v = cap.basis.col(j);
      CHECK((project(a, v) - v).norm() < 1e-10);
      CHECK((project(b, v) - v).norm() < 1e-10);
    }
  }
}

TEST_CASE("commuting pairs satisfy P_A P_B = P_cap") {
  // All principal angles in {0, pi/2}: the projectors commute.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<double> angles = {0.0, 1.5707963267948966};
    if (seed % 2 == 0) angles.insert(angles.begin(), 0.0);
    const int d = min_dimension(angles) + static_cast<int>(seed % 3);
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 21));
    const Matrix lhs = projector(a).matrix * projector(b).matrix;
    const Matrix rhs = projector(intersect(a, b)).matrix;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("P_cap commutes with and is absorbed by both projectors") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto angles = random_angle_set(mix_seed(seed, 33), {.max_angles = 2, .zero_angles = 1});
    const int d = min_dimension(angles) + 2;
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 34));
    const Matrix pa = projector(a).matrix;
    const Matrix pc = projector(intersect(a, b)).matrix;
    CHECK((pa * pc - pc).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pc * pa - pc).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("requested angles round-trip through the generator") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    AngleSetOptions opt;
    opt.max_angles = 4;
    opt.min_cos = 0.05;
    opt.max_cos = 0.95;
    opt.zero_angles = static_cast<int>(seed % 3);
    opt.right_angles = static_cast<int>(seed % 2);
    const auto angles = random_angle_set(mix_seed(seed, 55), opt);
    const int d = std::min(50, min_dimension(angles) + static_cast<int>(seed % 5));
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 56));

    const AngleProfile profile = principal_angles(a, b);
    REQUIRE(static_cast<int>(profile.cosines.size()) == static_cast<int>(angles.size()));
    int zeros = 0;
    for (std::size_t n = 0; n < angles.size(); ++n) {
      // angles nondecreasing <-> cosines nonincreasing
      if (angles[n] == 0.0) {
        // acos near 1 amplifies machine noise past sqrt(eps); the zero angles
        // are certified in cosine space instead.
        CHECK(profile.cosines[n] >= 1.0 - 1e-12);
        ++zeros;
      } else {
        const double recovered = std::acos(profile.cosines[n]);
        CHECK(std::abs(recovered - angles[n]) < 1e-10);
      }
    }
    CHECK(profile.f - 1 == zeros);
  }
}

}  // TEST_SUITE
