#include "projlab/angles.hpp"

#include <algorithm>
#include <cmath>

namespace projlab {

AngleProfile principal_angles(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("principal_angles: ambient dimensions differ");
  if (a.dim() == 0 || b.dim() == 0)
    throw InvalidInput("principal_angles: trivial subspace");
  if (tol <= 0) throw InvalidInput("principal_angles: tol must be positive");

  const Matrix gram = a.basis.transpose() * b.basis;  // kA x kB
  Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);

  AngleProfile profile;
  profile.p = static_cast<int>(std::min(a.dim(), b.dim()));
  profile.cosines.resize(profile.p);
  profile.pairs.resize(profile.p);
  for (int n = 0; n < profile.p; ++n) {
    profile.cosines[n] = std::clamp(svd.singularValues()(n), 0.0, 1.0);
    profile.pairs[n].u = a.basis * svd.matrixU().col(n);
    profile.pairs[n].v = b.basis * svd.matrixV().col(n);
  }

  const int dim_cap = intersect(a, b, tol).dim();
  profile.f = dim_cap + 1;
  const int ones = static_cast<int>(
      std::count_if(profile.cosines.begin(), profile.cosines.end(),
                    [tol](double c) { return c >= 1.0 - tol; }));
  if (ones != dim_cap)
    throw NumericalFailure("principal_angles: intersection dimension disagrees with cosine count");

  profile.r = static_cast<int>(
      std::count_if(profile.cosines.begin(), profile.cosines.end(),
                    [tol](double c) { return c > tol; }));
  profile.degenerate_nested = (dim_cap == profile.p);
  profile.dixmier_cos = profile.cosines[0];
  profile.friedrichs_cos = (profile.f <= profile.r) ? profile.cosines[profile.f - 1] : 0.0;
  return profile;
}

double dixmier_cos(const AngleProfile& profile) { return profile.dixmier_cos; }

double friedrichs_cos(const AngleProfile& profile) { return profile.friedrichs_cos; }

double friedrichs_cos(const Subspace& a, const Subspace& b) {
  return principal_angles(a, b).friedrichs_cos;
}

}  // namespace projlab
