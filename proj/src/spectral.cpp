#include "projlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "projlab/angles.hpp"

namespace projlab {

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Multiset comparison of cluster (value, multiplicity) lists, values matched
// within tol.
bool multisets_match(std::vector<std::pair<double, int>> lhs,
                     std::vector<std::pair<double, int>> rhs, double tol,
                     double* max_residual) {
  if (lhs.size() != rhs.size()) return false;
  double worst = 0.0;
  for (const auto& [value, mult] : lhs) {
    int best = -1;
    double best_gap = tol;
    for (int j = 0; j < static_cast<int>(rhs.size()); ++j) {
      const double gap = std::abs(rhs[j].first - value);
      if (gap <= best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best < 0 || rhs[best].second != mult) return false;
    worst = std::max(worst, best_gap);
    rhs.erase(rhs.begin() + best);
  }
  if (max_residual) *max_residual = std::max(*max_residual, worst);
  return true;
}

std::vector<std::pair<double, int>> nontrivial_clusters(
    const SpectralDecomposition& d, const std::vector<double>& excluded) {
  std::vector<std::pair<double, int>> out;
  for (const auto& c : d.clusters) {
    bool skip = false;
    for (double e : excluded) {
      if (near(c.value, e, d.cluster_tol)) skip = true;
    }
    if (!skip) out.emplace_back(c.value, c.multiplicity);
  }
  return out;
}

std::vector<double> active_values_excluding(const ActiveSpectrum& spec, double cluster_tol,
                                            const std::vector<double>& excluded) {
  std::vector<double> out;
  for (const auto& e : spec.entries) {
    bool skip = false;
    for (double x : excluded) {
      if (near(e.value, x, cluster_tol)) skip = true;
    }
    if (!skip) out.push_back(e.value);
  }
  return out;
}

bool value_sets_match(const std::vector<double>& lhs, const std::vector<double>& rhs,
                      double tol, double* max_residual) {
  if (lhs.size() != rhs.size()) return false;
  std::vector<bool> used(rhs.size(), false);
  double worst = 0.0;
  for (double v : lhs) {
    int best = -1;
    double best_gap = tol;
    for (int j = 0; j < static_cast<int>(rhs.size()); ++j) {
      if (used[j]) continue;
      const double gap = std::abs(rhs[j] - v);
      if (gap <= best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best < 0) return false;
    used[best] = true;
    worst = std::max(worst, best_gap);
  }
  if (max_residual) *max_residual = std::max(*max_residual, worst);
  return true;
}

}  // namespace

const EigenCluster* SpectralDecomposition::find(double value) const {
  const EigenCluster* best = nullptr;
  double best_gap = cluster_tol;
  for (const auto& c : clusters) {
    const double gap = std::abs(c.value - value);
    if (gap <= best_gap) {
      best = &c;
      best_gap = gap;
    }
  }
  return best;
}

bool ActiveSpectrum::has(double value, double tol) const {
  for (const auto& e : entries) {
    if (near(e.value, value, tol)) return true;
  }
  return false;
}

std::vector<double> ActiveSpectrum::values() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const auto& e : entries) v.push_back(e.value);
  return v;
}

SpectralDecomposition eig_sym(const SymmetricOperator& t, double cluster_tol) {
  if (cluster_tol <= 0) throw InvalidInput("eig_sym: cluster_tol must be positive");
  if (!t.matrix.allFinite()) throw InvalidInput("eig_sym: non-finite entries");
  if (!is_symmetric(t.matrix)) throw InvalidInput("eig_sym: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(t.matrix);
  if (es.info() != Eigen::Success) throw NumericalFailure("eig_sym: eigensolver failed");

  const int d = t.dim();
  const double norm = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(d - 1)));
  const double abs_tol = cluster_tol * std::max(1.0, norm);

  SpectralDecomposition out;
  out.dim = d;
  out.cluster_tol = abs_tol;

  // Eigen sorts ascending; walk descending and chain-merge close raw values.
  int i = d - 1;
  while (i >= 0) {
    int j = i;
    while (j > 0 && es.eigenvalues()(j - 1) >= es.eigenvalues()(j) - abs_tol) --j;
    EigenCluster c;
    c.multiplicity = i - j + 1;
    c.value = es.eigenvalues().segment(j, c.multiplicity).mean();
    c.eigenbasis = Matrix(d, c.multiplicity);
    for (int m = 0; m < c.multiplicity; ++m) c.eigenbasis.col(m) = es.eigenvectors().col(i - m);
    out.clusters.push_back(std::move(c));
    i = j - 1;
  }

  // Chain merging can leave adjacent cluster means within tolerance; fold them.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t k = 0; k + 1 < out.clusters.size(); ++k) {
      if (out.clusters[k].value - out.clusters[k + 1].value <= abs_tol) {
        EigenCluster& hi = out.clusters[k];
        EigenCluster& lo = out.clusters[k + 1];
        EigenCluster joined;
        joined.multiplicity = hi.multiplicity + lo.multiplicity;
        joined.value = (hi.value * hi.multiplicity + lo.value * lo.multiplicity) /
                       joined.multiplicity;
        joined.eigenbasis = Matrix(d, joined.multiplicity);
        joined.eigenbasis << hi.eigenbasis, lo.eigenbasis;
        out.clusters[k] = std::move(joined);
        out.clusters.erase(out.clusters.begin() + static_cast<long>(k) + 1);
        merged = true;
        break;
      }
    }
  }
  return out;
}

Vector eigenspace_projection(const SpectralDecomposition& d, double value, const Vector& x) {
  if (x.size() != d.dim) throw InvalidInput("eigenspace_projection: dimension mismatch");
  const EigenCluster* c = d.find(value);
  if (c == nullptr) return Vector::Zero(d.dim);
  return c->eigenbasis * (c->eigenbasis.transpose() * x);
}

ActiveSpectrum active_spectrum(const SpectralDecomposition& d, const Vector& x,
                               double eps_act) {
  if (x.size() != d.dim) throw InvalidInput("active_spectrum: dimension mismatch");
  if (eps_act <= 0) throw InvalidInput("active_spectrum: eps_act must be positive");
  const double nx = x.norm();
  if (nx == 0.0) throw InvalidInput("active_spectrum: zero vector");

  ActiveSpectrum out;
  out.eps_act = eps_act;
  for (const auto& c : d.clusters) {
    // Orthonormal eigenbasis: the projection norm is the coefficient norm.
    const double pn = (c.eigenbasis.transpose() * x).norm();
    if (pn > eps_act * nx) out.entries.push_back({c.value, pn});
  }
  return out;
}

SymmetricOperator spectral_shift(const SymmetricOperator& t, double lambda,
                                 const SpectralDecomposition& d) {
  if (lambda == 0.0) throw InvalidInput("spectral_shift: lambda must be nonzero");
  if (t.dim() != d.dim) throw InvalidInput("spectral_shift: dimension mismatch");
  const EigenCluster* c = d.find(lambda);
  if (c == nullptr) return t;
  return SymmetricOperator{t.matrix - lambda * (c->eigenbasis * c->eigenbasis.transpose())};
}

namespace {

void check_product_residual(const Vector& u, double lambda, const Subspace& a,
                            const Subspace& b, const char* who) {
  const double nu = u.norm();
  if (nu == 0.0) throw InvalidInput(std::string(who) + ": zero vector");
  const Vector image = project(a, project(b, project(a, u)));
  if ((image - lambda * u).norm() > 1e-8 * nu)
    throw NotAnEigenvector(std::string(who) + ": eigen-residual exceeds tolerance");
}

}  // namespace

EigvecSplit lift_product_eigvec(const Vector& u, double lambda, const Subspace& a,
                                const Subspace& b) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidInput("lift_product_eigvec: lambda must lie in (0,1)");
  check_product_residual(u, lambda, a, b, "lift_product_eigvec");
  EigvecSplit out;
  out.eig_part = project(b, u);
  out.null_part = u - out.eig_part;
  return out;
}

AvgEigvecSplit split_avg_eigvec(const Vector& w, double mu, const Subspace& a,
                                const Subspace& b, double half_tol) {
  if (!(mu > 0.0 && mu < 1.0))
    throw InvalidInput("split_avg_eigvec: mu must lie in (0,1)");
  const double nw = w.norm();
  if (nw == 0.0) throw InvalidInput("split_avg_eigvec: zero vector");
  const Vector image = 0.5 * (project(a, w) + project(b, w));
  if ((image - mu * w).norm() > 1e-8 * nw)
    throw NotAnEigenvector("split_avg_eigvec: eigen-residual exceeds tolerance");

  AvgEigvecSplit out;
  if (std::abs(mu - 0.5) <= half_tol) {
    out.null_part = w;
    out.eig_part = Vector::Zero(w.size());
    return out;
  }
  out.eig_part = project(b, w);
  out.null_part = w - out.eig_part;
  out.lambda_out = (2.0 * mu - 1.0) * (2.0 * mu - 1.0);
  return out;
}

AvgPair avg_pair_from_product_eigvec(const Vector& u, double lambda, const Subspace& a,
                                     const Subspace& b) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidInput("avg_pair_from_product_eigvec: lambda must lie in (0,1)");
  check_product_residual(u, lambda, a, b, "avg_pair_from_product_eigvec");
  const double root = std::sqrt(lambda);
  const Vector pb = project(b, u);
  AvgPair out;
  out.w_minus = 0.5 * u - pb / (2.0 * root);
  out.w_plus = 0.5 * u + pb / (2.0 * root);
  out.mu_minus = 0.5 - 0.5 * root;
  out.mu_plus = 0.5 + 0.5 * root;
  return out;
}

Subspace eigenspace_of(const SymmetricOperator& t, double target, double cluster_tol) {
  const SpectralDecomposition d = eig_sym(t, cluster_tol);
  Matrix basis(t.dim(), 0);
  for (const auto& c : d.clusters) {
    if (near(c.value, target, d.cluster_tol)) {
      Matrix joined(t.dim(), basis.cols() + c.multiplicity);
      joined << basis, c.eigenbasis;
      basis = std::move(joined);
    }
  }
  return Subspace{t.dim(), std::move(basis)};
}

NullspaceReport nullspace_report(const Subspace& a, const Subspace& b, double cluster_tol) {
  if (a.ambient_dim != b.ambient_dim)
    throw InvalidInput("nullspace_report: ambient dimensions differ");

  const Subspace a_perp = complement(a);
  const Subspace b_perp = complement(b);
  const Subspace cap = intersect(a, b);
  const Subspace a_perp_cap_b = intersect(a_perp, b);
  const Subspace a_cap_b_perp = intersect(a, b_perp);
  const Subspace both_perp = intersect(a_perp, b_perp);

  const SymmetricOperator s_ba = symmetrized_product(b, a);   // P_B P_A P_B
  const SymmetricOperator s_ab = symmetrized_product(a, b);   // P_A P_B P_A
  const SymmetricOperator avg = average_projector(a, b);
  const Matrix p_cap = projector(cap).matrix;

  NullspaceReport report;
  auto add = [&](std::string name, const SymmetricOperator& op, double target,
                 const Subspace& formula) {
    NullspaceEntry e;
    e.name = std::move(name);
    e.spectral = eigenspace_of(op, target, cluster_tol);
    e.formula = formula;
    e.dim_spectral = e.spectral.dim();
    e.dim_formula = e.formula.dim();
    e.distance = largest_principal_angle(e.spectral, e.formula);
    report.dims_match = report.dims_match && (e.dim_spectral == e.dim_formula);
    report.max_distance = std::max(report.max_distance, e.distance);
    report.entries.push_back(std::move(e));
  };

  add("N(P_B P_A P_B)", s_ba, 0.0, direct_sum(b_perp, a_perp_cap_b));
  add("N(P_A P_B P_A)", s_ab, 0.0, direct_sum(a_perp, a_cap_b_perp));
  add("N((P_A+P_B)/2)", avg, 0.0, both_perp);
  add("N(1/2 - (P_A+P_B)/2)", avg, 0.5, direct_sum(a_perp_cap_b, a_cap_b_perp));
  add("N(P_B P_A P_B - P_cap)", SymmetricOperator{s_ba.matrix - p_cap}, 0.0,
      direct_sum(direct_sum(b_perp, a_perp_cap_b), cap));
  add("N((P_A+P_B)/2 - P_cap)", SymmetricOperator{avg.matrix - p_cap}, 0.0,
      direct_sum(both_perp, cap));
  return report;
}

CorrespondenceReport eigenvalue_correspondence(const Subspace& a, const Subspace& b,
                                               double cluster_tol) {
  const AngleProfile profile = principal_angles(a, b);
  if (profile.friedrichs_cos <= kRankTol)
    throw OrthogonalSubspaces("eigenvalue_correspondence: cos(theta_F) vanishes");

  const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a), cluster_tol);
  const SpectralDecomposition ds_mirror = eig_sym(symmetrized_product(a, b), cluster_tol);
  const SpectralDecomposition dt = eig_sym(average_projector(a, b), cluster_tol);

  CorrespondenceReport report;
  report.friedrichs = profile.friedrichs_cos;
  report.cluster_tol = std::max({ds.cluster_tol, dt.cluster_tol, ds_mirror.cluster_tol});

  const auto lambdas = nontrivial_clusters(ds, {0.0, 1.0});
  auto mus = nontrivial_clusters(dt, {0.0, 0.5, 1.0});

  constexpr double kMatchTol = 1e-9;
  report.bijection_ok = true;
  auto consume_mu = [&](double target, int mult, double* residual) -> bool {
    int best = -1;
    double best_gap = 1e-6;  // generous search window; residual reported exactly
    for (int j = 0; j < static_cast<int>(mus.size()); ++j) {
      const double gap = std::abs(mus[j].first - target);
      if (gap < best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best < 0 || mus[best].second != mult) return false;
    *residual = best_gap;
    mus.erase(mus.begin() + best);
    return best_gap <= kMatchTol;
  };

  for (const auto& [lambda, mult] : lambdas) {
    MatchedEigenvalue m;
    m.lambda = lambda;
    m.lambda_mult = mult;
    const double root = std::sqrt(std::clamp(lambda, 0.0, 1.0));
    m.mu_minus = 0.5 - 0.5 * root;
    m.mu_plus = 0.5 + 0.5 * root;
    m.mu_minus_mult = m.mu_plus_mult = mult;
    const bool ok_minus = consume_mu(m.mu_minus, mult, &m.residual_minus);
    const bool ok_plus = consume_mu(m.mu_plus, mult, &m.residual_plus);
    report.bijection_ok = report.bijection_ok && ok_minus && ok_plus;
    report.max_residual = std::max({report.max_residual, m.residual_minus, m.residual_plus});
    report.matches.push_back(m);
  }
  // A true bijection consumes every nontrivial mu cluster.
  report.bijection_ok = report.bijection_ok && mus.empty();

  // Extremes of Lambda(T)\{0,1/2,1} against 1/2 pm cos(theta_F)/2.
  const auto mu_all = nontrivial_clusters(dt, {0.0, 0.5, 1.0});
  if (!mu_all.empty()) {
    report.max_mu = mu_all.front().first;
    report.min_mu = mu_all.back().first;
    report.max_mu_residual = std::abs(report.max_mu - (0.5 + 0.5 * profile.friedrichs_cos));
    report.min_mu_residual = std::abs(report.min_mu - (0.5 - 0.5 * profile.friedrichs_cos));
  } else {
    report.bijection_ok = false;
  }

  report.products_agree =
      multisets_match(lambdas, nontrivial_clusters(ds_mirror, {0.0, 1.0}), kMatchTol,
                      &report.products_residual);
  return report;
}

ActiveCorrespondenceReport active_correspondence(const Vector& x, const Subspace& a,
                                                 const Subspace& b, double eps_act,
                                                 double cluster_tol) {
  if (x.size() != a.ambient_dim)
    throw InvalidInput("active_correspondence: dimension mismatch");
  const double nx = x.norm();
  if (nx == 0.0) throw InvalidInput("active_correspondence: zero vector");
  constexpr double kMembershipTol = 1e-10;
  if (membership_residual(a, x) > kMembershipTol && membership_residual(b, x) > kMembershipTol)
    throw PreconditionViolated("active_correspondence: x lies outside A union B");

  const Subspace cap = intersect(a, b);
  const Vector resid = project(a, project(b, x)) - project(cap, x);
  if (resid.norm() <= eps_act * nx)
    throw DegenerateStart("active_correspondence: P_A P_B x = P_cap x");

  const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a), cluster_tol);
  const SpectralDecomposition ds_mirror = eig_sym(symmetrized_product(a, b), cluster_tol);
  const SpectralDecomposition dt = eig_sym(average_projector(a, b), cluster_tol);

  ActiveCorrespondenceReport report;
  report.eps_act = eps_act;
  report.lambda_values = active_values_excluding(active_spectrum(ds, x, eps_act),
                                                 ds.cluster_tol, {0.0, 1.0});
  report.lambda_mirror = active_values_excluding(active_spectrum(ds_mirror, x, eps_act),
                                                 ds_mirror.cluster_tol, {0.0, 1.0});
  report.mu_values = active_values_excluding(active_spectrum(dt, x, eps_act),
                                             dt.cluster_tol, {0.0, 0.5, 1.0});

  std::vector<double> expected_mu;
  for (double lambda : report.lambda_values) {
    const double root = std::sqrt(std::clamp(lambda, 0.0, 1.0));
    expected_mu.push_back(0.5 - 0.5 * root);
    expected_mu.push_back(0.5 + 0.5 * root);
  }
  constexpr double kMatchTol = 1e-9;
  report.mu_matches =
      value_sets_match(expected_mu, report.mu_values, kMatchTol, &report.max_residual);
  report.mirror_matches =
      value_sets_match(report.lambda_values, report.lambda_mirror, kMatchTol,
                       &report.max_residual);
  return report;
}

}  // namespace projlab
