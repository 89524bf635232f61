#include "projlab/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "projlab/angles.hpp"
#include "projlab/parallel.hpp"

namespace projlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::MapWins: return "MAP_WINS";
    case Verdict::MspWins: return "MSP_WINS";
    default: return "TIE";
  }
}

namespace {

// Fills rows, rates and verdict; shared by compare_methods / verify_main2 / sweep.
void run_comparison(ComparisonReport& report, const Subspace& a, const Subspace& b,
                    const Vector& x0, int k_iters, double eps_act, double cluster_tol) {
  RunOptions opts;
  opts.max_iter = k_iters;
  opts.floor = 0.0;  // the per-k table needs every iterate
  opts.record_directions = false;
  const IterationTrace map_trace = run(Method::Map, x0, a, b, opts);
  const IterationTrace msp_trace = run(Method::Msp, x0, a, b, opts);

  report.rows.clear();
  report.dominance_all_map = true;
  report.dominance_all_msp = true;
  for (int k = 1; k <= k_iters; ++k) {
    ComparisonRow row;
    row.k = k;
    row.map_error = k < static_cast<int>(map_trace.errors.size()) ? map_trace.errors[k] : 0.0;
    row.msp_error = k < static_cast<int>(msp_trace.errors.size()) ? msp_trace.errors[k] : 0.0;
    // The tie band is relative to the current error scale: with a zero limit
    // the iterate norms stay accurate in relative terms long after they drop
    // below any absolute threshold.
    const double band = kTieBandRel * std::max(row.map_error, row.msp_error);
    if (row.msp_error - row.map_error > band) {
      row.dominance = +1;
    } else if (row.map_error - row.msp_error > band) {
      row.dominance = -1;
    }
    report.dominance_all_map =
        report.dominance_all_map && row.dominance == +1 && row.map_error > 0.0;
    report.dominance_all_msp =
        report.dominance_all_msp && row.dominance == -1 && row.msp_error > 0.0;
    report.rows.push_back(row);
  }

  const RateReport rates = predicted_rates(x0, a, b, eps_act, cluster_tol);
  report.lambda = rates.predicted_lambda;
  report.mu = rates.predicted_mu;
  if (report.lambda && report.mu)
    report.mu_identity_residual =
        std::abs(*report.mu - (0.5 + 0.5 * std::sqrt(*report.lambda)));

  // Verdict follows the tail of the dominance flags.
  report.verdict = Verdict::Tie;
  if (!report.rows.empty()) {
    const int tail = report.rows.back().dominance;
    if (tail > 0) report.verdict = Verdict::MapWins;
    if (tail < 0) report.verdict = Verdict::MspWins;
  }
}

}  // namespace

ComparisonReport compare_methods(const Subspace& a, const Subspace& b, const Vector& x0,
                                 int k_iters, double eps_act, double cluster_tol) {
  if (k_iters < 1) throw InvalidInput("compare_methods: K must be positive");
  if (x0.size() != a.ambient_dim) throw InvalidInput("compare_methods: dimension mismatch");
  if (x0.norm() == 0.0) throw InvalidInput("compare_methods: zero starting point");

  ComparisonReport report;
  report.d = a.ambient_dim;
  report.start_kind = "explicit";
  report.cos_f = friedrichs_cos(a, b);

  const Vector limit = project(intersect(a, b), x0);
  if ((map_step(x0, a, b) - limit).norm() <= eps_act * x0.norm() &&
      (msp_step(x0, a, b) - limit).norm() <= eps_act * x0.norm()) {
    report.degenerate_start = true;
    return report;
  }
  run_comparison(report, a, b, x0, k_iters, eps_act, cluster_tol);
  return report;
}

ComparisonReport verify_main2(const Subspace& a, const Subspace& b, const Vector& x0,
                              int k_iters, double eps_act, double cluster_tol) {
  if (k_iters < 1) throw InvalidInput("verify_main2: K must be positive");
  if (x0.size() != a.ambient_dim) throw InvalidInput("verify_main2: dimension mismatch");
  const double nx = x0.norm();
  if (nx == 0.0) throw InvalidInput("verify_main2: zero starting point");
  constexpr double kMembershipTol = 1e-10;
  const bool in_a = membership_residual(a, x0) <= kMembershipTol;
  const bool in_b = membership_residual(b, x0) <= kMembershipTol;
  if (!in_a && !in_b)
    throw PreconditionViolated("verify_main2: x0 lies outside A union B");

  const Vector limit = project(intersect(a, b), x0);
  if ((map_step(x0, a, b) - limit).norm() <= eps_act * nx)
    throw DegenerateStart("verify_main2: MAP converges in one step from x0");

  ComparisonReport report;
  report.d = a.ambient_dim;
  report.start_kind = in_a ? "A" : "B";
  report.cos_f = friedrichs_cos(a, b);
  run_comparison(report, a, b, x0, k_iters, eps_act, cluster_tol);
  return report;
}

Vector msp_beats_map_start(const Subspace& a, const Subspace& b, int k_check,
                           double eps_act, double cluster_tol) {
  const double cos_f = friedrichs_cos(a, b);
  if (cos_f <= 0.5 + 1e-9)
    throw NoSuchStart("msp_beats_map_start: requires cos(theta_F) > 1/2");

  const double mu_minus = 0.5 - 0.5 * cos_f;
  const double lambda = cos_f * cos_f;
  const SymmetricOperator avg = average_projector(a, b);
  const SpectralDecomposition dt = eig_sym(avg, cluster_tol);
  const EigenCluster* cluster = dt.find(mu_minus);
  if (cluster == nullptr)
    throw NumericalFailure("msp_beats_map_start: mu_minus eigenspace not found");
  const Vector w = cluster->eigenbasis.col(0);

  // Verified guarantees: active spectra and the exact per-step comparison law.
  const ActiveSpectrum on_avg = active_spectrum(dt, w, eps_act);
  if (on_avg.entries.size() != 1 || std::abs(on_avg.entries[0].value - mu_minus) > 1e-9)
    throw NumericalFailure("msp_beats_map_start: Lambda(w, avg) != {mu_minus}");

  const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a), cluster_tol);
  const ActiveSpectrum on_s = active_spectrum(ds, w, eps_act);
  const bool has_zero = on_s.has(0.0, ds.cluster_tol + 1e-9);
  const bool has_lambda = on_s.has(lambda, 1e-9);
  if (on_s.entries.size() != 2 || !has_zero || !has_lambda)
    throw NumericalFailure("msp_beats_map_start: Lambda(w, P_B P_A P_B) != {0, lambda}");

  Vector x = w;
  double msp_sq = 1.0;  // mu_minus^{2k}, ||w|| = 1
  for (int k = 1; k <= k_check; ++k) {
    x = map_step(x, a, b);
    msp_sq *= mu_minus * mu_minus;
    const double map_sq = std::pow(lambda, 2 * k - 1) * mu_minus;
    const double measured = x.squaredNorm();
    if (std::abs(measured - map_sq) > 1e-9 * map_sq)
      throw NumericalFailure("msp_beats_map_start: closed-form MAP error law failed");
    if (!(map_sq > msp_sq))
      throw NumericalFailure("msp_beats_map_start: MAP error fails to dominate");
  }
  return w;
}

LambdaxCaseReport example_lambdax_case(const Subspace& a, const Subspace& b, double lambda,
                                       double cluster_tol) {
  const SymmetricOperator s_mirror = symmetrized_product(a, b);  // P_A P_B P_A
  const SpectralDecomposition dsm = eig_sym(s_mirror, cluster_tol);
  const EigenCluster* cluster = dsm.find(lambda);
  if (cluster == nullptr || cluster->value <= dsm.cluster_tol ||
      cluster->value >= 1.0 - dsm.cluster_tol)
    throw InvalidInput("example_lambdax_case: lambda is not an eigenvalue in (0,1)");

  const double lam = cluster->value;
  const Vector u = cluster->eigenbasis.col(0);
  const Vector x = u - project(b, u);

  LambdaxCaseReport report;
  report.lambda = lam;
  report.x = x;
  report.norm_x = x.norm();

  const double eps = kEpsAct;
  const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a), cluster_tol);
  const SpectralDecomposition dt = eig_sym(average_projector(a, b), cluster_tol);
  const ActiveSpectrum on_s = active_spectrum(ds, x, eps);
  const ActiveSpectrum on_sm = active_spectrum(dsm, x, eps);
  const ActiveSpectrum on_t = active_spectrum(dt, x, eps);
  report.set_product = on_s.values();
  report.set_product_mirror = on_sm.values();
  report.set_average = on_t.values();

  const double root = std::sqrt(lam);
  const double mu_plus = 0.5 + 0.5 * root;
  const double mu_minus = 0.5 - 0.5 * root;
  auto close = [](const std::vector<double>& got, const std::vector<double>& want,
                  double tol, double* worst) {
    if (got.size() != want.size()) return false;
    std::vector<double> gs = got, ws = want;
    std::sort(gs.begin(), gs.end());
    std::sort(ws.begin(), ws.end());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const double gap = std::abs(gs[i] - ws[i]);
      if (gap > tol) return false;
      *worst = std::max(*worst, gap);
    }
    return true;
  };
  report.sets_ok =
      close(report.set_product, {0.0}, 1e-9, &report.max_residual) &&
      close(report.set_product_mirror, {0.0, lam}, 1e-9, &report.max_residual) &&
      close(report.set_average, {mu_minus, mu_plus}, 1e-9, &report.max_residual);

  // Coefficients of x in the averaged-projector eigencomponents of u.
  const AvgPair pair = avg_pair_from_product_eigvec(u, lam, a, b);
  const Vector proj_plus = eigenspace_projection(dt, mu_plus, x);
  const Vector proj_minus = eigenspace_projection(dt, mu_minus, x);
  report.coef_plus = proj_plus.norm() / pair.w_plus.norm();
  report.coef_minus = proj_minus.norm() / pair.w_minus.norm();
  return report;
}

namespace {

void validate_sweep_spec(const SweepSpec& spec) {
  if (spec.d < 1) throw InvalidInput("sweep: d must be positive");
  if (spec.angle_sets.empty() || spec.starts.empty() || spec.seeds.empty())
    throw InvalidInput("sweep: empty grid");
  if (spec.k_iters < 1) throw InvalidInput("sweep: K must be positive");
  for (const auto& start : spec.starts) {
    if (start != "A" && start != "B" && start != "mu_minus" && start != "random")
      throw InvalidInput("sweep: unknown start kind '" + start + "'");
  }
  for (const auto& angles : spec.angle_sets) {
    if (angles.empty()) throw InvalidInput("sweep: empty angle set");
    int need = static_cast<int>(angles.size());
    for (double t : angles) {
      if (t > 0.0) ++need;
    }
    if (spec.d < need) throw InvalidInput("sweep: angle set needs a larger d");
  }
}

ComparisonReport sweep_cell(const SweepSpec& spec, const std::vector<double>& angles,
                            const std::string& start_kind, std::uint64_t seed,
                            double eps_act, double cluster_tol) {
  const auto [a, b] = subspaces_with_angles(spec.d, angles, seed);

  ComparisonReport report;
  report.d = spec.d;
  report.requested_angles = angles;
  report.seed = seed;
  report.start_kind = start_kind;
  report.cos_f = friedrichs_cos(a, b);

  Vector x0;
  if (start_kind == "A") {
    x0 = random_unit_in(a, mix_seed(seed, 1));
  } else if (start_kind == "B") {
    x0 = random_unit_in(b, mix_seed(seed, 2));
  } else if (start_kind == "random") {
    x0 = random_unit_vector(spec.d, mix_seed(seed, 3));
  } else {  // mu_minus
    try {
      x0 = msp_beats_map_start(a, b, spec.k_iters, eps_act, cluster_tol);
    } catch (const NoSuchStart&) {
      // cos(theta_F) <= 1/2: the counterexample start does not exist; fall
      // back to an A-start, where the MAP provably wins.
      report.no_such_start = true;
      x0 = random_unit_in(a, mix_seed(seed, 1));
    }
  }

  const Vector limit = project(intersect(a, b), x0);
  const double nx = x0.norm();
  if ((map_step(x0, a, b) - limit).norm() <= eps_act * nx &&
      (msp_step(x0, a, b) - limit).norm() <= eps_act * nx) {
    report.degenerate_start = true;
    return report;
  }
  run_comparison(report, a, b, x0, spec.k_iters, eps_act, cluster_tol);
  return report;
}

}  // namespace

std::vector<ComparisonReport> sweep(const SweepSpec& spec, int jobs, double eps_act,
                                    double cluster_tol) {
  validate_sweep_spec(spec);

  struct Cell {
    const std::vector<double>* angles;
    const std::string* start;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& angles : spec.angle_sets)
    for (const auto& start : spec.starts)
      for (const auto seed : spec.seeds) cells.push_back({&angles, &start, seed});

  std::vector<ComparisonReport> reports(cells.size());
  parallel_for(static_cast<std::int64_t>(cells.size()), jobs, [&](std::int64_t i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    reports[static_cast<std::size_t>(i)] =
        sweep_cell(spec, *c.angles, *c.start, c.seed, eps_act, cluster_tol);
  });
  return reports;
}

}  // namespace projlab
