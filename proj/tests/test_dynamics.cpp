#include <doctest.h>

#include <cmath>

#include "projlab/angles.hpp"
#include "projlab/dynamics.hpp"
#include "test_support.hpp"

using namespace projlab;
using namespace testsupport;

TEST_SUITE("dynamics") {

TEST_CASE("map_step fixes A cap B and contracts the plane fixture") {
  const auto [a3, b3] = pair3d();
  Vector e3(3);
  e3 << 0, 0, 1;
  CHECK((map_step(e3, a3, b3) - e3).norm() < 1e-14);

  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  CHECK((map_step(e1, a, b) - 0.36 * e1).norm() < 1e-14);

  const auto [ol_a, ol_b] = orthogonal_lines();
  Vector e2(2);
  e2 << 0, 1;
  CHECK(map_step(e2, ol_a, ol_b).norm() == 0.0);
}

TEST_CASE("msp_step averages the projections") {
  const auto [a3, b3] = pair3d();
  Vector e3(3);
  e3 << 0, 0, 1;
  CHECK((msp_step(e3, a3, b3) - e3).norm() < 1e-14);

  const auto [a, b] = plane_pair();
  Vector e1(2), expected(2);
  e1 << 1, 0;
  expected << 0.68, 0.24;  // (e1 + (0.36, 0.48)) / 2
  CHECK((msp_step(e1, a, b) - expected).norm() < 1e-14);

  Matrix ma(3, 1), mb(3, 1);
  ma << 1, 0, 0;
  mb << 0, 1, 0;
  Vector e3b(3);
  e3b << 0, 0, 1;  // in A^perp cap B^perp
  CHECK(msp_step(e3b, Subspace{3, ma}, Subspace{3, mb}).norm() == 0.0);
}

TEST_CASE("MAP trace from e1 follows the geometric law 0.36^k") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  const IterationTrace trace = run(Method::Map, e1, a, b, {.max_iter = 40});
  CHECK(trace.stopped_reason == StopReason::Floor);
  for (std::size_t k = 0; k < trace.errors.size(); ++k) {
    const double expected = std::pow(0.36, static_cast<double>(k));
    CHECK(std::abs(trace.errors[k] - expected) <= 1e-12 * expected);
  }
  for (const auto& ratio : trace.ratios) {
    REQUIRE(ratio.has_value());
    CHECK(*ratio == doctest::Approx(0.36).epsilon(1e-12));
  }
}

TEST_CASE("MSP trace from e1 follows the two-term closed form") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  const IterationTrace trace = run(Method::Msp, e1, a, b, {.max_iter = 30});
  CHECK(trace.stopped_reason == StopReason::Budget);
  // Oracle: e_k^2 = 0.8^{2k+1} + 0.2^{2k+1}.
  for (std::size_t k = 1; k < trace.errors.size(); ++k) {
    const double expected = msp_error_single_angle(0.6, static_cast<int>(k));
    CHECK(std::abs(trace.errors[k] - expected) <= 1e-12 * expected);
  }
  CHECK(trace.errors[1] == doctest::Approx(std::sqrt(0.52)).epsilon(1e-14));
}

TEST_CASE("one-step convergence is detected") {
  const auto [ol_a, ol_b] = orthogonal_lines();
  Vector e2(2);
  e2 << 0, 1;
  const IterationTrace trace = run(Method::Map, e2, ol_a, ol_b);
  CHECK(trace.stopped_reason == StopReason::ConvergedOneStep);
  CHECK(trace.errors.size() == 2);
  CHECK(trace.errors[1] == 0.0);
}

TEST_CASE("errors decrease strictly and ratios stay in (0,1)") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto angles = random_angle_set(mix_seed(seed, 701), {.max_angles = 3});
    const int d = min_dimension(angles) + 1;
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 702));
    const Vector x0 = random_unit_vector(d, mix_seed(seed, 703));
    for (Method m : {Method::Map, Method::Msp}) {
      const IterationTrace trace = run(m, x0, a, b, {.max_iter = 60});
      for (std::size_t k = 0; k + 1 < trace.errors.size(); ++k) {
        if (trace.errors[k + 1] >= trace.floor_abs)
          CHECK(trace.errors[k + 1] < trace.errors[k]);
      }
      for (const auto& ratio : trace.ratios) {
        if (ratio.has_value()) {
          CHECK(*ratio > 0.0);
          CHECK(*ratio < 1.0);
        }
      }
    }
  }
}

TEST_CASE("predicted rates on the plane fixture") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  const RateReport from_e1 = predicted_rates(e1, a, b);
  REQUIRE(from_e1.predicted_lambda.has_value());
  REQUIRE(from_e1.predicted_mu.has_value());
  CHECK(*from_e1.predicted_lambda == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(*from_e1.predicted_mu == doctest::Approx(0.8).epsilon(1e-12));

  Vector w(2);
  w << 1, -2;
  w /= std::sqrt(5.0);
  const RateReport from_w = predicted_rates(w, a, b);
  CHECK(*from_w.predicted_lambda == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(*from_w.predicted_mu == doctest::Approx(0.2).epsilon(1e-12));

  const auto [a3, b3] = pair3d();
  Vector e3(3);
  e3 << 0, 0, 1;
  const RateReport degenerate = predicted_rates(e3, a3, b3);
  CHECK(degenerate.map_degenerate);
  CHECK(degenerate.msp_degenerate);
  CHECK(!degenerate.predicted_lambda.has_value());
  CHECK(!degenerate.predicted_mu.has_value());
}

TEST_CASE("rate report invariants against the Friedrichs bound") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto angles = random_angle_set(mix_seed(seed, 711), {.max_angles = 4});
    const int d = min_dimension(angles) + 2;
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 712));
    const double cos_f = friedrichs_cos(a, b);
    const Vector x0 = random_unit_vector(d, mix_seed(seed, 713));
    const RateReport rates = predicted_rates(x0, a, b);
    if (rates.predicted_lambda)
      CHECK(*rates.predicted_lambda <= cos_f * cos_f + 1e-9);
    if (rates.predicted_mu)
      CHECK(std::abs(*rates.predicted_mu - 0.5) <= 0.5 * cos_f + 1e-9);
  }
}

TEST_CASE("estimate_q_rate recovers geometric and dominant rates") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  const IterationTrace map_trace = run(Method::Map, e1, a, b, {.max_iter = 40});
  const QRateEstimate map_est = estimate_q_rate(map_trace);
  CHECK(std::abs(map_est.rate - 0.36) <= 1e-12);
  CHECK(map_est.max_deviation <= 1e-12);

  const IterationTrace msp_trace = run(Method::Msp, e1, a, b, {.max_iter = 30});
  const QRateEstimate msp_est = estimate_q_rate(msp_trace);
  CHECK(std::abs(msp_est.rate - 0.8) <= 1e-6);

  // One-step traces carry no usable ratio tail.
  const auto [ol_a, ol_b] = orthogonal_lines();
  Vector e2(2);
  e2 << 0, 1;
  const IterationTrace one_step = run(Method::Map, e2, ol_a, ol_b);
  CHECK_THROWS_AS(estimate_q_rate(one_step), InsufficientData);
}

TEST_CASE("operator error norms match the angle-power laws") {
  const auto [a, b] = plane_pair();
  const OperatorErrorNorms norms = operator_error_norms(a, b, 2);
  // k = 1: (0.6, 0.8); independent oracle via power iteration.
  const Matrix diff = projector(a).matrix * projector(b).matrix;  // P_cap = 0
  CHECK(norms.map_norms[0] == doctest::Approx(power_iteration_norm(diff)).epsilon(1e-10));
  CHECK(norms.map_norms[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(norms.msp_norms[0] == doctest::Approx(0.8).epsilon(1e-12));
  // k = 2: 0.6^3 and 0.8^2.
  CHECK(norms.map_norms[1] == doctest::Approx(0.216).epsilon(1e-12));
  CHECK(norms.msp_norms[1] == doctest::Approx(0.64).epsilon(1e-12));

  const auto [ol_a, ol_b] = orthogonal_lines();
  const OperatorErrorNorms orth = operator_error_norms(ol_a, ol_b, 1);
  CHECK(orth.map_norms[0] < 1e-14);
  CHECK(orth.msp_norms[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("per-step rate inequalities hold on random instances") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100 && seed < 200; ++seed) {
    AngleSetOptions opt;
    opt.max_angles = 4;
    opt.min_cos = 0.05;
    opt.max_cos = 0.95;
    opt.zero_angles = static_cast<int>(seed % 2);
    const auto angles = random_angle_set(mix_seed(seed, 721), opt);
    const int d = std::min(50, min_dimension(angles) + static_cast<int>(seed % 6));
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 722));
    const Vector x0 = random_unit_vector(d, mix_seed(seed, 723));
    const RateReport rates = predicted_rates(x0, a, b);
    if (!rates.predicted_lambda || !rates.predicted_mu) continue;
    ++checked;

    const double lambda = *rates.predicted_lambda;
    const double mu = *rates.predicted_mu;
    const double cos_f = friedrichs_cos(a, b);
    const double mu_bound = 0.5 + 0.5 * cos_f;

    // The inequalities are asserted while the trailing error is above the
    // floor, matching the trace's own monotonicity contract.
    const IterationTrace map_trace = run(Method::Map, x0, a, b, {.max_iter = 30});
    for (std::size_t k = 0; k + 1 < map_trace.errors.size(); ++k) {
      if (map_trace.errors[k + 1] < map_trace.floor_abs) break;
      const double bound = (k == 0) ? std::sqrt(lambda) : lambda;
      CHECK(map_trace.errors[k + 1] <= bound * map_trace.errors[k] * (1.0 + 1e-10));
      const double fried = (k == 0) ? cos_f : cos_f * cos_f;
      CHECK(map_trace.errors[k + 1] <= fried * map_trace.errors[k] * (1.0 + 1e-10));
    }
    const IterationTrace msp_trace = run(Method::Msp, x0, a, b, {.max_iter = 30});
    for (std::size_t k = 0; k + 1 < msp_trace.errors.size(); ++k) {
      if (msp_trace.errors[k + 1] < msp_trace.floor_abs) break;
      CHECK(msp_trace.errors[k + 1] <= mu * msp_trace.errors[k] * (1.0 + 1e-10));
      CHECK(msp_trace.errors[k + 1] <= mu_bound * msp_trace.errors[k] * (1.0 + 1e-10));
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("consecutive ratios converge to the predicted rate") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AngleSetOptions opt;
    opt.max_angles = 3;
    opt.separation = 0.15;  // keep the active eigenvalues well separated
    const auto angles = random_angle_set(mix_seed(seed, 731), opt);
    const int d = min_dimension(angles) + 1;
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 732));
    const Vector x0 = random_unit_vector(d, mix_seed(seed, 733));
    const RateReport rates = predicted_rates(x0, a, b);
    if (!rates.predicted_lambda || !rates.predicted_mu) continue;

    const IterationTrace map_trace = run(Method::Map, x0, a, b, {.max_iter = 200});
    bool map_converged = false;
    for (const auto& ratio : map_trace.ratios) {
      if (ratio && std::abs(*ratio - *rates.predicted_lambda) < 1e-6) map_converged = true;
    }
    CHECK(map_converged);

    const IterationTrace msp_trace = run(Method::Msp, x0, a, b, {.max_iter = 200});
    bool msp_converged = false;
    for (const auto& ratio : msp_trace.ratios) {
      if (ratio && std::abs(*ratio - *rates.predicted_mu) < 1e-6) msp_converged = true;
    }
    CHECK(msp_converged);
  }
}

TEST_CASE("closed-form error laws for starts in A, in B, and anywhere") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto angles = random_angle_set(mix_seed(seed, 741),
                                         {.max_angles = 3, .zero_angles = static_cast<int>(seed % 2)});
    const int d = min_dimension(angles) + 2;
    const auto [a, b] = subspaces_with_angles(d, angles, mix_seed(seed, 742));

    const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a));
    const SpectralDecomposition dsm = eig_sym(symmetrized_product(a, b));
    const SpectralDecomposition dt = eig_sym(average_projector(a, b));

    auto sum_law = [](const SpectralDecomposition& dec, const Vector& x, int k,
                      int exponent_offset) {
      // sum of value^{2k + offset} * ||projection||^2 over clusters in (0, 1).
      double total = 0.0;
      for (const auto& c : dec.clusters) {
        if (c.value <= dec.cluster_tol || c.value >= 1.0 - dec.cluster_tol) continue;
        const double pn = (c.eigenbasis.transpose() * x).squaredNorm();
        total += std::pow(c.value, 2 * k + exponent_offset) * pn;
      }
      return std::sqrt(total);
    };

    const Vector xa = random_unit_in(a, mix_seed(seed, 743));
    const IterationTrace map_a = run(Method::Map, xa, a, b, {.max_iter = 15, .floor = 0.0});
    for (int k = 1; k < static_cast<int>(map_a.errors.size()); ++k) {
      const double expected = sum_law(dsm, xa, k, 0);  // lambda^{2k} ||u_lambda||^2
      if (expected > 1e-12)
        CHECK(std::abs(map_a.errors[k] - expected) <= 1e-9 * expected);
    }

    const Vector xb = random_unit_in(b, mix_seed(seed, 744));
    const IterationTrace map_b = run(Method::Map, xb, a, b, {.max_iter = 15, .floor = 0.0});
    for (int k = 1; k < static_cast<int>(map_b.errors.size()); ++k) {
      const double expected = sum_law(ds, xb, k, -1);  // lambda^{2k-1} ||v_lambda||^2
      if (expected > 1e-12)
        CHECK(std::abs(map_b.errors[k] - expected) <= 1e-9 * expected);
    }

    const Vector xr = random_unit_vector(d, mix_seed(seed, 745));
    const IterationTrace msp_r = run(Method::Msp, xr, a, b, {.max_iter = 15, .floor = 0.0});
    for (int k = 1; k < static_cast<int>(msp_r.errors.size()); ++k) {
      const double expected = sum_law(dt, xr, k, 0);  // mu^{2k} ||w_mu||^2
      if (expected > 1e-12)
        CHECK(std::abs(msp_r.errors[k] - expected) <= 1e-9 * expected);
    }
  }
}

TEST_CASE("direction limits match the achieving eigencomponents") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;

  const IterationTrace map_trace = run(Method::Map, e1, a, b, {.max_iter = 30});
  const DirectionLimit map_limit = direction_limit(map_trace, e1, a, b);
  CHECK((map_limit.predicted - e1).norm() < 1e-10);
  CHECK(map_limit.angle_between <= 1e-5);

  const IterationTrace msp_trace = run(Method::Msp, e1, a, b, {.max_iter = 60});
  const DirectionLimit msp_limit = direction_limit(msp_trace, e1, a, b);
  Vector expected(2);
  expected << 0.8, 0.4;
  expected.normalize();
  CHECK((msp_limit.predicted - expected).norm() < 1e-10);
  CHECK(msp_limit.angle_between <= 1e-5);
}

TEST_CASE("direction limit is not applicable from the intersection") {
  const auto [a3, b3] = pair3d();
  Vector e3(3);
  e3 << 0, 0, 1;
  const IterationTrace trace = run(Method::Msp, e3, a3, b3);
  CHECK_THROWS_AS(direction_limit(trace, e3, a3, b3), NotApplicable);
}

TEST_CASE("short traces cannot support a direction limit") {
  const auto [a, b] = plane_pair();
  Vector e1(2);
  e1 << 1, 0;
  const IterationTrace trace = run(Method::Map, e1, a, b, {.max_iter = 3});
  CHECK_THROWS_AS(direction_limit(trace, e1, a, b), InsufficientData);
}

}  // TEST_SUITE
