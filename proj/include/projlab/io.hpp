#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "projlab/angles.hpp"
#include "projlab/dynamics.hpp"
#include "projlab/scenarios.hpp"
#include "projlab/spectral.hpp"

namespace projlab {

using Json = nlohmann::json;

/// %.17g rendering: lossless double -> decimal -> double round trip.
std::string format_double(double x);

/// {"d": int, "basis": [k*d doubles]} with the k basis vectors concatenated,
/// each of length d.
Json to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j);

Json to_json(const AngleProfile& profile);
Json to_json(const SpectralDecomposition& d);
Json to_json(const ActiveSpectrum& spec);
Json to_json(const RateReport& report);
Json to_json(const NullspaceReport& report);
Json to_json(const CorrespondenceReport& report);
Json to_json(const ActiveCorrespondenceReport& report);
Json to_json(const LambdaxCaseReport& report);
Json to_json(const ComparisonReport& report);

/// CSV with header `k,error,ratio,method`; the ratio column is empty at k=0
/// and wherever undefined.
std::string trace_to_csv(const IterationTrace& trace);

/// CSV summary with header `cos_f,start_kind,verdict,lambda,mu`.
std::string sweep_summary_csv(const std::vector<ComparisonReport>& reports);

SweepSpec sweep_spec_from_json(const Json& j);

/// Write-temp-then-rename, so partial output never lands at `path`.
void atomic_write_file(const std::string& path, const std::string& content);

/// Instance generator: d, principal angles (radians) and a seed.
struct GeneratorSpec {
  int d = 0;
  std::vector<double> angles;
  std::uint64_t seed = 0;
};

/// Parsed CLI/experiment configuration. Exactly one instance source is set.
struct RunConfig {
  std::optional<std::pair<Subspace, Subspace>> inline_instance;
  std::optional<GeneratorSpec> generator;
  std::string start_kind = "A";  // "A" | "B" | "mu_minus" | "random" | "explicit"
  std::optional<Vector> start_vector;
  std::string method = "both";  // "map" | "msp" | "both"
  int max_iter = 200;
  double floor = kDefaultFloor;
  double cluster_tol = kClusterTolRel;
  double eps_act = kEpsAct;
  int k_iters = 30;
  std::optional<std::uint64_t> seed;
  std::optional<SweepSpec> sweep_spec;
};

RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);

/// Materializes the configured instance (inline bases win over generator).
std::pair<Subspace, Subspace> resolve_instance(const RunConfig& config);

/// Builds the configured start vector; may throw NoSuchStart for mu_minus.
Vector resolve_start(const RunConfig& config, const Subspace& a, const Subspace& b);

}  // namespace projlab
