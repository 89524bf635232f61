// projlab: command-line laboratory for the MAP/MSP projection methods on a
// pair of subspaces. Subcommands: gen, angles, spectrum, run, compare,
// verify, sweep. Exit codes: 0 success, 1 verification failure, 2 invalid
// input, 3 degenerate start.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "projlab/io.hpp"
#include "projlab/parallel.hpp"

namespace {

using namespace projlab;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitDegenerateStart = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<double> floor;
  std::optional<double> cluster_tol;
  std::optional<double> eps_act;
  int jobs = 1;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON configuration file");
  cmd->add_option("--out", opt.out_dir, "Output directory (files written atomically)");
  cmd->add_option("--seed", opt.seed, "Seed override (beats PROJLAB_SEED and config)");
  cmd->add_option("--jobs", opt.jobs, "Worker threads for sweep cells (0 = all)");
  cmd->add_option("--max-iter", opt.max_iter, "Iteration budget");
  cmd->add_option("--floor", opt.floor, "Relative error floor");
  cmd->add_option("--cluster-tol", opt.cluster_tol, "Eigenvalue cluster tolerance");
  cmd->add_option("--eps-act", opt.eps_act, "Active-spectrum threshold");
}

RunConfig make_config(const CliOptions& opt) {
  RunConfig config = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  if (const char* env = std::getenv("PROJLAB_SEED")) {
    char* end = nullptr;
    const auto value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw InvalidInput("PROJLAB_SEED is not an integer");
    config.seed = value;
  }
  if (opt.seed) config.seed = *opt.seed;
  if (opt.max_iter) config.max_iter = *opt.max_iter;
  if (opt.floor) config.floor = *opt.floor;
  if (opt.cluster_tol) config.cluster_tol = *opt.cluster_tol;
  if (opt.eps_act) config.eps_act = *opt.eps_act;
  if (config.max_iter < 1 || config.cluster_tol <= 0 || config.eps_act <= 0 ||
      config.floor < 0)
    throw InvalidInput("invalid tolerance or budget override");
  return config;
}

void emit(const CliOptions& opt, const std::string& filename, const std::string& content) {
  if (opt.out_dir.empty()) return;
  const auto path = std::filesystem::path(opt.out_dir) / filename;
  atomic_write_file(path.string(), content);
}

int cmd_gen(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  if (!config.generator) throw InvalidInput("gen: config must carry a generator instance");
  const auto [a, b] = resolve_instance(config);
  const AngleProfile profile = principal_angles(a, b);

  Json out;
  out["instance"] = Json{{"A", to_json(a)}, {"B", to_json(b)}};
  out["meta"] = Json{{"d", a.ambient_dim},
                     {"seed", config.seed.value_or(config.generator->seed)},
                     {"requested_angles", config.generator->angles},
                     {"cosines", profile.cosines},
                     {"friedrichs_cos", profile.friedrichs_cos}};
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "instance.json", text);
  return kExitOk;
}

int cmd_angles(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  const auto [a, b] = resolve_instance(config);
  const Json out = to_json(principal_angles(a, b));
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "angles.json", text);
  return kExitOk;
}

int cmd_spectrum(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  const auto [a, b] = resolve_instance(config);
  const SpectralDecomposition ds = eig_sym(symmetrized_product(b, a), config.cluster_tol);
  const SpectralDecomposition dsm = eig_sym(symmetrized_product(a, b), config.cluster_tol);
  const SpectralDecomposition dt = eig_sym(average_projector(a, b), config.cluster_tol);

  Json out;
  out["product_BAB"] = to_json(ds);
  out["product_ABA"] = to_json(dsm);
  out["average"] = to_json(dt);
  try {
    const Vector x0 = resolve_start(config, a, b);
    out["start"] = std::vector<double>(x0.data(), x0.data() + x0.size());
    out["active_BAB"] = to_json(active_spectrum(ds, x0, config.eps_act));
    out["active_ABA"] = to_json(active_spectrum(dsm, x0, config.eps_act));
    out["active_average"] = to_json(active_spectrum(dt, x0, config.eps_act));
  } catch (const NoSuchStart&) {
    out["start"] = nullptr;
  }
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "spectrum.json", text);
  return kExitOk;
}

const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::Floor: return "floor";
    default: return "converged_one_step";
  }
}

int cmd_run(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  const auto [a, b] = resolve_instance(config);
  const Vector x0 = resolve_start(config, a, b);

  RateReport rates = predicted_rates(x0, a, b, config.eps_act, config.cluster_tol);

  // A start sitting on its own best approximation leaves nothing to iterate;
  // one-step convergence from elsewhere is a successful run.
  const Vector limit = project(intersect(a, b), x0);
  if ((x0 - limit).norm() <= 1e-12 * x0.norm()) {
    Json out;
    out["rate_report"] = to_json(rates);
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    emit(opt, "rate_report.json", text);
    return kExitDegenerateStart;
  }

  const bool want_map = config.method != "msp";
  const bool want_msp = config.method != "map";

  RunOptions run_opts;
  run_opts.max_iter = config.max_iter;
  run_opts.floor = config.floor;

  Json out;
  if (want_map) {
    const IterationTrace trace = run(Method::Map, x0, a, b, run_opts);
    try {
      const QRateEstimate est = estimate_q_rate(trace);
      rates.empirical_lambda = est.rate;
      if (rates.predicted_lambda)
        rates.lambda_agreement = std::abs(est.rate - *rates.predicted_lambda);
    } catch (const InsufficientData&) {
    }
    out["map"] = Json{{"stopped_reason", stop_reason_name(trace.stopped_reason)},
                      {"iterations", trace.errors.size() - 1}};
    emit(opt, "trace_map.csv", trace_to_csv(trace));
  }
  if (want_msp) {
    const IterationTrace trace = run(Method::Msp, x0, a, b, run_opts);
    try {
      const QRateEstimate est = estimate_q_rate(trace);
      rates.empirical_mu = est.rate;
      if (rates.predicted_mu)
        rates.mu_agreement = std::abs(est.rate - *rates.predicted_mu);
    } catch (const InsufficientData&) {
    }
    out["msp"] = Json{{"stopped_reason", stop_reason_name(trace.stopped_reason)},
                      {"iterations", trace.errors.size() - 1}};
    emit(opt, "trace_msp.csv", trace_to_csv(trace));
  }
  out["rate_report"] = to_json(rates);
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "rate_report.json", text);
  return kExitOk;
}

int cmd_compare(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  const auto [a, b] = resolve_instance(config);

  Vector x0;
  bool no_such_start = false;
  try {
    x0 = resolve_start(config, a, b);
  } catch (const NoSuchStart&) {
    no_such_start = true;
    const std::uint64_t seed = config.seed.value_or(config.generator ? config.generator->seed : 0);
    x0 = random_unit_in(a, mix_seed(seed, 1));
  }

  ComparisonReport report =
      compare_methods(a, b, x0, config.k_iters, config.eps_act, config.cluster_tol);
  report.start_kind = config.start_kind;
  report.no_such_start = no_such_start;
  if (config.generator) {
    report.requested_angles = config.generator->angles;
    report.seed = config.seed.value_or(config.generator->seed);
  }

  Json out = to_json(report);
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "compare.json", text);
  if (!report.rows.empty()) {
    std::string csv = "k,map_error,msp_error,dominance\n";
    for (const auto& row : report.rows) {
      csv += std::to_string(row.k) + ',' + format_double(row.map_error) + ',' +
             format_double(row.msp_error) + ',' + std::to_string(row.dominance) + '\n';
    }
    emit(opt, "compare.csv", csv);
  }
  return report.degenerate_start ? kExitDegenerateStart : kExitOk;
}

struct LawResult {
  std::string name;
  bool pass = false;
  bool skipped = false;
  double max_residual = 0.0;
  std::string note;
};

int cmd_verify(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  const auto [a, b] = resolve_instance(config);
  const std::uint64_t seed = config.seed.value_or(config.generator ? config.generator->seed : 0);
  std::vector<LawResult> laws;

  // Operator-norm rate laws, k = 1..8.
  {
    const AngleProfile profile = principal_angles(a, b);
    LawResult map_law{.name = "operator_norm_map"};
    LawResult msp_law{.name = "operator_norm_msp"};
    if (profile.degenerate_nested && a.dim() == b.dim()) {
      // A = B: the Friedrichs maximum runs over an empty set and the rate
      // laws' premise fails (the averaged operator has no 1/2-eigenspace).
      map_law.pass = msp_law.pass = true;
      map_law.skipped = msp_law.skipped = true;
      map_law.note = msp_law.note = "identical subspaces: rate laws not applicable";
    } else {
      const OperatorErrorNorms norms = operator_error_norms(a, b, 8);
      for (int k = 1; k <= 8; ++k) {
        map_law.max_residual =
            std::max(map_law.max_residual,
                     std::abs(norms.map_norms[k - 1] -
                              std::pow(profile.friedrichs_cos, 2 * k - 1)));
        msp_law.max_residual =
            std::max(msp_law.max_residual,
                     std::abs(norms.msp_norms[k - 1] -
                              std::pow(0.5 + 0.5 * profile.friedrichs_cos, k)));
      }
      map_law.pass = map_law.max_residual <= 1e-8;
      msp_law.pass = msp_law.max_residual <= 1e-8;
    }
    laws.push_back(map_law);
    laws.push_back(msp_law);
  }

  // Nullspace characterizations, spectral vs direct-sum formulas.
  {
    const NullspaceReport report = nullspace_report(a, b, config.cluster_tol);
    laws.push_back({"nullspace_characterizations",
                    report.dims_match && report.max_distance <= 1e-7, false,
                    report.max_distance, ""});
  }

  // Eigenvalue correspondence with multiplicity.
  {
    LawResult law{.name = "eigenvalue_correspondence"};
    try {
      const CorrespondenceReport report =
          eigenvalue_correspondence(a, b, config.cluster_tol);
      law.max_residual = std::max({report.max_residual, report.max_mu_residual,
                                   report.min_mu_residual, report.products_residual});
      law.pass = report.bijection_ok && report.products_agree && law.max_residual <= 1e-9;
    } catch (const OrthogonalSubspaces&) {
      law.pass = true;
      law.skipped = true;
      law.note = "orthogonal subspaces: correspondence not applicable";
    }
    laws.push_back(law);
  }

  // A start in A union B for the per-trajectory laws.
  const Vector start_ab = random_unit_in(a, mix_seed(seed, 1));

  // Active-spectrum correspondence.
  {
    LawResult law{.name = "active_correspondence"};
    try {
      const ActiveCorrespondenceReport report =
          active_correspondence(start_ab, a, b, config.eps_act, config.cluster_tol);
      law.max_residual = report.max_residual;
      law.pass = report.mu_matches && report.mirror_matches;
    } catch (const DegenerateStart&) {
      law.pass = true;
      law.skipped = true;
      law.note = "degenerate start: active correspondence not applicable";
    }
    laws.push_back(law);
  }

  // Error dominance for starts in A union B.
  {
    LawResult law{.name = "main2_dominance"};
    try {
      const ComparisonReport report =
          verify_main2(a, b, start_ab, config.k_iters, config.eps_act, config.cluster_tol);
      law.max_residual = report.mu_identity_residual.value_or(0.0);
      law.pass = report.dominance_all_map && report.verdict == Verdict::MapWins &&
                 report.mu_identity_residual && *report.mu_identity_residual <= 1e-9;
    } catch (const DegenerateStart&) {
      law.pass = true;
      law.skipped = true;
      law.note = "one-step start: dominance not applicable";
    }
    laws.push_back(law);
  }

  // The mu_minus counterexample start (exists only for cos(theta_F) > 1/2).
  {
    LawResult law{.name = "msp_beats_map_start"};
    try {
      const Vector w = msp_beats_map_start(a, b, config.k_iters, config.eps_act,
                                           config.cluster_tol);
      const ComparisonReport report =
          compare_methods(a, b, w, config.k_iters, config.eps_act, config.cluster_tol);
      law.pass = report.dominance_all_msp && report.verdict == Verdict::MspWins;
    } catch (const NoSuchStart&) {
      law.pass = true;
      law.skipped = true;
      law.note = "cos(theta_F) <= 1/2: no counterexample start in this region";
    }
    laws.push_back(law);
  }

  Json out;
  Json law_json = Json::array();
  bool all_pass = true;
  for (const auto& law : laws) {
    all_pass = all_pass && law.pass;
    law_json.push_back({{"name", law.name},
                        {"pass", law.pass},
                        {"skipped", law.skipped},
                        {"max_residual", law.max_residual},
                        {"note", law.note}});
  }
  out["laws"] = std::move(law_json);
  out["all_pass"] = all_pass;
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  emit(opt, "verify.json", text);
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const CliOptions& opt) {
  const RunConfig config = make_config(opt);
  if (!config.sweep_spec) throw InvalidInput("sweep: config must carry a sweep spec");
  const std::vector<ComparisonReport> reports =
      sweep(*config.sweep_spec, opt.jobs, config.eps_act, config.cluster_tol);

  Json out = Json::array();
  for (const auto& report : reports) out.push_back(to_json(report));
  const std::string text = out.dump(2) + "\n";
  const std::string csv = sweep_summary_csv(reports);
  std::cout << csv;
  emit(opt, "sweep_reports.json", text);
  emit(opt, "sweep_summary.csv", csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for alternating and simultaneous projections"};
  app.require_subcommand(1);

  CliOptions opt;
  auto* gen = app.add_subcommand("gen", "Generate an instance and emit its bases as JSON");
  auto* angles = app.add_subcommand("angles", "Principal/Dixmier/Friedrichs angle profile");
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue clusters of the key operators");
  auto* run_cmd = app.add_subcommand("run", "Run MAP/MSP, emit trace CSV and a rate report");
  auto* compare = app.add_subcommand("compare", "Head-to-head MAP vs MSP from one start");
  auto* verify = app.add_subcommand("verify", "Run the verification suite on an instance");
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid of comparisons over angles/starts/seeds");
  for (auto* cmd : {gen, angles, spectrum, run_cmd, compare, verify, sweep_cmd})
    add_common_flags(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt);
    if (angles->parsed()) return cmd_angles(opt);
    if (spectrum->parsed()) return cmd_spectrum(opt);
    if (run_cmd->parsed()) return cmd_run(opt);
    if (compare->parsed()) return cmd_compare(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const DegenerateStart& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerateStart;
  } catch (const NoSuchStart& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  return kExitInvalidInput;
}
