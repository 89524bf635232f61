#include "projlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace projlab {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json to_json(const Subspace& s) {
  Json j;
  j["d"] = s.ambient_dim;
  Json basis = Json::array();
  for (int col = 0; col < s.dim(); ++col)
    for (int row = 0; row < s.ambient_dim; ++row) basis.push_back(s.basis(row, col));
  j["basis"] = std::move(basis);
  return j;
}

Subspace subspace_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("basis"))
    throw InvalidInput("subspace: expected {\"d\": int, \"basis\": [...]}");
  const int d = j.at("d").get<int>();
  if (d < 1) throw InvalidInput("subspace: d must be positive");
  const auto& flat = j.at("basis");
  if (!flat.is_array() || flat.size() % static_cast<std::size_t>(d) != 0)
    throw InvalidInput("subspace: basis length must be a multiple of d");
  const int k = static_cast<int>(flat.size()) / d;

  Matrix basis(d, k);
  std::size_t idx = 0;
  for (int col = 0; col < k; ++col)
    for (int row = 0; row < d; ++row) basis(row, col) = flat.at(idx++).get<double>();
  if (!basis.allFinite()) throw InvalidInput("subspace: non-finite basis entry");

  if (k > 0) {
    const Matrix gram = basis.transpose() * basis;
    const Matrix dev = gram - Matrix::Identity(k, k);
    if (dev.cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidInput("subspace: basis columns are not orthonormal");
  }
  return Subspace{d, std::move(basis)};
}

Json to_json(const AngleProfile& profile) {
  Json j;
  j["cosines"] = profile.cosines;
  j["f"] = profile.f;
  j["r"] = profile.r;
  j["friedrichs_cos"] = profile.friedrichs_cos;
  j["dixmier_cos"] = profile.dixmier_cos;
  j["degenerate_nested"] = profile.degenerate_nested;
  return j;
}

Json to_json(const SpectralDecomposition& d) {
  Json clusters = Json::array();
  for (const auto& c : d.clusters) {
    clusters.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
  }
  return Json{{"clusters", std::move(clusters)}, {"cluster_tol", d.cluster_tol}, {"dim", d.dim}};
}

Json to_json(const ActiveSpectrum& spec) {
  Json entries = Json::array();
  for (const auto& e : spec.entries)
    entries.push_back({{"value", e.value}, {"projection_norm", e.projection_norm}});
  return Json{{"entries", std::move(entries)}, {"eps_act", spec.eps_act}};
}

namespace {

Json opt(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const RateReport& report) {
  Json j;
  j["predicted_lambda"] = opt(report.predicted_lambda);
  j["predicted_mu"] = opt(report.predicted_mu);
  j["empirical_lambda"] = opt(report.empirical_lambda);
  j["empirical_mu"] = opt(report.empirical_mu);
  j["lambda_active_value"] = opt(report.lambda_active_value);
  j["mu_active_value"] = opt(report.mu_active_value);
  j["lambda_agreement"] = opt(report.lambda_agreement);
  j["mu_agreement"] = opt(report.mu_agreement);
  j["map_degenerate"] = report.map_degenerate;
  j["msp_degenerate"] = report.msp_degenerate;
  return j;
}

Json to_json(const NullspaceReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"dim_spectral", e.dim_spectral},
                       {"dim_formula", e.dim_formula},
                       {"distance", e.distance}});
  }
  return Json{{"entries", std::move(entries)},
              {"max_distance", report.max_distance},
              {"dims_match", report.dims_match}};
}

Json to_json(const CorrespondenceReport& report) {
  Json matches = Json::array();
  for (const auto& m : report.matches) {
    matches.push_back({{"lambda", m.lambda},
                       {"lambda_mult", m.lambda_mult},
                       {"mu_minus", m.mu_minus},
                       {"mu_plus", m.mu_plus},
                       {"mu_minus_mult", m.mu_minus_mult},
                       {"mu_plus_mult", m.mu_plus_mult},
                       {"residual_minus", m.residual_minus},
                       {"residual_plus", m.residual_plus}});
  }
  return Json{{"matches", std::move(matches)},
              {"friedrichs_cos", report.friedrichs},
              {"bijection_ok", report.bijection_ok},
              {"max_residual", report.max_residual},
              {"max_mu", report.max_mu},
              {"min_mu", report.min_mu},
              {"max_mu_residual", report.max_mu_residual},
              {"min_mu_residual", report.min_mu_residual},
              {"products_agree", report.products_agree},
              {"products_residual", report.products_residual},
              {"cluster_tol", report.cluster_tol}};
}

Json to_json(const ActiveCorrespondenceReport& report) {
  return Json{{"lambda_values", report.lambda_values},
              {"lambda_mirror", report.lambda_mirror},
              {"mu_values", report.mu_values},
              {"mu_matches", report.mu_matches},
              {"mirror_matches", report.mirror_matches},
              {"max_residual", report.max_residual},
              {"eps_act", report.eps_act}};
}

Json to_json(const LambdaxCaseReport& report) {
  return Json{{"lambda", report.lambda},
              {"norm_x", report.norm_x},
              {"set_product", report.set_product},
              {"set_product_mirror", report.set_product_mirror},
              {"set_average", report.set_average},
              {"sets_ok", report.sets_ok},
              {"max_residual", report.max_residual},
              {"coef_plus", report.coef_plus},
              {"coef_minus", report.coef_minus}};
}

Json to_json(const ComparisonReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"k", r.k},
                    {"map_error", r.map_error},
                    {"msp_error", r.msp_error},
                    {"dominance", r.dominance}});
  }
  return Json{{"d", report.d},
              {"requested_angles", report.requested_angles},
              {"seed", report.seed},
              {"cos_f", report.cos_f},
              {"start_kind", report.start_kind},
              {"no_such_start", report.no_such_start},
              {"degenerate_start", report.degenerate_start},
              {"rows", std::move(rows)},
              {"lambda", opt(report.lambda)},
              {"mu", opt(report.mu)},
              {"mu_identity_residual", opt(report.mu_identity_residual)},
              {"dominance_all_map", report.dominance_all_map},
              {"dominance_all_msp", report.dominance_all_msp},
              {"verdict", to_string(report.verdict)}};
}

std::string trace_to_csv(const IterationTrace& trace) {
  const char* method = trace.method == Method::Map ? "map" : "msp";
  std::ostringstream out;
  out << "k,error,ratio,method\n";
  for (std::size_t k = 0; k < trace.errors.size(); ++k) {
    out << k << ',' << format_double(trace.errors[k]) << ',';
    if (k >= 1 && trace.ratios[k - 1].has_value()) out << format_double(*trace.ratios[k - 1]);
    out << ',' << method << '\n';
  }
  return out.str();
}

std::string sweep_summary_csv(const std::vector<ComparisonReport>& reports) {
  std::ostringstream out;
  out << "cos_f,start_kind,verdict,lambda,mu\n";
  for (const auto& r : reports) {
    out << format_double(r.cos_f) << ',' << r.start_kind << ',' << to_string(r.verdict) << ',';
    if (r.lambda) out << format_double(*r.lambda);
    out << ',';
    if (r.mu) out << format_double(*r.mu);
    out << '\n';
  }
  return out.str();
}

SweepSpec sweep_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("sweep spec: expected an object");
  SweepSpec spec;
  try {
    spec.d = j.at("d").get<int>();
    spec.angle_sets = j.at("angle_sets").get<std::vector<std::vector<double>>>();
    spec.starts = j.at("starts").get<std::vector<std::string>>();
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("K")) spec.k_iters = j.at("K").get<int>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("sweep spec: ") + e.what());
  }
  return spec;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  RunConfig config;
  try {
    if (j.contains("instance")) {
      const Json& inst = j.at("instance");
      const bool has_inline = inst.contains("A") || inst.contains("B");
      const bool has_generator = inst.contains("angles");
      if (has_inline == has_generator)
        throw InvalidInput("config: instance must be either inline bases or a generator spec");
      if (has_inline) {
        config.inline_instance = {subspace_from_json(inst.at("A")),
                                  subspace_from_json(inst.at("B"))};
      } else {
        GeneratorSpec gen;
        gen.d = inst.at("d").get<int>();
        gen.angles = inst.at("angles").get<std::vector<double>>();
        if (inst.contains("seed")) gen.seed = inst.at("seed").get<std::uint64_t>();
        config.generator = gen;
      }
    }
    if (j.contains("start")) {
      const Json& start = j.at("start");
      if (start.is_string()) {
        config.start_kind = start.get<std::string>();
        if (config.start_kind != "A" && config.start_kind != "B" &&
            config.start_kind != "mu_minus" && config.start_kind != "random")
          throw InvalidInput("config: unknown start kind '" + config.start_kind + "'");
      } else if (start.is_array()) {
        config.start_kind = "explicit";
        const auto values = start.get<std::vector<double>>();
        Vector v(static_cast<int>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<int>(i)) = values[i];
        config.start_vector = std::move(v);
      } else {
        throw InvalidInput("config: start must be a kind string or a vector");
      }
    }
    if (j.contains("method")) {
      config.method = j.at("method").get<std::string>();
      if (config.method != "map" && config.method != "msp" && config.method != "both")
        throw InvalidInput("config: method must be map, msp or both");
    }
    if (j.contains("max_iter")) config.max_iter = j.at("max_iter").get<int>();
    if (j.contains("floor")) config.floor = j.at("floor").get<double>();
    if (j.contains("cluster_tol")) config.cluster_tol = j.at("cluster_tol").get<double>();
    if (j.contains("eps_act")) config.eps_act = j.at("eps_act").get<double>();
    if (j.contains("K")) config.k_iters = j.at("K").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sweep")) config.sweep_spec = sweep_spec_from_json(j.at("sweep"));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }

  if (config.max_iter < 1) throw InvalidInput("config: max_iter must be >= 1");
  if (config.floor < 0) throw InvalidInput("config: floor must be nonnegative");
  if (config.cluster_tol <= 0) throw InvalidInput("config: cluster_tol must be positive");
  if (config.eps_act <= 0) throw InvalidInput("config: eps_act must be positive");
  if (config.k_iters < 1) throw InvalidInput("config: K must be >= 1");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

std::pair<Subspace, Subspace> resolve_instance(const RunConfig& config) {
  if (config.inline_instance) return *config.inline_instance;
  if (config.generator) {
    const GeneratorSpec& gen = *config.generator;
    const std::uint64_t seed = config.seed.value_or(gen.seed);
    return subspaces_with_angles(gen.d, gen.angles, seed);
  }
  throw InvalidInput("config: no instance source given");
}

Vector resolve_start(const RunConfig& config, const Subspace& a, const Subspace& b) {
  const std::uint64_t seed = config.seed.value_or(config.generator ? config.generator->seed : 0);
  if (config.start_kind == "explicit") {
    if (!config.start_vector) throw InvalidInput("config: explicit start without a vector");
    if (config.start_vector->size() != a.ambient_dim)
      throw InvalidInput("config: start vector dimension mismatch");
    return *config.start_vector;
  }
  if (config.start_kind == "A") return random_unit_in(a, mix_seed(seed, 1));
  if (config.start_kind == "B") return random_unit_in(b, mix_seed(seed, 2));
  if (config.start_kind == "random") return random_unit_vector(a.ambient_dim, mix_seed(seed, 3));
  if (config.start_kind == "mu_minus")
    return msp_beats_map_start(a, b, config.k_iters, config.eps_act, config.cluster_tol);
  throw InvalidInput("config: unknown start kind '" + config.start_kind + "'");
}

}  // namespace projlab
