#include "romes/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

namespace romes {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "romes 1.0.0";

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out << content;
}

nlohmann::json spec_entry_to_json(const SurrogateConfigEntry& e) {
  static const std::map<IndicatorKind, std::string> kind_names = {
      {IndicatorKind::LogResidualEuclid, "log_res_euclid"},
      {IndicatorKind::LogResidualRiesz, "log_res_riesz"},
      {IndicatorKind::LogEnergyBound, "log_bound_energy"},
      {IndicatorKind::DualWeightedResidual, "dual_weighted_residual"},
      {IndicatorKind::SystemInputs, "system_inputs"},
  };
  static const std::map<ErrorKind, std::string> error_names = {
      {ErrorKind::EnergyStateError, "energy_state"},
      {ErrorKind::XStateError, "x_state"},
      {ErrorKind::CompliantOutputError, "compliant_output"},
      {ErrorKind::OutputError, "output"},
  };
  nlohmann::json j;
  j["id"] = e.id;
  j["indicator"] = kind_names.at(e.spec.indicator.kind);
  j["dual_id"] = e.spec.indicator.dual_id;
  j["transform"] = e.spec.transform == Transform::Log ? "log" : "identity";
  j["error"] = error_names.at(e.spec.error.kind);
  j["output_id"] = e.spec.error.output_id;
  j["variance"] =
      e.spec.variance == VarianceMode::Full ? "full" : "noise_only";
  j["regressor"] = e.spec.regressor == RegressorKind::Gp ? "gp" : "rvm";
  j["rvm_basis"] = e.spec.rvm.basis == RvmBasisKind::Legendre ? "legendre"
                                                              : "rbf";
  j["rvm_max_order"] = e.spec.rvm.legendre_max_order;
  j["rigor_levels"] = e.rigor_levels;
  j["omegas"] = e.omegas;
  return j;
}

SurrogateConfigEntry spec_entry_from_json(const nlohmann::json& j) {
  static const std::map<std::string, IndicatorKind> kinds = {
      {"log_res_euclid", IndicatorKind::LogResidualEuclid},
      {"log_res_riesz", IndicatorKind::LogResidualRiesz},
      {"log_bound_energy", IndicatorKind::LogEnergyBound},
      {"dual_weighted_residual", IndicatorKind::DualWeightedResidual},
      {"system_inputs", IndicatorKind::SystemInputs},
  };
  static const std::map<std::string, ErrorKind> errors = {
      {"energy_state", ErrorKind::EnergyStateError},
      {"x_state", ErrorKind::XStateError},
      {"compliant_output", ErrorKind::CompliantOutputError},
      {"output", ErrorKind::OutputError},
  };
  SurrogateConfigEntry e;
  e.id = j.at("id").get<std::string>();
  const auto kind_it = kinds.find(j.at("indicator").get<std::string>());
  if (kind_it == kinds.end()) {
    throw std::invalid_argument("unknown indicator kind in config");
  }
  e.spec.indicator.kind = kind_it->second;
  e.spec.indicator.dual_id = j.value("dual_id", std::string());
  e.spec.transform = j.value("transform", std::string("log")) == "log"
                         ? Transform::Log
                         : Transform::Identity;
  const auto err_it = errors.find(j.at("error").get<std::string>());
  if (err_it == errors.end()) {
    throw std::invalid_argument("unknown error kind in config");
  }
  e.spec.error.kind = err_it->second;
  e.spec.error.output_id = j.value("output_id", std::string());
  e.spec.variance = j.value("variance", std::string("noise_only")) == "full"
                        ? VarianceMode::Full
                        : VarianceMode::NoiseOnly;
  e.spec.regressor = j.value("regressor", std::string("gp")) == "gp"
                         ? RegressorKind::Gp
                         : RegressorKind::Rvm;
  e.spec.rvm.basis =
      j.value("rvm_basis", std::string("legendre")) == "legendre"
          ? RvmBasisKind::Legendre
          : RvmBasisKind::Rbf;
  e.spec.rvm.legendre_max_order = j.value("rvm_max_order", 4);
  if (j.contains("rigor_levels")) {
    e.rigor_levels = j.at("rigor_levels").get<std::vector<double>>();
  }
  if (j.contains("omegas")) {
    e.omegas = j.at("omegas").get<std::vector<double>>();
  }
  return e;
}

nlohmann::json manifest_base(const ExperimentConfig& cfg) {
  nlohmann::json m;
  m["config_hash"] = config_hash(cfg);
  m["version"] = kVersion;
  m["files"] = nlohmann::json::array();
  m["timings_s"] = nlohmann::json::object();
  return m;
}

StatSummary summarize_or_empty(const std::vector<double>& v) {
  return summarize(v);
}

nlohmann::json summary_to_json(const StatSummary& s) {
  return {{"mean", s.mean},     {"median", s.median}, {"stddev", s.stddev},
          {"min", s.min},       {"max", s.max},       {"count", s.count}};
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  ExperimentConfig cfg;
  cfg.schema_version = j.value("schema_version", 1);
  if (cfg.schema_version != 1) {
    throw std::invalid_argument("unsupported config schema version");
  }
  cfg.mesh_divisions = j.value("mesh_divisions", 60);
  if (j.contains("greedy")) {
    const auto& g = j.at("greedy");
    cfg.greedy_candidates = g.value("candidates", 100);
    cfg.greedy_tol = g.value("tol", 1.0);
    cfg.greedy_max_p = g.value("max_p", 200);
    cfg.greedy_seed = g.value("seed", uint64_t{3});
  }
  if (!(cfg.greedy_tol > 0)) {
    throw std::invalid_argument("greedy tolerance must be positive");
  }
  if (j.contains("duals")) {
    for (const auto& jd : j.at("duals")) {
      DualConfig d;
      d.id = jd.at("id").get<std::string>();
      d.output_id = jd.at("output_id").get<std::string>();
      d.tol = jd.value("tol", 1.0);
      d.max_p = jd.value("max_p", 100);
      if (!(d.tol > 0)) {
        throw std::invalid_argument("dual tolerance must be positive");
      }
      cfg.duals.push_back(d);
    }
  }
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    cfg.sample_total = s.value("total", 2000);
    cfg.sample_train = s.value("train", 100);
    cfg.sample_validation = s.value("validation", 1900);
    cfg.sample_seed = s.value("seed", uint64_t{11});
    cfg.log_uniform_sampling = s.value("log_uniform", false);
  }
  if (cfg.sample_train + cfg.sample_validation > cfg.sample_total) {
    throw std::invalid_argument(
        "train + validation counts exceed the sample total");
  }
  cfg.threads = j.value("threads", 1);
  if (j.contains("surrogates")) {
    for (const auto& js : j.at("surrogates")) {
      cfg.surrogates.push_back(spec_entry_from_json(js));
    }
  }
  if (j.contains("sweep_n")) {
    cfg.sweep_n = j.at("sweep_n").get<std::vector<int>>();
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = cfg.schema_version;
  j["mesh_divisions"] = cfg.mesh_divisions;
  j["greedy"] = {{"candidates", cfg.greedy_candidates},
                 {"tol", cfg.greedy_tol},
                 {"max_p", cfg.greedy_max_p},
                 {"seed", cfg.greedy_seed}};
  j["duals"] = nlohmann::json::array();
  for (const auto& d : cfg.duals) {
    j["duals"].push_back({{"id", d.id},
                          {"output_id", d.output_id},
                          {"tol", d.tol},
                          {"max_p", d.max_p}});
  }
  j["sampling"] = {{"total", cfg.sample_total},
                   {"train", cfg.sample_train},
                   {"validation", cfg.sample_validation},
                   {"seed", cfg.sample_seed},
                   {"log_uniform", cfg.log_uniform_sampling}};
  j["threads"] = cfg.threads;
  j["surrogates"] = nlohmann::json::array();
  for (const auto& e : cfg.surrogates) {
    j["surrogates"].push_back(spec_entry_to_json(e));
  }
  j["sweep_n"] = cfg.sweep_n;
  return j.dump(2);
}

uint64_t config_hash(const ExperimentConfig& cfg) {
  // FNV-1a over the canonical JSON text
  const std::string text = config_to_json(cfg);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int cmd_offline(const ExperimentConfig& cfg, const std::string& out_dir) {
  try {
    nlohmann::json manifest = manifest_base(cfg);
    const auto t0 = Clock::now();
    const TriangularMesh mesh = build_mesh(cfg.mesh_divisions);
    const AffineOperator op = assemble_affine_components(mesh);
    manifest["timings_s"]["assembly"] = seconds_since(t0);
    manifest["n"] = op.n;

    const auto t1 = Clock::now();
    const std::vector<InputPoint> candidates = sample_parameter_box(
        cfg.greedy_candidates, cfg.greedy_seed, cfg.log_uniform_sampling);
    GreedyOptions opts{cfg.greedy_tol, cfg.greedy_max_p, cfg.greedy_seed};
    const GreedyResult greedy = greedy_build(op, candidates, opts);
    ReducedModel rm = offline_project(op, greedy.basis);
    rm.greedy_seed = cfg.greedy_seed;
    manifest["timings_s"]["greedy_primal"] = seconds_since(t1);
    manifest["p"] = greedy.basis.p();
    manifest["skipped_dependent"] = greedy.skipped_dependent;
    manifest["max_bound_history"] = greedy.max_bound_history;

    for (const DualConfig& d : cfg.duals) {
      const auto td = Clock::now();
      GreedyOptions dual_opts{d.tol, d.max_p, cfg.greedy_seed + 1};
      const GreedyResult dual =
          greedy_build_dual(op, d.output_id, candidates, dual_opts);
      attach_dual(rm, op, d.id, d.output_id, dual.basis);
      manifest["timings_s"]["greedy_dual_" + d.id] = seconds_since(td);
      manifest["dual_p"][d.id] = dual.basis.p();
    }

    const std::string model_path =
        (fs::path(out_dir) / "reduced_model.json").string();
    write_file(model_path, reduced_model_to_json(rm));
    manifest["files"].push_back(model_path);
    const std::string manifest_path =
        (fs::path(out_dir) / "offline_manifest.json").string();
    manifest["files"].push_back(manifest_path);
    write_file(manifest_path, manifest.dump(2));
    std::cout << "offline: n=" << op.n << " p=" << greedy.basis.p()
              << " model=" << model_path << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "offline stage failed: " << e.what() << '\n';
    return 3;
  }
}

int cmd_sample(const ExperimentConfig& cfg, const std::string& model_path,
               const std::string& out_dir) {
  try {
    nlohmann::json manifest = manifest_base(cfg);
    const ReducedModel rm = reduced_model_from_json(read_file(model_path));
    const auto t0 = Clock::now();
    const TriangularMesh mesh = build_mesh(cfg.mesh_divisions);
    const AffineOperator op = assemble_affine_components(mesh);
    if (op.n != rm.n) {
      throw std::invalid_argument(
          "mesh divisions in config do not match the reduced model");
    }
    const std::vector<InputPoint> points = sample_parameter_box(
        cfg.sample_total, cfg.sample_seed, cfg.log_uniform_sampling);
    const SampleTable table = collect_samples(
        op, rm, points, CollectOptions{cfg.sample_train, cfg.threads});
    manifest["timings_s"]["collect"] = seconds_since(t0);
    int failed = 0;
    for (const auto& row : table.rows) failed += row.ok ? 0 : 1;
    if (failed > 0) {
      std::cerr << "warning: " << failed << " rows failed and were excluded\n";
    }
    manifest["rows"] = static_cast<int>(table.rows.size()) - failed;
    manifest["failed_rows"] = failed;

    const std::string csv_path = (fs::path(out_dir) / "samples.csv").string();
    write_file(csv_path, table_to_csv(table));
    manifest["files"].push_back(csv_path);
    const std::string manifest_path =
        (fs::path(out_dir) / "sample_manifest.json").string();
    manifest["files"].push_back(manifest_path);
    write_file(manifest_path, manifest.dump(2));
    std::cout << "sample: rows=" << manifest["rows"] << " csv=" << csv_path
              << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sampling stage failed: " << e.what() << '\n';
    return 3;
  }
}

int cmd_train_validate(const ExperimentConfig& cfg,
                       const std::string& table_path,
                       const std::string& out_dir) {
  try {
    nlohmann::json manifest = manifest_base(cfg);
    const SampleTable table = table_from_csv(read_file(table_path));
    std::vector<int> sweep = cfg.sweep_n;
    if (sweep.empty()) sweep.push_back(cfg.sample_train);

    nlohmann::json report;
    report["schema_version"] = 1;
    report["config_hash"] = config_hash(cfg);
    report["entries"] = nlohmann::json::array();
    std::ostringstream stats_csv;
    stats_csv << "surrogate_id,n,metric,value\n";
    std::ostringstream coverage_csv;
    coverage_csv << "surrogate_id,n,omega,observed_full,observed_noise_only\n";

    const auto t0 = Clock::now();
    for (const SurrogateConfigEntry& entry : cfg.surrogates) {
      for (int n : sweep) {
        nlohmann::json je;
        je["surrogate_id"] = entry.id;
        je["n_train"] = n;
        try {
          const ErrorSurrogate s = train_surrogate(table, entry.spec, n);
          for (const CoverageEntry& ce :
               validate_confidence(s, table, entry.omegas)) {
            je["coverage"].push_back({{"omega", ce.omega},
                                      {"full", ce.observed_full},
                                      {"noise_only", ce.observed_noise_only}});
            coverage_csv << entry.id << ',' << n << ',' << ce.omega << ','
                         << ce.observed_full << ',' << ce.observed_noise_only
                         << '\n';
          }
          const DeviationSamples dev = deviation_samples(s, table);
          je["deviation"] = summary_to_json(summarize_or_empty(dev.values));
          je["deviation"]["noise_var"] = dev.noise_var;
          const StatSummary imp =
              summarize_or_empty(expected_improvements(s, table));
          je["improvement"] = summary_to_json(imp);
          stats_csv << entry.id << ',' << n << ",improvement_mean,"
                    << imp.mean << '\n';
          stats_csv << entry.id << ',' << n << ",improvement_median,"
                    << imp.median << '\n';
          for (double c : entry.rigor_levels) {
            const StatSummary eff =
                summarize_or_empty(effectivities(s, table, c));
            const double cv = overestimation_frequency(s, table, c);
            je["effectivity"].push_back(
                {{"c", c}, {"stats", summary_to_json(eff)}});
            je["c_validation"].push_back({{"c", c}, {"observed", cv}});
            stats_csv << entry.id << ',' << n << ",effectivity_mean_c" << c
                      << ',' << eff.mean << '\n';
            stats_csv << entry.id << ',' << n << ",c_validation_c" << c << ','
                      << cv << '\n';
          }
        } catch (const std::invalid_argument& e) {
          je["skipped"] = e.what();
        }
        report["entries"].push_back(std::move(je));
      }
    }
    report["baselines"]["uniform_improvement"] =
        summary_to_json(summarize_or_empty(uniform_baseline_improvements(table)));
    report["baselines"]["uniform_effectivity"] = summary_to_json(
        summarize_or_empty(uniform_baseline_effectivities(table)));
    report["baselines"]["rb_bound_effectivity"] =
        summary_to_json(summarize_or_empty(rb_bound_effectivities(table)));
    manifest["timings_s"]["train_validate"] = seconds_since(t0);

    const std::string report_path = (fs::path(out_dir) / "report.json").string();
    write_file(report_path, report.dump(2));
    const std::string stats_path =
        (fs::path(out_dir) / "statistics.csv").string();
    write_file(stats_path, stats_csv.str());
    const std::string coverage_path =
        (fs::path(out_dir) / "coverage.csv").string();
    write_file(coverage_path, coverage_csv.str());
    for (const auto& p : {report_path, stats_path, coverage_path}) {
      manifest["files"].push_back(p);
    }
    const std::string manifest_path =
        (fs::path(out_dir) / "train_validate_manifest.json").string();
    manifest["files"].push_back(manifest_path);
    write_file(manifest_path, manifest.dump(2));
    std::cout << "train-validate: report=" << report_path << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "train-validate stage failed: " << e.what() << '\n';
    return 3;
  }
}

int cmd_report(const std::vector<std::string>& report_paths,
               const std::string& out_path) {
  try {
    if (report_paths.empty()) {
      throw std::invalid_argument("no reports given");
    }
    nlohmann::json merged;
    bool first = true;
    for (const auto& path : report_paths) {
      const nlohmann::json r = nlohmann::json::parse(read_file(path));
      if (r.value("schema_version", 0) != 1) {
        throw std::invalid_argument("report schema version mismatch: " + path);
      }
      if (first) {
        merged = r;
        first = false;
        continue;
      }
      if (merged.at("config_hash") != r.at("config_hash")) {
        throw std::invalid_argument("conflicting config hashes: " + path);
      }
      for (const auto& e : r.at("entries")) merged["entries"].push_back(e);
    }
    write_file(out_path, merged.dump(2));

    std::cout << "surrogate            n     imp.mean  imp.median\n";
    for (const auto& e : merged.at("entries")) {
      if (e.contains("skipped")) {
        std::cout << e.at("surrogate_id").get<std::string>() << "  skipped: "
                  << e.at("skipped").get<std::string>() << '\n';
        continue;
      }
      std::cout << e.at("surrogate_id").get<std::string>() << "  "
                << e.at("n_train").get<int>() << "  "
                << e.at("improvement").at("mean").get<double>() << "  "
                << e.at("improvement").at("median").get<double>() << '\n';
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "report merge failed: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace romes
