#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "romes/pipeline.hpp"

using namespace romes;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.mesh_divisions = 3;
  cfg.greedy_candidates = 15;
  cfg.greedy_tol = 1e-3;
  cfg.greedy_max_p = 8;
  cfg.greedy_seed = 1;
  cfg.duals.push_back({"d1", "point_1", 0.5, 6});
  cfg.sample_total = 40;
  cfg.sample_train = 15;
  cfg.sample_validation = 25;
  cfg.sample_seed = 2;
  cfg.threads = 2;
  SurrogateConfigEntry e;
  e.id = "gp_energy";
  e.spec.indicator.kind = IndicatorKind::LogResidualEuclid;
  e.spec.transform = Transform::Log;
  e.spec.error.kind = ErrorKind::EnergyStateError;
  e.spec.regressor = RegressorKind::Gp;
  cfg.surrogates.push_back(e);
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("romes_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config JSON round trip preserves every field") {
  ExperimentConfig cfg = tiny_config();
  cfg.log_uniform_sampling = true;
  cfg.sweep_n = {5, 10, 15};
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.mesh_divisions == cfg.mesh_divisions);
  CHECK(back.greedy_candidates == cfg.greedy_candidates);
  CHECK(back.greedy_tol == cfg.greedy_tol);
  CHECK(back.greedy_max_p == cfg.greedy_max_p);
  CHECK(back.greedy_seed == cfg.greedy_seed);
  REQUIRE(back.duals.size() == 1);
  CHECK(back.duals[0].id == "d1");
  CHECK(back.duals[0].output_id == "point_1");
  CHECK(back.duals[0].tol == 0.5);
  CHECK(back.sample_total == 40);
  CHECK(back.sample_train == 15);
  CHECK(back.sample_seed == 2);
  CHECK(back.log_uniform_sampling);
  CHECK(back.threads == 2);
  REQUIRE(back.surrogates.size() == 1);
  CHECK(back.surrogates[0].id == "gp_energy");
  CHECK(back.surrogates[0].spec.transform == Transform::Log);
  CHECK(back.sweep_n == cfg.sweep_n);
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(config_from_json("not json at all"),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{\"schema_version\": 2}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json("{\"greedy\": {\"tol\": -1.0}}"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(
          "{\"sampling\": {\"total\": 10, \"train\": 8, \"validation\": 8}}"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json("{\"surrogates\": [{\"id\": \"x\", \"indicator\": "
                       "\"bogus\", \"error\": \"energy_state\"}]}"),
      std::invalid_argument);
}

TEST_CASE("config hash is deterministic and field-sensitive") {
  const ExperimentConfig a = tiny_config();
  ExperimentConfig b = tiny_config();
  CHECK(config_hash(a) == config_hash(b));
  b.sample_seed += 1;
  CHECK(config_hash(a) != config_hash(b));
  ExperimentConfig c = tiny_config();
  c.greedy_tol *= 2.0;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("offline/sample/train-validate/report chain on a tiny problem") {
  const ExperimentConfig cfg = tiny_config();
  TempDir tmp;
  const std::string out = tmp.path.string();

  REQUIRE(cmd_offline(cfg, out) == 0);
  const fs::path model = tmp.path / "reduced_model.json";
  REQUIRE(fs::exists(model));
  const nlohmann::json offline_manifest =
      nlohmann::json::parse(slurp(tmp.path / "offline_manifest.json"));
  CHECK(offline_manifest.at("config_hash") == config_hash(cfg));
  CHECK(offline_manifest.at("p").get<int>() >= 1);
  CHECK(offline_manifest.at("dual_p").at("d1").get<int>() >= 1);
  // manifest completeness: every listed file exists
  for (const auto& f : offline_manifest.at("files")) {
    CHECK(fs::exists(f.get<std::string>()));
  }

  REQUIRE(cmd_sample(cfg, model.string(), out) == 0);
  const fs::path csv = tmp.path / "samples.csv";
  REQUIRE(fs::exists(csv));
  const std::string csv_text = slurp(csv);

  // determinism: resampling with the same config reproduces the bytes
  const fs::path out2 = tmp.path / "again";
  REQUIRE(cmd_sample(cfg, model.string(), out2.string()) == 0);
  CHECK(slurp(out2 / "samples.csv") == csv_text);

  REQUIRE(cmd_train_validate(cfg, csv.string(), out) == 0);
  const fs::path report = tmp.path / "report.json";
  REQUIRE(fs::exists(report));
  REQUIRE(fs::exists(tmp.path / "statistics.csv"));
  REQUIRE(fs::exists(tmp.path / "coverage.csv"));
  const nlohmann::json rj = nlohmann::json::parse(slurp(report));
  CHECK(rj.at("config_hash") == config_hash(cfg));
  REQUIRE(rj.at("entries").size() == 1);
  CHECK(rj.at("entries")[0].at("surrogate_id") == "gp_energy");

  // merging a report with itself is idempotent on the scalar fields
  const fs::path merged = tmp.path / "merged.json";
  REQUIRE(cmd_report({report.string()}, merged.string()) == 0);
  const nlohmann::json mj = nlohmann::json::parse(slurp(merged));
  CHECK(mj.at("config_hash") == rj.at("config_hash"));
  CHECK(mj.at("entries").size() == rj.at("entries").size());

  // two-report merge unions the entries
  REQUIRE(cmd_report({report.string(), report.string()}, merged.string()) ==
          0);
  const nlohmann::json mj2 = nlohmann::json::parse(slurp(merged));
  CHECK(mj2.at("entries").size() == 2 * rj.at("entries").size());

  // a report from a different config must not merge
  ExperimentConfig other = tiny_config();
  other.sample_seed = 77;
  const fs::path out3 = tmp.path / "other";
  REQUIRE(cmd_sample(other, model.string(), out3.string()) == 0);
  REQUIRE(cmd_train_validate(other, (out3 / "samples.csv").string(),
                             out3.string()) == 0);
  CHECK(cmd_report({report.string(), (out3 / "report.json").string()},
                   merged.string()) == 2);
}

TEST_CASE("stage commands signal config errors with exit code 2") {
  const ExperimentConfig cfg = tiny_config();
  TempDir tmp;
  CHECK(cmd_sample(cfg, (tmp.path / "missing.json").string(),
                   tmp.path.string()) == 2);
  CHECK(cmd_train_validate(cfg, (tmp.path / "missing.csv").string(),
                           tmp.path.string()) == 2);
  CHECK(cmd_report({}, (tmp.path / "out.json").string()) == 2);

  // a model built on a different mesh is rejected during sampling
  ExperimentConfig off = cfg;
  REQUIRE(cmd_offline(off, tmp.path.string()) == 0);
  ExperimentConfig mismatched = cfg;
  mismatched.mesh_divisions = 6;
  CHECK(cmd_sample(mismatched, (tmp.path / "reduced_model.json").string(),
                   tmp.path.string()) == 2);
}
