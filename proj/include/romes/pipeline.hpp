#pragma once

#include <string>
#include <vector>

#include "romes/surrogate.hpp"

namespace romes {

struct DualConfig {
  std::string id;         // key in ReducedModel::duals
  std::string output_id;  // registered output vector
  double tol = 1.0;
  int max_p = 100;
};

struct SurrogateConfigEntry {
  std::string id;
  SurrogateSpec spec;
  std::vector<double> rigor_levels{0.5, 0.9};
  std::vector<double> omegas{0.5, 0.9, 0.95};
};

struct ExperimentConfig {
  int schema_version = 1;
  int mesh_divisions = 60;
  int greedy_candidates = 100;
  double greedy_tol = 1.0;
  int greedy_max_p = 200;
  uint64_t greedy_seed = 3;
  std::vector<DualConfig> duals;
  int sample_total = 2000;
  int sample_train = 100;
  int sample_validation = 1900;
  uint64_t sample_seed = 11;
  bool log_uniform_sampling = false;
  int threads = 1;
  std::vector<SurrogateConfigEntry> surrogates;
  std::vector<int> sweep_n;  // training-size grid; empty = {sample_train}
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
uint64_t config_hash(const ExperimentConfig& cfg);

// Exit codes: 0 success, 2 config error, 3 numerical failure.
int cmd_offline(const ExperimentConfig& cfg, const std::string& out_dir);
int cmd_sample(const ExperimentConfig& cfg, const std::string& model_path,
               const std::string& out_dir);
int cmd_train_validate(const ExperimentConfig& cfg,
                       const std::string& table_path,
                       const std::string& out_dir);
int cmd_report(const std::vector<std::string>& report_paths,
               const std::string& out_path);

}  // namespace romes
