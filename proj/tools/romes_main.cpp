// Command-line driver: offline construction, sampling, surrogate
// training/validation and report merging, all driven by one JSON config.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "romes/pipeline.hpp"

namespace {

std::optional<romes::ExperimentConfig> load_config(
    const std::string& path, std::optional<uint64_t> seed_override,
    std::optional<int> threads_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "config error: cannot open " << path << '\n';
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    romes::ExperimentConfig cfg = romes::config_from_json(ss.str());
    if (seed_override) {
      cfg.greedy_seed = *seed_override;
      cfg.sample_seed = *seed_override + 1;
    }
    if (threads_override) cfg.threads = *threads_override;
    return cfg;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order models with statistical error surrogates"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", model_path, table_path, out_path;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::vector<std::string> report_paths;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config seeds");
    cmd->add_option("--threads", threads, "worker thread count");
  };

  CLI::App* offline = app.add_subcommand(
      "offline", "build the reduced model (mesh, greedy, projection)");
  add_common(offline);

  CLI::App* sample = app.add_subcommand(
      "sample", "evaluate errors/indicators/bounds over a parameter sample");
  add_common(sample);
  sample->add_option("--model", model_path, "reduced-model JSON")->required();

  CLI::App* train = app.add_subcommand(
      "train-validate", "train surrogates and compute validation statistics");
  add_common(train);
  train->add_option("--table", table_path, "sample CSV")->required();

  CLI::App* report =
      app.add_subcommand("report", "merge reports into one summary");
  report->add_option("--in", report_paths, "report JSON files")->required();
  report->add_option("--out", out_path, "merged report path")->required();

  CLI11_PARSE(app, argc, argv);

  if (report->parsed()) {
    return romes::cmd_report(report_paths, out_path);
  }
  const auto cfg = load_config(config_path, seed, threads);
  if (!cfg) return 2;
  if (offline->parsed()) return romes::cmd_offline(*cfg, out_dir);
  if (sample->parsed()) return romes::cmd_sample(*cfg, model_path, out_dir);
  if (train->parsed()) {
    return romes::cmd_train_validate(*cfg, table_path, out_dir);
  }
  return 2;
}
