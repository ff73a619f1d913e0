// Command-line harness: run experiments, validate configs, benchmark the
// election solver. Log verbosity via the POPT_LOG environment variable
// (set to "debug" for progress output on stderr).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "popt/experiments.hpp"
#include "popt/rng.hpp"

namespace {

bool debug_log() {
  const char* v = std::getenv("POPT_LOG");
  return v != nullptr && std::string(v) == "debug";
}

int cmd_run(const std::string& experiment, const std::string& config_path,
            std::uint64_t seed, const std::string& out_dir) {
  popt::ExperimentSpec spec;
  spec.name = experiment;
  spec.seed = seed;
  spec.out_dir = out_dir;
  spec.config = config_path.empty() ? popt::default_config()
                                    : popt::load_config_file(config_path);
  if (debug_log())
    std::cerr << "[popt] running " << experiment << " seed=" << seed
              << " out=" << out_dir << "\n";
  popt::run_experiment(spec);
  std::cout << experiment << ": wrote " << out_dir << "/" << experiment
            << ".csv\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot read config file: " << config_path << "\n";
    return 1;
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "not valid JSON: " << e.what() << "\n";
    return 1;
  }
  auto errors = popt::validate_config_json(doc);
  if (errors.empty()) {
    std::cout << "config ok\n";
    return 0;
  }
  for (const auto& e : errors) std::cerr << "error: " << e << "\n";
  return 1;
}

int cmd_bench(int na, std::uint64_t seed) {
  popt::Rng rng(seed);
  std::vector<popt::NodeId> ids;
  Eigen::VectorXd pvs(na);
  for (int i = 0; i < na; ++i) {
    ids.push_back(i + 1);
    pvs[i] = rng.uniform(0.0, 1.0);
  }
  auto apps = popt::ApplicantSet::from_pvs(ids, pvs);
  popt::GwoConfig gwo;
  gwo.seed = seed;
  popt::MetricWeights weights;

  const auto t0 = std::chrono::steady_clock::now();
  auto outcome = popt::solve_p1(apps, weights, gwo);
  const auto t1 = std::chrono::steady_clock::now();
  const double ms =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() /
      1000.0;
  std::cout << "solve_p1 N_a=" << na << ": " << ms << " ms, O="
            << outcome.comprehensive << " F=" << outcome.fairness
            << " D=" << outcome.decentralization
            << " C=" << outcome.credibility << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof-of-Prospect-Theory consensus simulator"};
  app.require_subcommand(1);

  std::string experiment, config_path, out_dir = ".";
  std::uint64_t seed = 0;
  int na = 100;

  auto* run = app.add_subcommand("run", "run a registered experiment");
  run->add_option("experiment", experiment,
                  "one of: fig2a fig2b fig3 fig4 fig5a fig5b fig6a fig6b")
      ->required();
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--out", out_dir, "output directory");

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path, "JSON config file")->required();

  auto* bench =
      app.add_subcommand("bench-election", "time solve_p1 at a given size");
  bench->add_option("--na", na, "applicant count")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(experiment, config_path, seed, out_dir);
    if (validate->parsed()) return cmd_validate(config_path);
    if (bench->parsed()) return cmd_bench(na, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
