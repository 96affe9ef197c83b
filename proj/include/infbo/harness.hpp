#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "infbo/acquisition.hpp"
#include "infbo/benchmarks.hpp"

namespace infbo {

// Experiment description, parsed from a flat key = value config file
// (one dotted key per line, '#' comments). Unknown keys are errors.
struct ExperimentConfig {
  std::string benchmark;
  int dimension = 2;
  std::vector<std::string> algorithms = {"infgp_ts"};
  int budget = 100;        // N
  int replications = 10;   // R
  std::uint64_t seed = 12345;
  int workers = 0;         // 0 = logical cores
  std::string output_dir = "out";
  AcquisitionConfig acq;
  int gibbs_sweeps = 500;
  int l_max = 16;
  double kappa = -1.0;     // negative = track the nu estimate
  bool warm_start = true;
  PhiMode phi_mode = PhiMode::kIsotropicGrid;
  PriorSettings priors;
  int weights_checkpoint_every = 10;

  void validate() const;  // throws ConfigError naming the offending field
  OptimizeConfig optimize_config(Algorithm algorithm) const;
};

// Names and one-line descriptions of every config key, used by the CLI help
// text and the parser's unknown-key diagnostics.
const std::vector<std::pair<std::string, std::string>>& config_key_help();

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// ---- trace / aggregate serialization ----

// Header: iter,x1..xd,y,r,R_cum,K_n,wall_ms  (6 + d columns).
std::string trace_to_csv(const RegretTrace& trace);
RegretTrace trace_from_csv(const std::string& text);

// Matrix CSV of stick-breaking weights at every k-th iteration; rows are
// padded to the widest truncation level seen so each row stays a simplex.
std::string surface_weights_to_csv(const std::vector<Eigen::VectorXd>& weights_per_iter,
                                   int every);

struct AlgorithmSummary {
  std::string algorithm;
  std::vector<double> final_cumulative;   // per successful replication
  Eigen::VectorXd mean_cumulative;        // per iteration across replications
  Eigen::VectorXd se_cumulative;          // sample SD / sqrt(R)
  std::vector<int> failed_replications;
  std::vector<std::string> failure_messages;
};

std::string aggregate_to_csv(const AlgorithmSummary& summary);

struct RunSummary {
  std::vector<AlgorithmSummary> algorithms;
  std::vector<std::string> files_written;
  double total_wall_seconds = 0.0;
};

// Run R seeded replications per algorithm (parallel fan-out), write one trace
// CSV per replication, an aggregate CSV per algorithm, surface-weight CSVs
// for the mixture surrogate, and one SVG regret plot per benchmark.
RunSummary run_experiment(const ExperimentConfig& config);

// Mean +/- SE band chart, one curve per algorithm.
struct SvgCurve {
  std::string label;
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
};
std::string regret_svg(const std::string& title, const std::vector<SvgCurve>& curves);

// CLI driver behind main(): run | bench | validate. Returns 0 on success,
// 1 on configuration errors, 2 on runtime failures.
int cli_main(int argc, const char* const* argv);

}  // namespace infbo
