#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace memcirc {

/// Circuit size: `vertices` wins when positive, otherwise V is chosen so that
/// p V (V - 1) / 2 is close to `edges`.
struct CircuitConfig {
  int vertices = 0;
  int edges = 500;
  double p = 0.9;
};

/// r_on and r_off, when both given, override xi.
struct ParamsConfig {
  double alpha = 0.1;
  double beta = 1.0;
  double xi = 10.0;
  std::optional<double> r_on;
  std::optional<double> r_off;
};

/// mode: "uniform" draws from [lo, hi]; "explicit" uses values; "loop-pattern" uses rho.
struct SourcesConfig {
  std::string mode = "uniform";
  double lo = -0.05;
  double hi = 0.05;
  std::vector<double> values;
  std::vector<double> rho;
};

/// w0: "uniform" on [w0_lo, w0_hi] or "constant" at w0_value.
/// A null dt means 0.1 / alpha (markowitz only).
struct IntegrationConfig {
  std::optional<double> dt = 0.1;
  int steps = 1000;
  int record_every = 1;
  int transient = 10;
  std::string w0 = "uniform";
  double w0_value = 0.5;
  double w0_lo = 0.0;
  double w0_hi = 1.0;
};

/// Null budget / stage2_steps pick command-specific values (10 N for benchmark annealing,
/// 40 N for the markowitz second stage, matched budget for its annealing baseline).
struct OptimizerConfig {
  double t0 = 100.0;
  double lambda = 0.995;
  std::optional<long long> budget;
  long long random_samples = 100;
  double stage2_t0 = 0.025;
  double stage2_lambda = 0.995;
  std::optional<int> stage2_steps;
  int brute_force_max_n = 20;
};

struct EnsembleConfig {
  int samples = 20;
  std::vector<double> xi_list{0.1, 1.0, 10.0};
  std::string prediction = "xi_zero";
  double binarize_threshold = 0.9;
  std::vector<int> sizes{50, 100, 200, 400, 800};
  int seeds_per_size = 3;
  int bins = 50;
};

/// l == 0 derives L from an ER circuit of n edges at circuit.p.
struct KacRiceConfig {
  int n = 1000;
  int l = 0;
  double s_volts = 0.05;
  std::vector<double> sigma_list;
};

/// Empty path means a synthetic factor-model problem with `assets` assets.
/// A null alpha means p lambda_max(Sigma), which keeps xi lambda_max at 0.5.
struct PortfolioConfig {
  std::string path;
  int assets = 20;
  double tradeoff = 2.0;
  std::optional<double> alpha;
  double beta = 1.0;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  bool write_matrix = false;
};

struct ExperimentConfig {
  std::string command = "simulate";
  std::uint64_t seed = 1;
  CircuitConfig circuit;
  ParamsConfig params;
  SourcesConfig sources;
  IntegrationConfig integration;
  OptimizerConfig optimizer;
  EnsembleConfig ensemble;
  KacRiceConfig kacrice;
  PortfolioConfig portfolio;
  OutputConfig output;
};

/// Subcommands in canonical order.
const std::vector<std::string>& experiment_commands();

ExperimentConfig default_config(std::string_view command);

/// Overlays `j` onto default_config(command). Unknown keys and type errors raise
/// ConfigError naming the dotted field path.
ExperimentConfig config_from_json(const nlohmann::json& j, std::string_view command);
nlohmann::json to_json(const ExperimentConfig& config);

/// Raises ConfigError with the offending field path.
void validate_config(const ExperimentConfig& config);

struct ExperimentResult {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// Runs config.command and writes into config.output.directory.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace memcirc
