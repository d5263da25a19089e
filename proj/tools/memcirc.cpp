// memcirc: reproducible experiments on memristive circuits.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "memcirc/errors.hpp"
#include "memcirc/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> xi, dt, lambda, t0;
  std::optional<int> steps;
  std::optional<long long> budget;
  bool dump_config = false;
};

memcirc::ExperimentConfig resolve(const std::string& command, const Overrides& o) {
  memcirc::ExperimentConfig cfg = memcirc::default_config(command);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw memcirc::IoError("cannot read config file " + o.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw memcirc::ConfigError("<config>", e.what());
    }
    cfg = memcirc::config_from_json(j, command);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output.directory = *o.out;
  if (o.xi) {
    cfg.params.xi = *o.xi;
    cfg.params.r_on.reset();
    cfg.params.r_off.reset();
    cfg.ensemble.xi_list = {*o.xi};
  }
  if (o.dt) cfg.integration.dt = *o.dt;
  if (o.steps) {
    // Ensemble commands only look at the terminal state.
    if (cfg.integration.record_every == cfg.integration.steps) cfg.integration.record_every = *o.steps;
    cfg.integration.steps = *o.steps;
  }
  if (o.lambda) cfg.optimizer.lambda = *o.lambda;
  if (o.t0) cfg.optimizer.t0 = *o.t0;
  if (o.budget) cfg.optimizer.budget = *o.budget;
  memcirc::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memristive circuit simulator and QUBO heuristic toolkit"};
  app.set_version_flag("--version", std::string(MEMCIRC_VERSION));
  app.require_subcommand(1);

  Overrides o;
  const std::vector<std::pair<std::string, std::string>> help{
      {"simulate", "integrate one circuit and record Lyapunov traces"},
      {"predict", "prediction-accuracy sweep over xi"},
      {"benchmark", "memristive vs annealing vs random on sampled circuits"},
      {"kacrice", "diagonal scaling fit, determinant identity and Kac-Rice sweep"},
      {"markowitz", "portfolio selection: memristive, annealing and combined pipeline"},
      {"omega-stats", "projector checks and off-diagonal statistics of one circuit"},
  };
  for (const auto& [name, desc] : help) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", o.config_path, "JSON configuration file");
    sub->add_option("--seed", o.seed, "root seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--xi", o.xi, "nonlinearity xi (replaces the xi list for predict)");
    sub->add_option("--dt", o.dt, "integration step");
    sub->add_option("--steps", o.steps, "integration steps");
    sub->add_option("--lambda", o.lambda, "annealing rate");
    sub->add_option("--t0", o.t0, "initial annealing temperature");
    sub->add_option("--budget", o.budget, "annealing steps");
    sub->add_flag("--dump-config", o.dump_config, "print the resolved configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const memcirc::ExperimentConfig cfg = resolve(command, o);
    if (o.dump_config) {
      std::cout << memcirc::to_json(cfg).dump(2) << '\n';
      return 0;
    }
    const auto result = memcirc::run_experiment(cfg);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const memcirc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const memcirc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const memcirc::FormatError& e) {
    std::cerr << "input format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const memcirc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid setting: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
