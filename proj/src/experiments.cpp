#include "memcirc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "memcirc/asymptotics.hpp"
#include "memcirc/complexity.hpp"
#include "memcirc/dynamics.hpp"
#include "memcirc/errors.hpp"
#include "memcirc/lyapunov.hpp"
#include "memcirc/optimize.hpp"
#include "memcirc/portfolio.hpp"
#include "memcirc/rng.hpp"
#include "memcirc/topology.hpp"

#ifndef MEMCIRC_VERSION
#define MEMCIRC_VERSION "unknown"
#endif

namespace memcirc {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration

namespace {

void read_value(const json& v, double& out, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ConfigError(path, "must be finite");
}

void read_value(const json& v, int& out, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(path, "integer out of range");
  out = static_cast<int>(x);
}

void read_value(const json& v, long long& out, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  out = v.get<long long>();
}

void read_value(const json& v, std::uint64_t& out, const std::string& path) {
  if (v.is_number_unsigned()) {
    out = v.get<std::uint64_t>();
  } else if (v.is_number_integer() && v.get<long long>() >= 0) {
    out = static_cast<std::uint64_t>(v.get<long long>());
  } else {
    throw ConfigError(path, "expected a non-negative integer");
  }
}

void read_value(const json& v, bool& out, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  out = v.get<bool>();
}

void read_value(const json& v, std::string& out, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  out = v.get<std::string>();
}

template <class T>
void read_value(const json& v, std::optional<T>& out, const std::string& path) {
  if (v.is_null()) {
    out.reset();
    return;
  }
  T x{};
  read_value(v, x, path);
  out = x;
}

template <class T>
void read_value(const json& v, std::vector<T>& out, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  out.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    T x{};
    read_value(v[i], x, path + "[" + std::to_string(i) + "]");
    out.push_back(x);
  }
}

// Walks one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  Section& get(const char* key, T& out) {
    used_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) read_value(*it, out, field(key));
    return *this;
  }

  /// Calls fn(Section&) on a nested object when present.
  template <class F>
  Section& nested(const char* key, F&& fn) {
    used_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      Section child(*it, field(key));
      fn(child);
      child.finish();
    }
    return *this;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(field(it.key().c_str()), "unknown key");
  }

 private:
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

bool has_format(const ExperimentConfig& c, std::string_view f) {
  return std::find(c.output.formats.begin(), c.output.formats.end(), f) != c.output.formats.end();
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> cmds{"simulate", "predict",   "benchmark",
                                             "kacrice",  "markowitz", "omega-stats"};
  return cmds;
}

ExperimentConfig default_config(std::string_view command) {
  const auto& cmds = experiment_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw ConfigError("command", "unknown command '" + std::string(command) + "'");
  ExperimentConfig c;
  c.command = std::string(command);
  if (command == "simulate") {
    c.circuit = {0, 500, 0.9};
  } else if (command == "predict") {
    c.circuit = {0, 200, 0.7};
    c.sources.lo = -0.5;
    c.sources.hi = 0.5;
    c.integration.steps = 600;
    c.integration.record_every = 600;
    c.ensemble.samples = 30;
  } else if (command == "benchmark") {
    c.circuit = {0, 100, 0.7};
    c.integration.steps = 60;
    c.integration.record_every = 60;
    c.integration.w0 = "constant";
  } else if (command == "kacrice") {
    c.circuit = {0, 1000, 0.7};
    const double crit = std::sqrt(3.0 / std::numbers::pi);
    c.kacrice.sigma_list = {0.5, 0.8, 0.9, crit - 1e-6, crit, crit + 1e-6, 1.1, 1.5, 2.0};
  } else if (command == "markowitz") {
    c.integration.dt.reset();
    c.integration.steps = 200;
    c.integration.record_every = 200;
    c.optimizer.stage2_lambda = 0.999;
    c.ensemble.samples = 25;
  } else if (command == "omega-stats") {
    c.circuit = {0, 1239, 0.7};
  }
  return c;
}

ExperimentConfig config_from_json(const json& j, std::string_view command) {
  std::string cmd(command);
  if (j.is_object() && j.contains("command")) {
    std::string in_file;
    read_value(j.at("command"), in_file, "command");
    if (cmd.empty()) cmd = in_file;
    if (in_file != cmd) throw ConfigError("command", "config is for '" + in_file + "', not '" + cmd + "'");
  }
  ExperimentConfig c = default_config(cmd);
  Section root(j, "");
  std::string ignored;
  root.get("command", ignored).get("seed", c.seed);
  root.nested("circuit", [&](Section& s) {
    s.get("vertices", c.circuit.vertices).get("edges", c.circuit.edges).get("p", c.circuit.p);
  });
  root.nested("params", [&](Section& s) {
    s.get("alpha", c.params.alpha).get("beta", c.params.beta).get("xi", c.params.xi);
    s.get("r_on", c.params.r_on).get("r_off", c.params.r_off);
  });
  root.nested("sources", [&](Section& s) {
    s.get("mode", c.sources.mode).get("lo", c.sources.lo).get("hi", c.sources.hi);
    s.get("values", c.sources.values).get("rho", c.sources.rho);
  });
  root.nested("integration", [&](Section& s) {
    auto& g = c.integration;
    s.get("dt", g.dt).get("steps", g.steps).get("record_every", g.record_every).get("transient", g.transient);
    s.get("w0", g.w0).get("w0_value", g.w0_value).get("w0_lo", g.w0_lo).get("w0_hi", g.w0_hi);
  });
  root.nested("optimizer", [&](Section& s) {
    auto& o = c.optimizer;
    s.get("t0", o.t0).get("lambda", o.lambda).get("budget", o.budget).get("random_samples", o.random_samples);
    s.get("stage2_t0", o.stage2_t0).get("stage2_lambda", o.stage2_lambda).get("stage2_steps", o.stage2_steps);
    s.get("brute_force_max_n", o.brute_force_max_n);
  });
  root.nested("ensemble", [&](Section& s) {
    auto& e = c.ensemble;
    s.get("samples", e.samples).get("xi_list", e.xi_list).get("prediction", e.prediction);
    s.get("binarize_threshold", e.binarize_threshold).get("sizes", e.sizes);
    s.get("seeds_per_size", e.seeds_per_size).get("bins", e.bins);
  });
  root.nested("kacrice", [&](Section& s) {
    s.get("n", c.kacrice.n).get("l", c.kacrice.l).get("s_volts", c.kacrice.s_volts);
    s.get("sigma_list", c.kacrice.sigma_list);
  });
  root.nested("portfolio", [&](Section& s) {
    auto& p = c.portfolio;
    s.get("path", p.path).get("assets", p.assets).get("tradeoff", p.tradeoff).get("alpha", p.alpha).get("beta", p.beta);
  });
  root.nested("output", [&](Section& s) {
    s.get("directory", c.output.directory).get("formats", c.output.formats).get("write_matrix", c.output.write_matrix);
  });
  root.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["circuit"] = {{"vertices", c.circuit.vertices}, {"edges", c.circuit.edges}, {"p", c.circuit.p}};
  j["params"] = {{"alpha", c.params.alpha}, {"beta", c.params.beta}, {"xi", c.params.xi},
                 {"r_on", opt(c.params.r_on)}, {"r_off", opt(c.params.r_off)}};
  j["sources"] = {{"mode", c.sources.mode}, {"lo", c.sources.lo}, {"hi", c.sources.hi},
                  {"values", c.sources.values}, {"rho", c.sources.rho}};
  const auto& g = c.integration;
  j["integration"] = {{"dt", opt(g.dt)},         {"steps", g.steps},       {"record_every", g.record_every},
                      {"transient", g.transient}, {"w0", g.w0},             {"w0_value", g.w0_value},
                      {"w0_lo", g.w0_lo},         {"w0_hi", g.w0_hi}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"t0", o.t0},
                    {"lambda", o.lambda},
                    {"budget", opt(o.budget)},
                    {"random_samples", o.random_samples},
                    {"stage2_t0", o.stage2_t0},
                    {"stage2_lambda", o.stage2_lambda},
                    {"stage2_steps", opt(o.stage2_steps)},
                    {"brute_force_max_n", o.brute_force_max_n}};
  const auto& e = c.ensemble;
  j["ensemble"] = {{"samples", e.samples},
                   {"xi_list", e.xi_list},
                   {"prediction", e.prediction},
                   {"binarize_threshold", e.binarize_threshold},
                   {"sizes", e.sizes},
                   {"seeds_per_size", e.seeds_per_size},
                   {"bins", e.bins}};
  j["kacrice"] = {{"n", c.kacrice.n}, {"l", c.kacrice.l}, {"s_volts", c.kacrice.s_volts},
                  {"sigma_list", c.kacrice.sigma_list}};
  const auto& p = c.portfolio;
  j["portfolio"] = {{"path", p.path}, {"assets", p.assets}, {"tradeoff", p.tradeoff},
                    {"alpha", opt(p.alpha)}, {"beta", p.beta}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats},
                 {"write_matrix", c.output.write_matrix}};
  return j;
}

void validate_config(const ExperimentConfig& c) {
  default_config(c.command);
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(c.circuit.vertices == 0 || c.circuit.vertices >= 3, "circuit.vertices", "must be 0 (auto) or >= 3");
  require(c.circuit.vertices > 0 || c.circuit.edges >= 3, "circuit.edges", "must be >= 3");
  require(c.circuit.p > 0.0 && c.circuit.p <= 1.0, "circuit.p", "must lie in (0, 1]");
  require(c.params.alpha >= 0.0, "params.alpha", "must be >= 0");
  require(c.params.beta > 0.0, "params.beta", "must be > 0");
  require(c.params.xi > 0.0, "params.xi", "must be > 0");
  require(c.params.r_on.has_value() == c.params.r_off.has_value(), "params.r_off",
          "r_on and r_off must be given together");
  if (c.params.r_on) {
    require(*c.params.r_on > 0.0, "params.r_on", "must be > 0");
    require(*c.params.r_off > *c.params.r_on, "params.r_off", "must exceed r_on");
  }
  const auto& s = c.sources;
  require(s.mode == "uniform" || s.mode == "explicit" || s.mode == "loop-pattern", "sources.mode",
          "must be uniform, explicit or loop-pattern");
  require(s.lo <= s.hi, "sources.hi", "must be >= sources.lo");
  require(s.mode != "explicit" || !s.values.empty(), "sources.values", "required for explicit mode");
  require(s.mode != "loop-pattern" || !s.rho.empty(), "sources.rho", "required for loop-pattern mode");
  const auto& g = c.integration;
  require(!g.dt || *g.dt > 0.0, "integration.dt", "must be > 0");
  require(g.dt || c.command == "markowitz", "integration.dt", "null (auto) is only valid for markowitz");
  require(g.steps >= 1, "integration.steps", "must be >= 1");
  require(g.record_every >= 1, "integration.record_every", "must be >= 1");
  require(g.transient >= 0, "integration.transient", "must be >= 0");
  require(g.w0 == "uniform" || g.w0 == "constant", "integration.w0", "must be uniform or constant");
  require(g.w0_value >= 0.0 && g.w0_value <= 1.0, "integration.w0_value", "must lie in [0, 1]");
  require(0.0 <= g.w0_lo && g.w0_lo <= g.w0_hi && g.w0_hi <= 1.0, "integration.w0_hi",
          "need 0 <= w0_lo <= w0_hi <= 1");
  const auto& o = c.optimizer;
  require(o.t0 > 0.0, "optimizer.t0", "must be > 0");
  require(o.lambda > 0.0 && o.lambda < 1.0, "optimizer.lambda", "must lie in (0, 1)");
  require(!o.budget || *o.budget >= 1, "optimizer.budget", "must be >= 1");
  require(o.random_samples >= 1, "optimizer.random_samples", "must be >= 1");
  require(o.stage2_t0 > 0.0, "optimizer.stage2_t0", "must be > 0");
  require(o.stage2_lambda > 0.0 && o.stage2_lambda < 1.0, "optimizer.stage2_lambda", "must lie in (0, 1)");
  require(!o.stage2_steps || *o.stage2_steps >= 0, "optimizer.stage2_steps", "must be >= 0");
  require(o.brute_force_max_n >= 0 && o.brute_force_max_n <= kBruteForceMaxN, "optimizer.brute_force_max_n",
          "must lie in [0, 25]");
  const auto& e = c.ensemble;
  require(e.samples >= 1, "ensemble.samples", "must be >= 1");
  require(!e.xi_list.empty(), "ensemble.xi_list", "must not be empty");
  for (double xi : e.xi_list) require(xi > 0.0, "ensemble.xi_list", "entries must be > 0");
  try {
    parse_prediction_method(e.prediction);
  } catch (const InvalidArgument&) {
    throw ConfigError("ensemble.prediction", "must be xi_zero, xi_corrected or alpha_corrected");
  }
  require(e.binarize_threshold >= 0.0 && e.binarize_threshold <= 1.0, "ensemble.binarize_threshold",
          "must lie in [0, 1]");
  require(e.seeds_per_size >= 1, "ensemble.seeds_per_size", "must be >= 1");
  require(e.bins >= 1, "ensemble.bins", "must be >= 1");
  if (c.command == "kacrice") {
    std::set<int> distinct(e.sizes.begin(), e.sizes.end());
    require(distinct.size() >= 5, "ensemble.sizes", "needs at least 5 distinct sizes");
    for (int n : e.sizes) require(n >= 3, "ensemble.sizes", "entries must be >= 3");
    require(c.kacrice.n >= 2, "kacrice.n", "must be >= 2");
    require(c.kacrice.l >= 0, "kacrice.l", "must be >= 0");
    require(!c.kacrice.sigma_list.empty(), "kacrice.sigma_list", "must not be empty");
    for (double sg : c.kacrice.sigma_list) require(sg > 0.0, "kacrice.sigma_list", "entries must be > 0");
  }
  const auto& p = c.portfolio;
  require(p.tradeoff > 0.0, "portfolio.tradeoff", "must be > 0");
  require(!p.alpha || *p.alpha > 0.0, "portfolio.alpha", "must be > 0");
  require(p.beta > 0.0, "portfolio.beta", "must be > 0");
  require(p.assets >= 1, "portfolio.assets", "must be >= 1");
  require(!c.output.directory.empty(), "output.directory", "must not be empty");
  for (const auto& f : c.output.formats)
    require(f == "csv" || f == "json", "output.formats", "entries must be csv or json");
}

// ---------------------------------------------------------------------------
// running

namespace {

class Output {
 public:
  explicit Output(const ExperimentConfig& c) : dir_(c.output.directory) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
  }

  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(17);
    files_.push_back(path);
    return out;
  }

  void write_json(const std::string& name, const json& j) {
    auto out = open(name);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + name);
  }

  std::vector<fs::path> files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

MemristorParams make_params(const ExperimentConfig& c, std::optional<double> xi_override = {}) {
  const auto& p = c.params;
  if (p.r_on && !xi_override) return MemristorParams::from_resistances(p.alpha, p.beta, *p.r_on, *p.r_off);
  return MemristorParams::from_xi(p.alpha, p.beta, xi_override.value_or(p.xi));
}

struct Circuit {
  CircuitGraph graph;
  CycleBasis basis;
  ProjectorMatrix omega;
  std::uint64_t seed = 0;
};

Circuit make_circuit(const ExperimentConfig& c, std::uint64_t index) {
  Circuit out;
  out.seed = derive_seed(c.seed, "graph", index);
  const int v = c.circuit.vertices > 0 ? c.circuit.vertices : vertices_for_edges(c.circuit.edges, c.circuit.p);
  out.graph = generate_er_circuit(v, c.circuit.p, out.seed);
  out.basis = fundamental_cycle_basis(out.graph);
  out.omega = projector_from_cycles(out.basis);
  return out;
}

Vector make_sources(const ExperimentConfig& c, const Circuit& circ, std::uint64_t index) {
  const Eigen::Index n = circ.graph.edge_count();
  const auto& s = c.sources;
  if (s.mode == "explicit") {
    if (static_cast<Eigen::Index>(s.values.size()) != n)
      throw ConfigError("sources.values", "length " + std::to_string(s.values.size()) +
                                              " differs from N=" + std::to_string(n));
    return Eigen::Map<const Vector>(s.values.data(), n);
  }
  if (s.mode == "loop-pattern") {
    const Eigen::Index l = circ.graph.loop_count();
    if (static_cast<Eigen::Index>(s.rho.size()) != l)
      throw ConfigError("sources.rho", "length " + std::to_string(s.rho.size()) +
                                           " differs from L=" + std::to_string(l));
    const LoopBasis lb = orthonormal_loop_basis(circ.basis);
    return lb.rows.transpose() * Eigen::Map<const Vector>(s.rho.data(), l);
  }
  Rng rng(derive_seed(c.seed, "sources", index));
  return rng.uniform_vector(n, s.lo, s.hi);
}

Vector make_initial(const ExperimentConfig& c, Eigen::Index n, std::uint64_t index) {
  const auto& g = c.integration;
  if (g.w0 == "constant") return Vector::Constant(n, g.w0_value);
  Rng rng(derive_seed(c.seed, "initial", index));
  return rng.uniform_vector(n, g.w0_lo, g.w0_hi);
}

std::string bitstring(const Vector& w) {
  std::string s;
  s.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) s.push_back(w[i] >= 0.5 ? '1' : '0');
  return s;
}

json run_record(const OptimizationOutcome& o, std::uint64_t seed, Eigen::Index n) {
  json j{{"method", std::string(to_string(o.method))},
         {"seed", seed},
         {"N", n},
         {"energy", o.best_energy},
         {"state", bitstring(o.best_state)},
         {"wall_steps", o.wall_steps},
         {"evaluations", o.evaluations}};
  if (!o.stage_energies.empty()) j["stage_energies"] = o.stage_energies;
  return j;
}

bool same_energy(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

json circuit_json(const Circuit& circ) {
  return {{"seed", circ.seed},
          {"V", circ.graph.vertex_count},
          {"N", circ.graph.edge_count()},
          {"L", circ.graph.loop_count()}};
}

// simulate ------------------------------------------------------------------

json cmd_simulate(const ExperimentConfig& c, Output& out) {
  const Circuit circ = make_circuit(c, 0);
  const Vector s = make_sources(c, circ, 0);
  const Eigen::Index n = s.size();
  const MemristorParams params = make_params(c);
  const NetworkState w0{make_initial(c, n, 0), 0.0};
  const SimulationTrace trace =
      simulate(w0, circ.omega, s, params, *c.integration.dt, c.integration.steps, c.integration.record_every);

  if (has_format(c, "csv")) {
    auto f = out.open("trace.csv");
    write_trace_csv(f, trace);
    auto g = out.open("lyapunov.csv");
    g << "step,t,L,L_a,gap,clamped\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k)
      g << trace.steps[k] << ',' << trace.times[k] << ',' << trace.lyapunov[k] << ','
        << trace.lyapunov_asymptotic[k] << ',' << std::abs(trace.lyapunov[k] - trace.lyapunov_asymptotic[k])
        << ',' << trace.clamped_counts[k] << '\n';
    auto e = out.open("graph.txt");
    write_edge_list(e, circ.graph);
    if (c.output.write_matrix) {
      auto m = out.open("omega.csv");
      write_matrix_csv(m, circ.omega.entries);
    }
  }

  double max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < trace.lyapunov.size(); ++k)
    if (trace.steps[k - 1] >= c.integration.transient)
      max_increase = std::max(max_increase, trace.lyapunov[k] - trace.lyapunov[k - 1]);
  const Vector wf = trace.final_state();
  // The bound is undefined without decay.
  json bound_json = nullptr;
  if (params.alpha * params.beta != 0.0) {
    const auto bound = monotonicity_bound(circ.omega.entries, s, params);
    bound_json = {{"lhs", bound.lhs}, {"rhs", bound.rhs}, {"satisfied", bound.satisfied},
                  {"s_of_n", bound.s_of_n}, {"omega_bar", bound.omega_bar}};
  }
  json summary{{"circuit", circuit_json(circ)},
               {"steps", c.integration.steps},
               {"final_time", trace.times.back()},
               {"final_binary_fraction", static_cast<double>(count_binary(wf)) / n},
               {"max_lyapunov_increase_after_transient",
                std::isfinite(max_increase) ? json(max_increase) : json(nullptr)},
               {"final_gap", std::abs(trace.lyapunov.back() - trace.lyapunov_asymptotic.back())},
               {"monotonicity_bound", bound_json}};
  return summary;
}

// predict -------------------------------------------------------------------

json cmd_predict(const ExperimentConfig& c, Output& out) {
  const PredictionMethod method = parse_prediction_method(c.ensemble.prediction);
  const int samples = c.ensemble.samples;
  std::ofstream per_sample;
  if (has_format(c, "csv")) {
    per_sample = out.open("predict_samples.csv");
    per_sample << "xi,sample,N,accuracy,binary_fraction,tie_count,xi_corrected_matches\n";
  }
  std::vector<AccuracySweepRow> rows;
  bool projector_identity = true;
  std::vector<std::string> warnings;
  for (double xi : c.ensemble.xi_list) {
    const MemristorParams params = make_params(c, xi);
    std::vector<double> acc;
    for (int k = 0; k < samples; ++k) {
      const Circuit circ = make_circuit(c, k);
      const Vector s = make_sources(c, circ, k);
      const NetworkState w0{make_initial(c, s.size(), k), 0.0};
      const auto trace = simulate(w0, circ.omega, s, params, *c.integration.dt, c.integration.steps,
                                  c.integration.steps);
      const auto pred = predict_asymptotic(circ.omega.entries, s, params, method);
      const auto zero = predict_asymptotic(circ.omega.entries, s, params, PredictionMethod::xi_zero);
      const auto corr = predict_asymptotic(circ.omega.entries, s, params, PredictionMethod::xi_corrected);
      const bool match = zero.w_infinity == corr.w_infinity;
      projector_identity = projector_identity && match;
      const auto report = prediction_accuracy(trace, pred, c.ensemble.binarize_threshold);
      if (!report.warning.empty())
        warnings.push_back("xi=" + std::to_string(xi) + " sample " + std::to_string(k) + ": " + report.warning);
      acc.push_back(report.accuracy);
      if (per_sample.is_open()) {
        per_sample << xi << ',' << k << ',' << s.size() << ',' << report.accuracy << ','
                   << report.binary_fraction << ',' << pred.tie_count << ',' << (match ? 1 : 0) << '\n';
        per_sample.flush();
      }
    }
    rows.push_back({xi, mean_of(acc), std_of(acc), samples});
  }
  if (has_format(c, "csv")) {
    auto f = out.open("predict.csv");
    write_accuracy_csv(f, rows);
  }
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"xi", r.xi},
                     {"mean_accuracy", r.mean_accuracy},
                     {"std_accuracy", r.std_accuracy},
                     {"stderr_accuracy", r.std_accuracy / std::sqrt(static_cast<double>(r.n_samples))},
                     {"n_samples", r.n_samples}});
  return {{"prediction", c.ensemble.prediction},
          {"rows", jrows},
          {"xi_corrected_equals_xi_zero", projector_identity},
          {"warnings", warnings}};
}

// benchmark -----------------------------------------------------------------

json cmd_benchmark(const ExperimentConfig& c, Output& out) {
  std::ofstream csv, runs;
  if (has_format(c, "csv")) {
    csv = out.open("benchmark.csv");
    csv << "sample,N,method,energy,wall_steps,evaluations\n";
  }
  if (has_format(c, "json")) runs = out.open("runs.jsonl");

  std::map<std::string, std::vector<double>> energies;
  int memristive_beats_random = 0;
  int oracle_violations = 0;
  const MemristorParams params = make_params(c);
  for (int k = 0; k < c.ensemble.samples; ++k) {
    const Circuit circ = make_circuit(c, k);
    const Vector s = make_sources(c, circ, k);
    const Eigen::Index n = s.size();
    const QuboInstance qubo = to_qubo(circ.omega.entries, s, params);

    std::vector<std::pair<OptimizationOutcome, std::uint64_t>> results;
    results.emplace_back(memristive_minimize(circ.omega, s, params, *c.integration.dt, c.integration.steps,
                                             make_initial(c, n, k)),
                         circ.seed);
    const AnnealSchedule sched{c.optimizer.t0, c.optimizer.lambda,
                               static_cast<int>(c.optimizer.budget.value_or(10 * n))};
    const auto anneal_seed = derive_seed(c.seed, "annealer", k);
    results.emplace_back(simulated_annealing(qubo, sched, anneal_seed), anneal_seed);
    const auto random_seed = derive_seed(c.seed, "random", k);
    results.emplace_back(random_search(qubo, c.optimizer.random_samples, random_seed), random_seed);
    if (n <= c.optimizer.brute_force_max_n) {
      results.emplace_back(brute_force(qubo), circ.seed);
      const double oracle = results.back().first.best_energy;
      for (const auto& [o, sd] : results)
        if (o.best_energy < oracle - 1e-9 * (1.0 + std::abs(oracle))) ++oracle_violations;
    }
    if (results[0].first.best_energy < results[2].first.best_energy) ++memristive_beats_random;

    for (const auto& [o, sd] : results) {
      const std::string name(to_string(o.method));
      energies[name].push_back(o.best_energy);
      if (csv.is_open())
        csv << k << ',' << n << ',' << name << ',' << o.best_energy << ',' << o.wall_steps << ','
            << o.evaluations << '\n';
      if (runs.is_open()) runs << run_record(o, sd, n).dump() << '\n';
    }
    if (csv.is_open()) csv.flush();
    if (runs.is_open()) runs.flush();
  }
  json means = json::object();
  for (const auto& [name, v] : energies) means[name] = mean_of(v);
  return {{"samples", c.ensemble.samples},
          {"mean_energy", means},
          {"memristive_below_random_fraction",
           static_cast<double>(memristive_beats_random) / c.ensemble.samples},
          {"brute_force_violations", oracle_violations}};
}

// kacrice -------------------------------------------------------------------

json cmd_kacrice(const ExperimentConfig& c, Output& out) {
  const OmegaScalingFit fit =
      fit_diagonal_scaling(c.ensemble.sizes, c.circuit.p, c.ensemble.seeds_per_size, derive_seed(c.seed, "scaling"));

  // Determinant identity on one circuit per size (dense LU, so capped at 400 edges).
  std::vector<json> det_rows;
  double worst_det = 0.0;
  for (std::size_t i = 0; i < c.ensemble.sizes.size(); ++i) {
    const int size = c.ensemble.sizes[i];
    if (size > 400) continue;
    const auto seed = derive_seed(c.seed, "det", i);
    const auto g = generate_er_circuit(vertices_for_edges(size, c.circuit.p), c.circuit.p, seed);
    const auto q = projector_from_cycles(fundamental_cycle_basis(g));
    const auto d = projector_det_identity(q.entries, g.edge_count());
    worst_det = std::max(worst_det, std::abs(d.log_lhs - d.log_rhs));
    det_rows.push_back({{"N", g.edge_count()}, {"L", d.rank}, {"log_lhs", d.log_lhs}, {"log_rhs", d.log_rhs}});
  }

  const Circuit circ = make_circuit([&] {
    ExperimentConfig k = c;
    k.circuit.vertices = 0;
    k.circuit.edges = c.kacrice.n;
    return k;
  }(), 0);
  const int n = circ.graph.edge_count();
  const int l = c.kacrice.l > 0 ? c.kacrice.l : circ.graph.loop_count();
  const double measured_sigma = effective_sigma(circ.omega.entries);
  const MemristorParams params = make_params(c);
  std::vector<KacRiceEstimate> rows;
  for (double sigma : c.kacrice.sigma_list) rows.push_back(kac_rice_count(n, l, sigma, params, c.kacrice.s_volts));

  if (has_format(c, "csv")) {
    auto f = out.open("scaling.csv");
    write_scaling_csv(f, fit);
    auto g = out.open("kacrice.csv");
    write_kac_rice_csv(g, rows);
    auto h = out.open("det_identity.csv");
    h << "N,L,log_lhs,log_rhs,abs_diff\n";
    for (const auto& r : det_rows)
      h << r["N"].get<int>() << ',' << r["L"].get<int>() << ',' << r["log_lhs"].get<double>() << ','
        << r["log_rhs"].get<double>() << ','
        << std::abs(r["log_lhs"].get<double>() - r["log_rhs"].get<double>()) << '\n';
  }
  json sweep = json::array();
  for (const auto& r : rows)
    sweep.push_back({{"sigma", r.sigma},
                     {"rho", r.rho},
                     {"log_count", r.log_count},
                     {"full_log_count", r.full_log_count},
                     {"regime", std::string(to_string(r.regime))}});
  return {{"fit", {{"c", fit.c}, {"exponent", fit.exponent}, {"residual", fit.residual}}},
          {"det_identity_max_abs_diff", worst_det},
          {"kac_rice_circuit", circuit_json(circ)},
          {"N", n},
          {"L", l},
          {"measured_sigma", measured_sigma},
          {"critical_sigma", std::sqrt(3.0 / std::numbers::pi)},
          {"sweep", sweep}};
}

// markowitz -----------------------------------------------------------------

json cmd_markowitz(const ExperimentConfig& c, Output& out) {
  const PortfolioProblem problem =
      c.portfolio.path.empty()
          ? synthetic_portfolio(c.portfolio.assets, c.portfolio.tradeoff, derive_seed(c.seed, "portfolio"))
          : load_portfolio(fs::path(c.portfolio.path), c.portfolio.tradeoff);
  const Eigen::Index n = problem.size();
  const double alpha = c.portfolio.alpha.value_or(admissible_alpha(problem, 0.5));
  const MarkowitzMapping map = markowitz_to_dynamics(problem, alpha, c.portfolio.beta);
  const QuboInstance qubo = to_qubo(map.omega.entries, map.sources, map.params);
  const double dt = c.integration.dt.value_or(0.1 / alpha);
  const int stage2_steps = c.optimizer.stage2_steps.value_or(static_cast<int>(40 * n));
  const long long budget = c.optimizer.budget.value_or(c.integration.steps + stage2_steps);

  std::optional<OptimizationOutcome> oracle;
  if (n <= c.optimizer.brute_force_max_n) oracle = brute_force(qubo);

  std::ofstream csv, runs;
  if (has_format(c, "csv")) {
    csv = out.open("comparison.csv");
    csv << "sample,method,energy,return,wall_steps,evaluations,matches_oracle\n";
  }
  if (has_format(c, "json")) runs = out.open("runs.jsonl");
  auto emit = [&](int sample, const OptimizationOutcome& o, std::uint64_t seed) {
    const int hit = oracle ? (same_energy(o.best_energy, oracle->best_energy) ? 1 : 0) : -1;
    if (csv.is_open())
      csv << sample << ',' << to_string(o.method) << ',' << o.best_energy << ',' << problem.markowitz(o.best_state)
          << ',' << o.wall_steps << ',' << o.evaluations << ',' << hit << '\n';
    if (runs.is_open()) runs << run_record(o, seed, n).dump() << '\n';
  };
  if (oracle) emit(-1, *oracle, 0);

  int pipeline_hits = 0, anneal_hits = 0, pipeline_beats = 0;
  std::vector<double> e_mem, e_pipe, e_ann;
  for (int k = 0; k < c.ensemble.samples; ++k) {
    const Vector w0 = make_initial(c, n, k);
    PipelineConfig pc;
    pc.dt = dt;
    pc.steps = c.integration.steps;
    pc.w0 = w0;
    pc.stage2 = {c.optimizer.stage2_t0, c.optimizer.stage2_lambda, stage2_steps};
    pc.seed = derive_seed(c.seed, "stage2", k);
    const auto mem = memristive_minimize(map.omega, map.sources, map.params, dt, pc.steps, w0);
    const auto pipe = pipeline_memristive_then_annealing(map.omega, map.sources, map.params, pc);

    const Vector start = (w0.array() >= 0.5).cast<double>().matrix();
    const auto anneal_seed = derive_seed(c.seed, "annealer", k);
    const auto ann = simulated_annealing(qubo, {c.optimizer.t0, c.optimizer.lambda, static_cast<int>(budget)},
                                         anneal_seed, start);
    emit(k, mem, pc.seed);
    emit(k, pipe, pc.seed);
    emit(k, ann, anneal_seed);
    if (csv.is_open()) csv.flush();
    if (runs.is_open()) runs.flush();

    e_mem.push_back(mem.best_energy);
    e_pipe.push_back(pipe.best_energy);
    e_ann.push_back(ann.best_energy);
    if (oracle && same_energy(pipe.best_energy, oracle->best_energy)) ++pipeline_hits;
    if (oracle && same_energy(ann.best_energy, oracle->best_energy)) ++anneal_hits;
    if (pipe.best_energy < ann.best_energy - 1e-12 * (1.0 + std::abs(ann.best_energy))) ++pipeline_beats;
  }
  auto best_return = [](const std::vector<double>& e) { return -*std::min_element(e.begin(), e.end()); };
  json summary{{"assets", n},
               {"alpha", alpha},
               {"beta", c.portfolio.beta},
               {"xi", map.params.xi},
               {"dt", dt},
               {"stage2_steps", stage2_steps},
               {"annealing_budget", budget},
               {"condition_number", map.condition_number},
               {"warnings", map.warnings},
               {"best_return",
                {{"memristive", best_return(e_mem)},
                 {"memristive_then_annealing", best_return(e_pipe)},
                 {"annealing", best_return(e_ann)}}},
               {"pipeline_beats_annealing", pipeline_beats},
               {"samples", c.ensemble.samples}};
  if (oracle) {
    summary["oracle_energy"] = oracle->best_energy;
    summary["oracle_return"] = problem.markowitz(oracle->best_state);
    summary["pipeline_oracle_hits"] = pipeline_hits;
    summary["annealing_oracle_hits"] = anneal_hits;
  }
  return summary;
}

// omega-stats ---------------------------------------------------------------

json cmd_omega_stats(const ExperimentConfig& c, Output& out) {
  const Circuit circ = make_circuit(c, 0);
  const Matrix& m = circ.omega.entries;
  const auto report = inspect_projector(circ.omega, true);
  const auto hist = offdiagonal_histogram(m, c.ensemble.bins);
  if (has_format(c, "csv")) {
    auto f = out.open("histogram.csv");
    f << "bin_lo,bin_hi,count\n";
    const double w = hist.bin_width();
    for (std::size_t k = 0; k < hist.counts.size(); ++k)
      f << hist.lo + k * w << ',' << (k + 1 == hist.counts.size() ? hist.hi : hist.lo + (k + 1) * w) << ','
        << hist.counts[k] << '\n';
    auto e = out.open("graph.txt");
    write_edge_list(e, circ.graph);
    if (c.output.write_matrix) {
      auto g = out.open("omega.csv");
      write_matrix_csv(g, m);
    }
  }
  const double n = static_cast<double>(m.rows());
  return {{"circuit", circuit_json(circ)},
          {"idempotence_error", report.idempotence_error},
          {"symmetry_error", report.symmetry_error},
          {"trace", report.trace},
          {"eigenvalue_error", report.eigenvalue_error},
          {"mean_one_minus_omega_ii", mean_one_minus_diagonal(m)},
          {"sqrt3_over_sqrt_n", std::sqrt(3.0 / n)},
          {"offdiagonal",
           {{"mean", hist.mean},
            {"stddev", hist.stddev},
            {"standard_error", hist.standard_error},
            {"outside_5sigma_fraction", hist.outside_5sigma_fraction},
            {"total", hist.total}}},
          {"effective_sigma", effective_sigma(m)}};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  Output out(config);
  out.write_json("provenance.json", {{"tool", "memcirc"},
                                     {"version", MEMCIRC_VERSION},
                                     {"command", config.command},
                                     {"seed", config.seed},
                                     {"config", to_json(config)}});
  json summary;
  const auto& cmd = config.command;
  if (cmd == "simulate")
    summary = cmd_simulate(config, out);
  else if (cmd == "predict")
    summary = cmd_predict(config, out);
  else if (cmd == "benchmark")
    summary = cmd_benchmark(config, out);
  else if (cmd == "kacrice")
    summary = cmd_kacrice(config, out);
  else if (cmd == "markowitz")
    summary = cmd_markowitz(config, out);
  else
    summary = cmd_omega_stats(config, out);
  summary["command"] = cmd;
  if (has_format(config, "json")) out.write_json("summary.json", summary);
  return {out.files(), summary};
}

}  // namespace memcirc
