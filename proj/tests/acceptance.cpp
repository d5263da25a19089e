// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "memcirc/asymptotics.hpp"
#include "memcirc/complexity.hpp"
#include "memcirc/dynamics.hpp"
#include "memcirc/errors.hpp"
#include "memcirc/experiments.hpp"
#include "memcirc/lyapunov.hpp"
#include "memcirc/optimize.hpp"
#include "memcirc/portfolio.hpp"
#include "memcirc/rng.hpp"
#include "memcirc/topology.hpp"

using namespace memcirc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRoot = 1;

// Tolerances and thresholds.
constexpr double kIdempotenceTol = 1e-9;
constexpr double kTraceTol = 1e-6;
constexpr double kBasisTol = 1e-8;
constexpr double kDescentTol = 1e-6;
constexpr int kTransient = 10;
constexpr double kGradientRelTol = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kCornerTol = 1e-10;
constexpr double kCertifiedTol = 1e-8;
constexpr double kFitCLo = 1.5, kFitCHi = 2.0;
constexpr double kFitExpLo = 0.45, kFitExpHi = 0.55;
constexpr double kDetTol = 1e-9;
constexpr double kCritOffset = 1e-9;
constexpr double kAccuracyFloor = 0.9;
constexpr double kBeatsRandomFraction = 0.9;
constexpr double kMappingTol = 1e-8;
constexpr double kPipelineBeatsFraction = 0.7;
constexpr double kLimit1 = 60.0, kLimit2 = 120.0, kLimit6 = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector binary_state(std::uint64_t code, Eigen::Index n) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = (code >> i) & 1 ? 1.0 : 0.0;
  return w;
}

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / "memcirc_acceptance";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json run_summary(ExperimentConfig c, const fs::path& dir) {
  c.output.directory = dir.string();
  c.output.formats = {"json"};
  return run_experiment(c).summary;
}

// 1 ---------------------------------------------------------------------------

Outcome projector_suite() {
  const auto t0 = Clock::now();
  double idem = 0.0, trace = 0.0, basis = 0.0;
  int largest = 0;
  Rng pick(derive_seed(kRoot, "acceptance.projector"));
  for (int k = 0; k < 50; ++k) {
    const int v = 20 + static_cast<int>(pick.below(81));
    const auto g = generate_er_circuit(v, 0.7, derive_seed(kRoot, "acceptance.projector", k + 1));
    const auto omega = projector_from_cycles(fundamental_cycle_basis(g, 0));
    const auto report = inspect_projector(omega, false);
    idem = std::max(idem, report.idempotence_error);
    trace = std::max(trace, std::abs(report.trace - g.loop_count()));
    // A spanning tree grown from the opposite end gives a different loop basis.
    const auto other = projector_from_cycles(fundamental_cycle_basis(g, g.vertex_count - 1));
    basis = std::max(basis, (omega.entries - other.entries).cwiseAbs().maxCoeff());
    largest = std::max(largest, g.edge_count());
  }
  const double secs = seconds_since(t0);
  return {idem <= kIdempotenceTol && trace <= kTraceTol && basis <= kBasisTol && secs < kLimit1,
          fmt("max|O^2-O| %.2e, max|tr-L| %.2e, basis diff %.2e, largest N %d, %.1fs", idem, trace, basis, largest,
              secs)};
}

// 2 ---------------------------------------------------------------------------

Outcome lyapunov_descent() {
  const auto t0 = Clock::now();
  const double p = 0.9;
  const auto g = generate_er_circuit(vertices_for_edges(500, p), p, derive_seed(kRoot, "acceptance.descent"));
  const auto omega = projector_from_cycles(fundamental_cycle_basis(g));
  Rng rng(derive_seed(kRoot, "acceptance.descent", 1));
  const Vector s = rng.uniform_vector(omega.size(), -0.05, 0.05);
  const Vector w0 = rng.uniform_vector(omega.size(), 0.0, 1.0);
  const auto params = MemristorParams::from_xi(0.1, 1.0, 10.0);
  const auto tr = simulate(NetworkState{w0, 0.0}, omega, s, params, 0.1, 1000, 1);
  double worst = -std::numeric_limits<double>::infinity();
  int rises = 0, rises_clamped = 0;
  for (std::size_t k = kTransient + 1; k < tr.lyapunov.size(); ++k) {
    const double d = tr.lyapunov[k] - tr.lyapunov[k - 1];
    worst = std::max(worst, d);
    if (d > kDescentTol) {
      ++rises;
      rises_clamped += tr.clamped_counts[k - 1] > 0;
    }
  }
  const auto gap = [&](std::size_t k) { return std::abs(tr.lyapunov[k] - tr.lyapunov_asymptotic[k]); };
  const double g100 = gap(100), gend = gap(tr.lyapunov.size() - 1);
  const double secs = seconds_since(t0);
  return {worst <= kDescentTol && gend < g100 && secs < kLimit2,
          fmt("N %d, max step increase %.2e (%d rising steps, %d from clamped states), gap@100 %.3e, "
              "gap@1000 %.3e, %.1fs",
              g.edge_count(), worst, rises, rises_clamped, g100, gend, secs)};
}

// 3 ---------------------------------------------------------------------------

Outcome gradient_check() {
  double worst = 0.0;
  const auto params = MemristorParams::from_xi(0.1, 1.0, 10.0);
  for (int c = 0; c < 5; ++c) {
    const auto g = generate_er_circuit(8 + 3 * c, 0.7, derive_seed(kRoot, "acceptance.gradient", c));
    const Matrix omega = projector_from_cycles(fundamental_cycle_basis(g)).entries;
    Rng rng(derive_seed(kRoot, "acceptance.gradient.points", c));
    const Vector s = rng.uniform_vector(omega.rows(), -0.5, 0.5);
    for (int t = 0; t < 20; ++t) {
      const Vector w = rng.uniform_vector(omega.rows(), 0.05, 0.95);
      const Vector grad = lyapunov_gradient(w, omega, s, params);
      Vector fd(w.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        Vector up = w, down = w;
        up[i] += kFdStep;
        down[i] -= kFdStep;
        fd[i] = (lyapunov_value(up, omega, s, params) - lyapunov_value(down, omega, s, params)) / (2 * kFdStep);
      }
      worst = std::max(worst, (fd - grad).cwiseAbs().maxCoeff() / grad.cwiseAbs().maxCoeff());
    }
  }
  return {worst <= kGradientRelTol, fmt("100 points, worst relative error %.2e", worst)};
}

// 4 ---------------------------------------------------------------------------

Outcome corner_identity() {
  // First ER draw on 6 vertices with exactly 10 edges.
  CircuitGraph g;
  for (std::uint64_t k = 0;; ++k) {
    g = generate_er_circuit(6, 0.7, derive_seed(kRoot, "acceptance.corner", k));
    if (g.edge_count() == 10) break;
  }
  const Matrix omega = projector_from_cycles(fundamental_cycle_basis(g)).entries;
  Rng rng(derive_seed(kRoot, "acceptance.corner.sources"));
  const Vector s = rng.uniform_vector(10, -0.5, 0.5);
  const auto params = MemristorParams::from_xi(0.1, 1.0, 10.0);
  const auto qubo = to_qubo(omega, s, params);
  const auto ising = to_ising(omega, s, params);
  double la = 0.0, q = 0.0, is = 0.0;
  for (std::uint64_t code = 0; code < 1024; ++code) {
    const Vector w = binary_state(code, 10);
    const double lv = lyapunov_value(w, omega, s, params);
    const double lav = lyapunov_asymptotic(w, omega, s, params);
    la = std::max(la, std::abs(lv - lav));
    q = std::max(q, std::abs(qubo.energy(w) - lav));
    is = std::max(is, std::abs(ising.energy((2.0 * w.array() - 1.0).matrix()) - qubo.energy(w)));
  }
  return {la <= kCornerTol && q <= kCornerTol && is <= kCornerTol,
          fmt("1024 states, |L-La| %.2e, |QUBO-La| %.2e, |Ising-QUBO| %.2e", la, q, is)};
}

// 5 ---------------------------------------------------------------------------

Outcome certified_monotonicity() {
  int certified = 0, attempts = 0, failing_draws = 0, rises = 0, rises_clamped = 0;
  double worst = -std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(kRoot, "acceptance.certified"));
  while (certified < 50 && attempts < 20000) {
    ++attempts;
    const int v = 6 + static_cast<int>(rng.below(9));
    const auto g = generate_er_circuit(v, 0.7, rng.next());
    const auto omega = projector_from_cycles(fundamental_cycle_basis(g));
    const double alpha = rng.uniform(0.05, 0.5);
    const double xi = std::pow(10.0, rng.uniform(-3.0, 0.0));
    const auto params = MemristorParams::from_xi(alpha, 1.0, xi);
    const double amp = rng.uniform(0.5, 5.0);
    const Vector s = rng.uniform_vector(omega.size(), -amp, amp);
    if (!monotonicity_bound(omega.entries, s, params).satisfied) continue;
    ++certified;
    const auto tr = simulate(NetworkState{rng.uniform_vector(omega.size(), 0.0, 1.0), 0.0}, omega, s, params, 0.1,
                             300, 1);
    bool rose = false;
    for (std::size_t k = 1; k < tr.lyapunov.size(); ++k) {
      const double d = tr.lyapunov[k] - tr.lyapunov[k - 1];
      worst = std::max(worst, d);
      if (d > kCertifiedTol) {
        rose = true;
        rises_clamped += tr.clamped_counts[k - 1] > 0;
        ++rises;
      }
    }
    failing_draws += rose;
  }
  return {certified == 50 && worst <= kCertifiedTol,
          fmt("%d certified of %d draws, max step change %.2e, %d draws rise (%d rising steps, %d from clamped states)",
              certified, attempts, worst, failing_draws, rises, rises_clamped)};
}

// 6 ---------------------------------------------------------------------------

Outcome scaling_fit() {
  const auto t0 = Clock::now();
  const auto fit = fit_diagonal_scaling({100, 200, 400, 800, 1500}, 0.7, 3, derive_seed(kRoot, "acceptance.scaling"));
  const double secs = seconds_since(t0);
  return {fit.c >= kFitCLo && fit.c <= kFitCHi && fit.exponent >= kFitExpLo && fit.exponent <= kFitExpHi &&
              secs < kLimit6,
          fmt("c %.4f, exponent %.4f, largest N %.0f, %.1fs", fit.c, fit.exponent, fit.samples.back().n, secs)};
}

// 7 ---------------------------------------------------------------------------

Outcome kac_rice_identities() {
  double worst = 0.0;
  Rng rng(derive_seed(kRoot, "acceptance.det"));
  for (int k = 0; k < 20; ++k) {
    Matrix q;
    int n = 0;
    if (k % 2 == 0) {
      // Circuit projector.
      const auto g = generate_er_circuit(6 + static_cast<int>(rng.below(16)), 0.7, rng.next());
      if (g.edge_count() > 200) continue;
      q = projector_from_cycles(fundamental_cycle_basis(g)).entries;
      n = g.edge_count();
    } else {
      // Projector onto the span of Gaussian vectors.
      n = 10 + static_cast<int>(rng.below(191));
      const int rank = 1 + static_cast<int>(rng.below(n - 1));
      Matrix a(n, rank);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = rng.normal();
      const Matrix u = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(n, rank);
      q = u * u.transpose();
    }
    const auto d = projector_det_identity(q, n);
    worst = std::max(worst, std::abs(d.log_lhs - d.log_rhs));
  }
  const double crit = std::sqrt(3.0 / std::numbers::pi);
  const auto params = MemristorParams::from_xi(0.1, 1.0, 10.0);
  const bool below = kac_rice_count(1000, 700, crit - kCritOffset, params, 0.05).regime == Regime::exploding;
  const bool above = kac_rice_count(1000, 700, crit + kCritOffset, params, 0.05).regime == Regime::vanishing;
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 60; ++i) {
    const double lc = kac_rice_count(1000, 700, 0.05 * i, params, 0.05).log_count;
    monotone = monotone && lc < prev;
    prev = lc;
  }
  return {worst <= kDetTol && below && above && monotone,
          fmt("det identity worst %.2e over 20, flip %s/%s, monotone %s", worst, below ? "ok" : "no",
              above ? "ok" : "no", monotone ? "yes" : "no")};
}

// 8 ---------------------------------------------------------------------------

Outcome prediction_trend(const fs::path& dir) {
  const json s = run_summary(default_config("predict"), dir / "predict");
  std::map<double, double> acc;
  for (const auto& r : s["rows"]) acc[r["xi"].get<double>()] = r["mean_accuracy"].get<double>();
  const bool identity = s["xi_corrected_equals_xi_zero"].get<bool>();
  return {acc.count(0.1) && acc.count(10.0) && acc[0.1] >= kAccuracyFloor && acc[0.1] > acc[10.0] && identity,
          fmt("accuracy xi=0.1 %.3f, xi=1 %.3f, xi=10 %.3f, projector identity %s", acc[0.1], acc[1.0], acc[10.0],
              identity ? "holds" : "broken")};
}

// 9 ---------------------------------------------------------------------------

Outcome optimizer_ordering(const fs::path& dir) {
  const json big = run_summary(default_config("benchmark"), dir / "bench_large");
  const double fraction = big["memristive_below_random_fraction"].get<double>();

  auto small_cfg = default_config("benchmark");
  small_cfg.circuit.edges = 16;
  small_cfg.optimizer.brute_force_max_n = 20;
  small_cfg.output.directory = (dir / "bench_small").string();
  small_cfg.output.formats = {"json"};
  const json small = run_experiment(small_cfg).summary;
  int oracle_runs = 0;
  std::ifstream runs(dir / "bench_small" / "runs.jsonl");
  for (std::string line; std::getline(runs, line);)
    oracle_runs += json::parse(line)["method"] == "brute_force";
  const int violations = small["brute_force_violations"].get<int>();
  return {fraction >= kBeatsRandomFraction && violations == 0 && oracle_runs > 0,
          fmt("memristive below random on %.0f%% of 20, brute force violated %d times over %d small instances",
              100 * fraction, violations, oracle_runs)};
}

// 10 --------------------------------------------------------------------------

Outcome markowitz_pipeline(const fs::path& dir) {
  const auto p = synthetic_portfolio(12, 2.0, derive_seed(kRoot, "acceptance.markowitz"));
  const auto m = markowitz_to_dynamics(p, admissible_alpha(p), 1.0);
  double worst = 0.0;
  for (std::uint64_t code = 0; code < 4096; ++code) {
    const Vector w = binary_state(code, 12);
    worst = std::max(worst, std::abs(p.markowitz(w) + lyapunov_asymptotic(w, m.omega.entries, m.sources, m.params) -
                                     m.constant));
  }
  const json s = run_summary(default_config("markowitz"), dir / "markowitz");
  const int samples = s["samples"].get<int>();
  const int hits = s["pipeline_oracle_hits"].get<int>();
  const int beats = s["pipeline_beats_annealing"].get<int>();
  return {worst <= kMappingTol && s["assets"] == 20 && samples == 25 && 2 * hits > samples &&
              beats >= kPipelineBeatsFraction * samples,
          fmt("mapping error %.2e, pipeline hits oracle %d/%d, beats annealing %d/%d", worst, hits, samples, beats,
              samples)};
}

// 11 --------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

Outcome cli_determinism(const fs::path& dir) {
  const std::map<std::string, std::string> small{
      {"simulate", R"({"circuit": {"edges": 60}, "integration": {"steps": 100}})"},
      {"predict", R"({"circuit": {"edges": 60}, "integration": {"steps": 300}, "ensemble": {"samples": 3}})"},
      {"benchmark", R"({"circuit": {"edges": 16}, "ensemble": {"samples": 3}, "optimizer": {"random_samples": 50}})"},
      {"kacrice", R"({"ensemble": {"sizes": [20, 30, 40, 50, 60], "seeds_per_size": 1}, "kacrice": {"n": 200}})"},
      {"markowitz", R"({"portfolio": {"assets": 8}, "ensemble": {"samples": 3}})"},
      {"omega-stats", R"({"circuit": {"edges": 60}, "output": {"write_matrix": true}})"}};
  int identical = 0;
  std::string bad;
  for (const auto& [cmd, cfg] : small) {
    const fs::path cfg_path = dir / (cmd + ".json");
    std::ofstream(cfg_path) << cfg;
    const fs::path out = dir / ("cli_" + cmd);
    const std::string line = std::string("\"") + MEMCIRC_CLI + "\" " + cmd + " --config \"" + cfg_path.string() +
                             "\" --out \"" + out.string() + "\" > /dev/null";
    std::map<std::string, std::string> first;
    bool ok = std::system(line.c_str()) == 0;
    if (ok) first = snapshot(out);
    fs::remove_all(out);
    ok = ok && std::system(line.c_str()) == 0 && !first.empty() && snapshot(out) == first;
    if (ok)
      ++identical;
    else
      bad += " " + cmd;
  }
  return {identical == static_cast<int>(small.size()),
          fmt("%d/%zu commands byte-identical%s%s", identical, small.size(), bad.empty() ? "" : ", differing:",
              bad.c_str())};
}

}  // namespace

int main() {
  const fs::path dir = work_dir();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"projector suite", projector_suite},
      {"Lyapunov descent", lyapunov_descent},
      {"gradient correctness", gradient_check},
      {"corner identity", corner_identity},
      {"certified-region monotonicity", certified_monotonicity},
      {"diagonal scaling fit", scaling_fit},
      {"Kac-Rice identities", kac_rice_identities},
      {"prediction accuracy trend", [&] { return prediction_trend(dir); }},
      {"optimizer ordering", [&] { return optimizer_ordering(dir); }},
      {"Markowitz exactness and pipeline", [&] { return markowitz_pipeline(dir); }},
      {"CLI determinism", [&] { return cli_determinism(dir); }}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
