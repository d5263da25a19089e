#include "memcirc/optimize.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "memcirc/errors.hpp"
#include "memcirc/rng.hpp"

namespace memcirc {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::memristive: return "memristive";
    case Method::annealing: return "annealing";
    case Method::random: return "random";
    case Method::brute_force: return "brute_force";
    case Method::memristive_then_annealing: return "memristive_then_annealing";
  }
  return "unknown";
}

double AnnealSchedule::temperature(int k) const { return t0 * std::pow(rate, k); }

void AnnealSchedule::validate(bool allow_empty) const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw InvalidArgument("annealing t0 must be > 0");
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("annealing rate must lie in (0, 1)");
  if (steps < (allow_empty ? 0 : 1)) throw InvalidArgument("annealing steps must be >= 1");
}

double objective(const QuboInstance& qubo, const Vector& state) { return qubo.energy(state); }

OptimizationOutcome brute_force(const QuboInstance& qubo) {
  const Eigen::Index n = qubo.size();
  if (n > kBruteForceMaxN)
    throw InvalidArgument("brute force limited to N <= " + std::to_string(kBruteForceMaxN));
  if (n < 1) throw InvalidArgument("empty QUBO");

  // Gray-code walk with incremental energies, resynchronized periodically.
  Vector w = Vector::Zero(n);
  double e = qubo.energy(w);
  double best = e;
  std::uint64_t code = 0, best_code = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int bit = std::countr_zero(step);
    e += qubo.flip_delta(w, bit);
    w[bit] = 1.0 - w[bit];
    code ^= std::uint64_t{1} << bit;
    if ((step & 4095) == 0) e = qubo.energy(w);
    const double tol = 1e-12 * (1.0 + std::abs(best));
    if (e < best - tol || (std::abs(e - best) <= tol && code < best_code)) {
      best = e;
      best_code = code;
    }
  }

  OptimizationOutcome out;
  out.method = Method::brute_force;
  out.best_state = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) out.best_state[i] = (best_code >> i) & 1 ? 1.0 : 0.0;
  out.best_energy = qubo.energy(out.best_state);
  out.evaluations = static_cast<long long>(total);
  out.wall_steps = static_cast<long long>(total);
  return out;
}

OptimizationOutcome simulated_annealing(const QuboInstance& qubo, const AnnealSchedule& schedule,
                                        std::uint64_t seed, const std::optional<Vector>& initial) {
  schedule.validate(true);
  const Eigen::Index n = qubo.size();
  if (n < 1) throw InvalidArgument("empty QUBO");
  Rng rng(seed);
  Vector w(n);
  if (initial) {
    if (initial->size() != n) throw DimensionMismatch("initial state has the wrong length");
    w = *initial;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  double e = qubo.energy(w);
  double best = e;
  Vector best_state = w;
  double temperature = schedule.t0;
  for (int k = 0; k < schedule.steps; ++k) {
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    const double delta = qubo.flip_delta(w, i);
    const double u = rng.uniform();
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
      w[i] = 1.0 - w[i];
      e += delta;
      if (e < best) {
        best = e;
        best_state = w;
      }
    }
    temperature *= schedule.rate;
  }
  OptimizationOutcome out;
  out.method = Method::annealing;
  out.best_state = std::move(best_state);
  out.best_energy = qubo.energy(out.best_state);
  out.evaluations = schedule.steps + 1;
  out.wall_steps = schedule.steps;
  return out;
}

OptimizationOutcome random_search(const QuboInstance& qubo, long long n_samples, const StateSampler& sampler) {
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  OptimizationOutcome out;
  out.method = Method::random;
  out.best_energy = std::numeric_limits<double>::infinity();
  for (long long k = 0; k < n_samples; ++k) {
    Vector w = sampler(k);
    if (w.size() != qubo.size()) throw DimensionMismatch("sampler returned a state of the wrong length");
    const double e = qubo.energy(w);
    if (e < out.best_energy) {
      out.best_energy = e;
      out.best_state = std::move(w);
    }
  }
  out.evaluations = n_samples;
  out.wall_steps = n_samples;
  return out;
}

OptimizationOutcome random_search(const QuboInstance& qubo, long long n_samples, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = qubo.size();
  return random_search(qubo, n_samples, [&](long long) {
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    return w;
  });
}

double positivity_margin(const Matrix& omega, double xi) {
  // At W = I the symmetrized operator is I + xi Omega.
  Eigen::SelfAdjointEigenSolver<Matrix> es(omega, Eigen::EigenvaluesOnly);
  return 1.0 + xi * es.eigenvalues().minCoeff();
}

double max_admissible_xi(const Matrix& omega) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(omega, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

OptimizationOutcome memristive_minimize(const ProjectorMatrix& omega, const Vector& sources,
                                        const MemristorParams& params, double dt, int steps,
                                        const Vector& w0) {
  const Matrix& m = omega.entries;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("interaction matrix must be symmetric");
  if (!omega.is_exact_projector && !(positivity_margin(m, params.xi) > 0.0)) {
    const double xi_max = max_admissible_xi(m);
    throw PositivityViolation("I + xi (Omega W + W Omega)/2 is not positive definite at xi=" +
                                  std::to_string(params.xi) + "; largest admissible xi is " +
                                  std::to_string(xi_max),
                              xi_max);
  }
  const Eigen::Index n = m.rows();
  const NetworkState start{w0.size() ? w0 : Vector::Constant(n, 0.5), 0.0};
  const SimulationTrace trace = simulate(start, omega, sources, params, dt, steps, steps);

  OptimizationOutcome out;
  out.method = Method::memristive;
  out.best_state = (trace.final_state().array() >= 0.5).cast<double>().matrix();
  out.best_energy = to_qubo(m, sources, params).energy(out.best_state);
  out.evaluations = steps;
  out.wall_steps = steps;
  return out;
}

OptimizationOutcome pipeline_memristive_then_annealing(const ProjectorMatrix& omega, const Vector& sources,
                                                       const MemristorParams& params,
                                                       const PipelineConfig& config) {
  config.stage2.validate(true);
  const OptimizationOutcome stage1 =
      memristive_minimize(omega, sources, params, config.dt, config.steps, config.w0);
  OptimizationOutcome out = stage1;
  out.method = Method::memristive_then_annealing;
  out.stage_energies = {stage1.best_energy, stage1.best_energy};
  if (config.stage2.steps == 0) return out;

  const QuboInstance qubo = to_qubo(omega.entries, sources, params);
  const OptimizationOutcome stage2 =
      simulated_annealing(qubo, config.stage2, config.seed, stage1.best_state);
  out.stage_energies[1] = stage2.best_energy;
  out.evaluations += stage2.evaluations;
  out.wall_steps += stage2.wall_steps;
  if (stage2.best_energy < stage1.best_energy) {
    out.best_state = stage2.best_state;
    out.best_energy = stage2.best_energy;
  }
  return out;
}

}  // namespace memcirc
