#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "memcirc/dynamics.hpp"
#include "memcirc/lyapunov.hpp"

namespace memcirc {

enum class Method { memristive, annealing, random, brute_force, memristive_then_annealing };

std::string_view to_string(Method m);

/// Temperature at step k is t0 * rate^k.
struct AnnealSchedule {
  double t0 = 100.0;
  double rate = 0.995;
  int steps = 1000;

  double temperature(int k) const;
  /// steps == 0 is allowed only as a pipeline stage that does nothing.
  void validate(bool allow_empty = false) const;
};

/// All methods minimize the QUBO energy (L_a for circuit instances).
struct OptimizationOutcome {
  Vector best_state;
  double best_energy = 0.0;
  long long evaluations = 0;
  long long wall_steps = 0;
  Method method = Method::brute_force;
  std::vector<double> stage_energies;  ///< pipeline only: stage 1, stage 2
};

inline constexpr int kBruteForceMaxN = 25;

/// Exhaustive minimum; ties go to the lowest index with bit i = w_i.
OptimizationOutcome brute_force(const QuboInstance& qubo);

/// Single uniform bit-flip Metropolis; keeps the best state seen. When `initial` is
/// empty the start state is uniform random from `seed`.
OptimizationOutcome simulated_annealing(const QuboInstance& qubo, const AnnealSchedule& schedule,
                                        std::uint64_t seed, const std::optional<Vector>& initial = {});

/// index -> binary state; used to swap the uniform sampler for a deterministic one.
using StateSampler = std::function<Vector(long long index)>;

OptimizationOutcome random_search(const QuboInstance& qubo, long long n_samples, std::uint64_t seed);
OptimizationOutcome random_search(const QuboInstance& qubo, long long n_samples, const StateSampler& sampler);

/// Smallest eigenvalue of I + xi (Omega W + W Omega) / 2 at W = I.
double positivity_margin(const Matrix& omega, double xi);
/// Supremum of xi for which positivity_margin stays positive (infinity for PSD Omega).
double max_admissible_xi(const Matrix& omega);

/// Runs the memristor ODE and rounds the terminal state. Non-projector matrices must
/// pass the positivity check, otherwise PositivityViolation carries the largest
/// admissible xi. An empty w0 means 0.5 everywhere.
OptimizationOutcome memristive_minimize(const ProjectorMatrix& omega, const Vector& sources,
                                        const MemristorParams& params, double dt, int steps,
                                        const Vector& w0 = Vector());

struct PipelineConfig {
  double dt = 0.1;
  int steps = 60;
  Vector w0;
  AnnealSchedule stage2{0.025, 0.995, 0};
  std::uint64_t seed = 0;
};

/// Memristive stage, then annealing started from its rounded state.
OptimizationOutcome pipeline_memristive_then_annealing(const ProjectorMatrix& omega, const Vector& sources,
                                                       const MemristorParams& params,
                                                       const PipelineConfig& config);

/// Energy recomputed from scratch; used to check outcomes.
double objective(const QuboInstance& qubo, const Vector& state);

}  // namespace memcirc
