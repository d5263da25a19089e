#pragma once

#include <iosfwd>
#include <vector>

#include "memcirc/topology.hpp"
#include "memcirc/types.hpp"

namespace memcirc {

/// Memristor constants. xi = (r_off - r_on) / r_on is kept consistent with the
/// resistances by the factory functions.
struct MemristorParams {
  double alpha = 0.1;  ///< decay rate, 1/time
  double beta = 1.0;   ///< drive timescale
  double xi = 10.0;    ///< nonlinearity
  double r_on = 1.0;
  double r_off = 11.0;

  static MemristorParams from_xi(double alpha, double beta, double xi);
  static MemristorParams from_resistances(double alpha, double beta, double r_on, double r_off);

  /// Optimization mode needs xi without a physical resistance pair, so only
  /// alpha >= 0, beta > 0, xi > 0 are enforced unless strict is set.
  void validate(bool strict = true) const;

  double resistance(double w) const { return r_on * (1.0 - w) + r_off * w; }
};

struct NetworkState {
  Vector w;
  double time = 0.0;
};

/// Recorded rows obey the NetworkState box constraint; times[k] = t0 + k*record_every*dt.
struct SimulationTrace {
  std::vector<double> times;
  Matrix states;  ///< one row per recorded step
  std::vector<double> lyapunov;
  std::vector<double> lyapunov_asymptotic;
  std::vector<int> clamped_counts;
  std::vector<int> steps;  ///< integration step index of each row

  Vector final_state() const { return states.row(states.rows() - 1).transpose(); }
};

double single_memristor_step(double w, double s_volts, const MemristorParams& params, double dt);

/// Unclamped velocity dw/dt = alpha w - x / beta with (I + xi Omega W) x = Omega S.
/// `residual`, when given, receives max|(I + xi Omega W) x - Omega S|.
Vector memristor_velocity(const Vector& w, const Matrix& omega, const Vector& sources,
                          const MemristorParams& params, double* residual = nullptr);

NetworkState network_step(const NetworkState& state, const ProjectorMatrix& omega,
                          const Vector& sources, const MemristorParams& params, double dt);

/// Explicit Euler with clamping to [0,1]. Rows are recorded at step 0, every
/// `record_every` steps, and always at the final step.
SimulationTrace simulate(const NetworkState& w0, const ProjectorMatrix& omega, const Vector& sources,
                         const MemristorParams& params, double dt, int steps, int record_every = 1);

/// Number of components within tol of 0 or 1.
int count_binary(const Vector& w, double tol = 1e-3);

/// Header `t,w_0,...,w_{N-1},L,L_a,clamped`.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

}  // namespace memcirc
