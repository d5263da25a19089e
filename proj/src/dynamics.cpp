#include "memcirc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "memcirc/errors.hpp"
#include "memcirc/lyapunov.hpp"

namespace memcirc {

MemristorParams MemristorParams::from_xi(double alpha, double beta, double xi) {
  MemristorParams p{alpha, beta, xi, 1.0, 1.0 + xi};
  p.validate(false);
  return p;
}

MemristorParams MemristorParams::from_resistances(double alpha, double beta, double r_on,
                                                  double r_off) {
  MemristorParams p{alpha, beta, (r_off - r_on) / r_on, r_on, r_off};
  p.validate();
  return p;
}

void MemristorParams::validate(bool strict) const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidArgument("xi must be > 0");
  if (!strict) return;
  if (!(r_on > 0.0 && r_off > r_on)) throw InvalidArgument("resistances must satisfy 0 < r_on < r_off");
  if (std::abs(xi - (r_off - r_on) / r_on) > 1e-12 * std::max(1.0, xi))
    throw InvalidArgument("xi inconsistent with (r_off - r_on) / r_on");
}

double single_memristor_step(double w, double s_volts, const MemristorParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const double current = s_volts / params.resistance(w);
  const double next = w + dt * (params.alpha * w - params.r_on / params.beta * current);
  return std::clamp(next, 0.0, 1.0);
}

Vector memristor_velocity(const Vector& w, const Matrix& omega, const Vector& sources,
                          const MemristorParams& params, double* residual) {
  const Eigen::Index n = w.size();
  if (omega.rows() != n || omega.cols() != n || sources.size() != n)
    throw DimensionMismatch("state, interaction matrix and sources must share dimension N=" +
                            std::to_string(n));
  const Vector rhs = omega * sources;
  // I + xi * Omega * diag(w): scale column j by w_j.
  Matrix system = params.xi * (omega * w.asDiagonal());
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  const Vector x = lu.solve(rhs);
  const double res = (system * x - rhs).cwiseAbs().maxCoeff();
  const double scale = rhs.cwiseAbs().maxCoeff();
  if (!x.allFinite() || res > 1e-9 * scale + 1e-300)
    throw SingularSystem("linear solve (I + xi Omega W) x = Omega S failed, residual " +
                         std::to_string(res));
  if (residual) *residual = res;
  return params.alpha * w - x / params.beta;
}

NetworkState network_step(const NetworkState& state, const ProjectorMatrix& omega,
                          const Vector& sources, const MemristorParams& params, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const Vector v = memristor_velocity(state.w, omega.entries, sources, params);
  return NetworkState{(state.w + dt * v).cwiseMax(0.0).cwiseMin(1.0), state.time + dt};
}

int count_binary(const Vector& w, double tol) {
  int c = 0;
  for (double x : w)
    if (x <= tol || x >= 1.0 - tol) ++c;
  return c;
}

namespace {

int count_clamped(const Vector& w) {
  int c = 0;
  for (double x : w)
    if (x == 0.0 || x == 1.0) ++c;
  return c;
}

}  // namespace

SimulationTrace simulate(const NetworkState& w0, const ProjectorMatrix& omega, const Vector& sources,
                         const MemristorParams& params, double dt, int steps, int record_every) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  const Eigen::Index n = w0.w.size();
  if (omega.size() != n || sources.size() != n)
    throw DimensionMismatch("initial state, interaction matrix and sources disagree in size");
  if ((w0.w.array() < 0.0).any() || (w0.w.array() > 1.0).any())
    throw InvalidArgument("initial state must lie in [0,1]^N");

  const int rows = steps / record_every + 1 + (steps % record_every ? 1 : 0);
  SimulationTrace trace;
  trace.states.resize(rows, n);
  trace.times.reserve(rows);
  trace.lyapunov.reserve(rows);
  trace.lyapunov_asymptotic.reserve(rows);
  trace.clamped_counts.reserve(rows);
  trace.steps.reserve(rows);

  int row = 0;
  auto record = [&](const NetworkState& s, int k) {
    trace.states.row(row++) = s.w.transpose();
    trace.times.push_back(s.time);
    trace.lyapunov.push_back(lyapunov_value(s.w, omega.entries, sources, params));
    trace.lyapunov_asymptotic.push_back(lyapunov_asymptotic(s.w, omega.entries, sources, params));
    trace.clamped_counts.push_back(count_clamped(s.w));
    trace.steps.push_back(k);
  };

  NetworkState state = w0;
  record(state, 0);
  for (int k = 1; k <= steps; ++k) {
    try {
      state = network_step(state, omega, sources, params, dt);
    } catch (const SingularSystem& e) {
      throw SingularSystem("step " + std::to_string(k) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(k) + ": " + e.what());
    }
    // Accumulated time drifts; keep the grid exact.
    state.time = w0.time + k * dt;
    if (k % record_every == 0 || k == steps) record(state, k);
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  const Eigen::Index n = trace.states.cols();
  out << 't';
  for (Eigen::Index i = 0; i < n; ++i) out << ",w_" << i;
  out << ",L,L_a,clamped\n";
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < trace.states.rows(); ++r) {
    out << trace.times[r];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << trace.states(r, i);
    out << ',' << trace.lyapunov[r] << ',' << trace.lyapunov_asymptotic[r] << ','
        << trace.clamped_counts[r] << '\n';
  }
  out.precision(old_prec);
}

}  // namespace memcirc
