#pragma once

#include <iosfwd>

#include "memcirc/dynamics.hpp"
#include "memcirc/types.hpp"

namespace memcirc {

struct LyapunovDiagnostics {
  double value = 0.0;
  double asymptotic_value = 0.0;
  Vector gradient;
  Vector m_vector;
  double weighted_norm_term = 0.0;  ///< v^T (I + xi Omega W) v for velocity v
  double derivative_estimate = 0.0; ///< -weighted_norm_term + M . v
};

struct MonotonicityBound {
  double lhs = 0.0;  ///< 4 xi^2 (1 + xi) max|Omega_ij|^2
  double rhs = 0.0;  ///< q^2 - 2q with q = s / (alpha beta)
  bool satisfied = false;
  double s_of_n = 0.0;  ///< ||Omega S|| / N
  double omega_bar = 0.0;
};

/// energy(w) = offset + sum_i linear_i w_i + sum_{i != j} quadratic_ij w_i w_j
/// with `quadratic` symmetric and zero on the diagonal.
struct QuboInstance {
  Vector linear;
  Matrix quadratic;
  double offset = 0.0;

  Eigen::Index size() const { return linear.size(); }
  double energy(const Vector& w) const;
  /// energy(w with bit i flipped) - energy(w), w binary.
  double flip_delta(const Vector& w, Eigen::Index i) const;
};

/// energy(sigma) = offset + sum_i h_tilde_i sigma_i + sum_{i != j} coupling_ij sigma_i sigma_j.
struct IsingInstance {
  Vector h_tilde;
  Matrix coupling;
  double offset = 0.0;

  Eigen::Index size() const { return h_tilde.size(); }
  double energy(const Vector& sigma) const;
};

double lyapunov_value(const Vector& w, const Matrix& omega, const Vector& sources,
                      const MemristorParams& params);

/// Field h_i = alpha/2 + (alpha xi / 3) Omega_ii - (1/beta) (Omega S)_i.
Vector effective_field(const Matrix& omega, const Vector& sources, const MemristorParams& params);

double lyapunov_asymptotic(const Vector& w, const Matrix& omega, const Vector& sources,
                           const MemristorParams& params);

Vector lyapunov_gradient(const Vector& w, const Matrix& omega, const Vector& sources,
                         const MemristorParams& params);

/// M_i = -2 alpha xi w_i sum_{j != i} Omega_ji w_j.
Vector m_vector(const Vector& w, const Matrix& omega, const MemristorParams& params);

/// Evaluates every diagnostic at w for a given velocity (normally memristor_velocity).
LyapunovDiagnostics lyapunov_diagnostics(const Vector& w, const Matrix& omega, const Vector& sources,
                                         const MemristorParams& params, const Vector& velocity);

/// Sufficient condition for dL/dt < 0. Throws InvalidArgument when alpha * beta == 0.
MonotonicityBound monotonicity_bound(const Matrix& omega, const Vector& sources,
                                     const MemristorParams& params);

/// QUBO whose energy on binary w equals L_a(w): linear = -h, quadratic = -alpha xi Omega_offdiag.
QuboInstance to_qubo(const Matrix& omega, const Vector& sources, const MemristorParams& params);

/// Spin form under w = (1 + sigma) / 2; energies agree state by state.
IsingInstance ising_from_qubo(const QuboInstance& qubo);
IsingInstance to_ising(const Matrix& omega, const Vector& sources, const MemristorParams& params);

/// Random-circuit approximation Omega ~ I + sqrt(3/N) Q_offdiag, so couplings scale
/// as alpha xi sqrt(3) / sqrt(N) Q_ij.
IsingInstance sk_scaled_ising(const Matrix& q, const Vector& sources, const MemristorParams& params);

/// Sparse triplets: "N", a "# offset <v>" line, then "i i h_i" fields and
/// "i j J_ij" (i < j) pair coefficients. The pair coefficient is the total weight of
/// w_i w_j, i.e. quadratic_ij + quadratic_ji.
void write_qubo(std::ostream& out, const QuboInstance& qubo);
QuboInstance read_qubo(std::istream& in);
void write_ising(std::ostream& out, const IsingInstance& ising);

}  // namespace memcirc
