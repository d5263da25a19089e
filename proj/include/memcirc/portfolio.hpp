#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "memcirc/dynamics.hpp"
#include "memcirc/topology.hpp"
#include "memcirc/types.hpp"

namespace memcirc {

/// Mean-variance data. Maximizing markowitz() is the goal; internally we minimize its negative.
struct PortfolioProblem {
  Vector returns;
  Matrix covariance;
  double tradeoff = 1.0;  ///< p
  std::vector<std::string> asset_names;

  Eigen::Index size() const { return returns.size(); }
  void validate() const;
  /// M(w) = sum_i (r_i - p/2 Sigma_ii) w_i - p/2 sum_{i!=j} w_i Sigma_ij w_j
  double markowitz(const Vector& w) const;
};

/// OR-Library layout: asset count, N lines "mean stddev", then "i j corr" (1-indexed, i <= j).
PortfolioProblem load_portfolio(std::istream& in, double tradeoff = 1.0);
PortfolioProblem load_portfolio(const std::filesystem::path& path, double tradeoff = 1.0);
void write_portfolio(std::ostream& out, const PortfolioProblem& problem);

struct MarkowitzMapping {
  ProjectorMatrix omega;  ///< -Sigma, flagged as a general matrix
  Vector sources;
  MemristorParams params;
  double constant = 0.0;  ///< M(w) + L_a(w) on binary states
  double condition_number = 0.0;
  std::vector<std::string> warnings;
};

/// xi = p / (2 alpha) and S = -beta Sigma^{-1} (alpha/2 + (p/3) eta - r), eta = diag(Sigma).
/// Omega = -Sigma makes L_a(w) = -M(w) exactly; the dynamics needs xi * lambda_max(Sigma) < 1,
/// which admissible_alpha() guarantees.
MarkowitzMapping markowitz_to_dynamics(const PortfolioProblem& problem, double alpha, double beta);

/// Smallest alpha keeping xi * lambda_max(Sigma) <= margin; alpha = p lambda_max / (2 margin).
double admissible_alpha(const PortfolioProblem& problem, double margin = 0.5);

/// Factor-model covariance B B^T + diag(U(0.01, 0.05)), B ~ N(0, 0.15^2) with 3 factors,
/// returns U(0, 0.15).
PortfolioProblem synthetic_portfolio(int assets, double tradeoff, std::uint64_t seed);

}  // namespace memcirc
