#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "memcirc/dynamics.hpp"
#include "memcirc/topology.hpp"

namespace memcirc {

struct OffDiagonalHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<long long> counts;  ///< bin k covers [lo + k*width, lo + (k+1)*width)
  long long total = 0;            ///< N(N-1)/2
  double mean = 0.0;
  double stddev = 0.0;
  double standard_error = 0.0;
  double outside_5sigma_fraction = 0.0;

  double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / counts.size(); }
};

/// Histogram of the strict upper triangle. A constant population collapses to one bin.
OffDiagonalHistogram offdiagonal_histogram(const Matrix& omega, int bins);

/// Width of the rescaled off-diagonals sqrt(N/3) * Omega_ij, used as the Gaussian width
/// of the coupling model.
double effective_sigma(const Matrix& omega);

struct ScalingSample {
  double n = 0.0;                        ///< memristor count (mean over seeds)
  double mean_one_minus_omega_ii = 0.0;
  double standard_error = 0.0;
  int circuits = 0;
};

struct OmegaScalingFit {
  double c = 0.0;
  double exponent = 0.0;
  std::vector<ScalingSample> samples;
  double residual = 0.0;  ///< RMS on the log-log scale
};

/// mean(1 - Omega_ii) of one matrix.
double mean_one_minus_diagonal(const Matrix& omega);

/// Least squares of log y = log c - exponent * log N. Needs >= 5 distinct N.
OmegaScalingFit fit_power_law(std::vector<ScalingSample> samples);

/// Erdos-Renyi circuits with approximately the requested edge counts; V is chosen from
/// N = p V (V - 1) / 2. Seeds are derived from root_seed.
OmegaScalingFit fit_diagonal_scaling(const std::vector<int>& circuit_sizes, double p, int seeds_per_size,
                                     std::uint64_t root_seed = 1);

/// Vertex count whose expected ER edge count is closest to n_edges.
int vertices_for_edges(int n_edges, double p);

/// Both sides in natural-log space.
struct DeterminantIdentity {
  double log_lhs = 0.0;  ///< log |det(Q - sqrt(N) I)|
  double log_rhs = 0.0;  ///< (N/2) log N + L log(1 - 1/sqrt(N))
  int rank = 0;
};

/// q must be an exact projector of dimension n; its rank is read from the trace.
DeterminantIdentity projector_det_identity(const Matrix& q, int n);

enum class Regime { exploding, vanishing, critical };
std::string_view to_string(Regime r);

struct KacRiceEstimate {
  double log_count = 0.0;       ///< L log(1 - 1/sqrt N) + N log rho (large alpha xi form)
  double full_log_count = 0.0;  ///< N log(sqrt3 alpha xi) + L log(1 - 1/sqrt N) + log Z
  Regime regime = Regime::vanishing;
  double sigma = 0.0;
  double rho = 0.0;             ///< sqrt(3) / (sqrt(pi) sigma)
  int n = 0;
  int l = 0;
  double z_term = 0.0;             ///< log Z from the closed form
  double simplified_z_term = 0.0;  ///< log Z with the bracket replaced by 1/(alpha xi)
};

/// Equal-sources approximation S_i = s_volts.
KacRiceEstimate kac_rice_count(int n, int l, double sigma, const MemristorParams& params, double s_volts);

/// log Z with one factor per source component.
double kac_rice_log_z(double sigma, const MemristorParams& params, const Vector& sources);

void write_scaling_csv(std::ostream& out, const OmegaScalingFit& fit);
void write_kac_rice_csv(std::ostream& out, const std::vector<KacRiceEstimate>& rows);

}  // namespace memcirc
