#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "memcirc/dynamics.hpp"
#include "memcirc/topology.hpp"

namespace memcirc {

enum class PredictionMethod { xi_zero, xi_corrected, alpha_corrected };

std::string_view to_string(PredictionMethod m);
PredictionMethod parse_prediction_method(std::string_view s);

struct AsymptoticPrediction {
  Vector w_infinity;  ///< entries in {0, 1}
  PredictionMethod method = PredictionMethod::xi_zero;
  int tie_count = 0;
};

/// w = (1 - sign(v)) / 2 where v is Omega S, (I + xi/2 Omega)^{-1} Omega S or
/// ((1 - alpha) I + xi/2 Omega)^{-1} Omega S. sign(0) = +1; a component is a tie
/// when |v_i| <= tie_tolerance * max_j |v_j| (all components tie when v = 0).
AsymptoticPrediction predict_asymptotic(const Matrix& omega, const Vector& sources,
                                        const MemristorParams& params, PredictionMethod method,
                                        double tie_tolerance = 1e-10);

struct AccuracyReport {
  double accuracy = 0.0;
  double binary_fraction = 0.0;  ///< fraction of terminal components within 1e-3 of {0,1}
  std::string warning;           ///< non-empty when the terminal state is not binary enough
};

/// Rounds the terminal state at 0.5 and compares with the prediction.
AccuracyReport prediction_accuracy(const Vector& terminal_state, const AsymptoticPrediction& prediction,
                                   double binarize_threshold = 0.9);
AccuracyReport prediction_accuracy(const SimulationTrace& trace, const AsymptoticPrediction& prediction,
                                   double binarize_threshold = 0.9);

struct RecollectionResult {
  Vector pattern_coefficients;
  Vector driven_source;
  AsymptoticPrediction prediction;  ///< alpha_corrected
  Vector target;                    ///< (1 - sign(sum_l rho_l A^l)) / 2
  Vector retrieved;                 ///< rounded terminal simulation state
  double overlap = 0.0;
  int tie_count = 0;                ///< ties in the target sign pattern
};

/// Drives the circuit Omega = A~^T A~ with S = sum_l rho_l A~^l and compares the
/// simulated terminal state with the loop sign pattern.
RecollectionResult recall_pattern(const LoopBasis& loop_basis, const Vector& coefficients,
                                  const MemristorParams& params, double dt, int steps,
                                  double initial_w = 0.5);

struct AccuracySweepRow {
  double xi = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  int n_samples = 0;
};

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracySweepRow>& rows);

}  // namespace memcirc
