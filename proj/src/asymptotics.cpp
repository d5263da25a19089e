#include "memcirc/asymptotics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "memcirc/errors.hpp"

namespace memcirc {

std::string_view to_string(PredictionMethod m) {
  switch (m) {
    case PredictionMethod::xi_zero: return "xi_zero";
    case PredictionMethod::xi_corrected: return "xi_corrected";
    case PredictionMethod::alpha_corrected: return "alpha_corrected";
  }
  return "unknown";
}

PredictionMethod parse_prediction_method(std::string_view s) {
  if (s == "xi_zero") return PredictionMethod::xi_zero;
  if (s == "xi_corrected") return PredictionMethod::xi_corrected;
  if (s == "alpha_corrected") return PredictionMethod::alpha_corrected;
  throw InvalidArgument("unknown prediction method '" + std::string(s) + "'");
}

namespace {

Vector sign_argument(const Matrix& omega, const Vector& sources, const MemristorParams& params,
                     PredictionMethod method) {
  const Vector os = omega * sources;
  if (method == PredictionMethod::xi_zero) return os;
  const double diag = method == PredictionMethod::xi_corrected ? 1.0 : 1.0 - params.alpha;
  Matrix m = 0.5 * params.xi * omega;
  m.diagonal().array() += diag;
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > 1e-14))
    throw SingularSystem(std::string("prediction matrix is singular for method ") +
                         std::string(to_string(method)));
  return lu.solve(os);
}

Vector sign_pattern(const Vector& v, double tie_tolerance, int* ties) {
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  Vector w(v.size());
  int t = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const bool tie = std::abs(v[i]) <= tie_tolerance * scale;
    if (tie) ++t;
    w[i] = (tie || v[i] > 0.0) ? 0.0 : 1.0;
  }
  if (ties) *ties = t;
  return w;
}

}  // namespace

AsymptoticPrediction predict_asymptotic(const Matrix& omega, const Vector& sources,
                                        const MemristorParams& params, PredictionMethod method,
                                        double tie_tolerance) {
  if (omega.rows() != sources.size() || omega.cols() != sources.size())
    throw DimensionMismatch("interaction matrix and sources must share dimension");
  AsymptoticPrediction p;
  p.method = method;
  p.w_infinity = sign_pattern(sign_argument(omega, sources, params, method), tie_tolerance, &p.tie_count);
  return p;
}

AccuracyReport prediction_accuracy(const Vector& terminal, const AsymptoticPrediction& prediction,
                                   double binarize_threshold) {
  if (terminal.size() != prediction.w_infinity.size())
    throw DimensionMismatch("terminal state and prediction differ in length");
  AccuracyReport r;
  const double n = static_cast<double>(terminal.size());
  if (n == 0) return r;
  int match = 0;
  for (Eigen::Index i = 0; i < terminal.size(); ++i) {
    const double rounded = terminal[i] >= 0.5 ? 1.0 : 0.0;
    if (rounded == prediction.w_infinity[i]) ++match;
  }
  r.accuracy = match / n;
  r.binary_fraction = count_binary(terminal) / n;
  if (r.binary_fraction < binarize_threshold)
    r.warning = "terminal state only " + std::to_string(r.binary_fraction) +
                " binary, below threshold " + std::to_string(binarize_threshold);
  return r;
}

AccuracyReport prediction_accuracy(const SimulationTrace& trace, const AsymptoticPrediction& prediction,
                                   double binarize_threshold) {
  if (trace.states.rows() == 0) throw InvalidArgument("empty trace");
  return prediction_accuracy(trace.final_state(), prediction, binarize_threshold);
}

RecollectionResult recall_pattern(const LoopBasis& loop_basis, const Vector& coefficients,
                                  const MemristorParams& params, double dt, int steps,
                                  double initial_w) {
  const Matrix& a = loop_basis.rows;
  if (coefficients.size() != a.rows())
    throw DimensionMismatch("need one coefficient per loop (L=" + std::to_string(a.rows()) + ")");
  RecollectionResult r;
  r.pattern_coefficients = coefficients;
  r.driven_source = a.transpose() * coefficients;
  const ProjectorMatrix omega{a.transpose() * a, true};
  r.prediction = predict_asymptotic(omega.entries, r.driven_source, params,
                                    PredictionMethod::alpha_corrected);
  r.target = sign_pattern(r.driven_source, 1e-10, &r.tie_count);

  const NetworkState w0{Vector::Constant(a.cols(), initial_w), 0.0};
  const SimulationTrace trace = simulate(w0, omega, r.driven_source, params, dt, steps, steps);
  const Vector final_w = trace.final_state();
  r.retrieved = (final_w.array() >= 0.5).cast<double>().matrix();
  int match = 0;
  for (Eigen::Index i = 0; i < final_w.size(); ++i)
    if (r.retrieved[i] == r.target[i]) ++match;
  r.overlap = final_w.size() ? static_cast<double>(match) / final_w.size() : 0.0;
  return r;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracySweepRow>& rows) {
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  out << "xi,mean_accuracy,std_accuracy,n_samples\n";
  for (const auto& r : rows)
    out << r.xi << ',' << r.mean_accuracy << ',' << r.std_accuracy << ',' << r.n_samples << '\n';
  out.precision(old_prec);
}

}  // namespace memcirc
