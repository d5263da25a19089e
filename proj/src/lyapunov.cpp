#include "memcirc/lyapunov.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "memcirc/errors.hpp"

namespace memcirc {

namespace {

void check_dims(const Vector& w, const Matrix& omega, const Vector& sources) {
  const Eigen::Index n = w.size();
  if (omega.rows() != n || omega.cols() != n || sources.size() != n)
    throw DimensionMismatch("state, interaction matrix and sources must share dimension");
}

Matrix off_diagonal(const Matrix& m) {
  Matrix off = m;
  off.diagonal().setZero();
  return off;
}

}  // namespace

double QuboInstance::energy(const Vector& w) const {
  return offset + linear.dot(w) + w.dot(quadratic * w);
}

double QuboInstance::flip_delta(const Vector& w, Eigen::Index i) const {
  const double d = 1.0 - 2.0 * w[i];
  return d * (linear[i] + 2.0 * quadratic.row(i).dot(w));
}

double IsingInstance::energy(const Vector& sigma) const {
  return offset + h_tilde.dot(sigma) + sigma.dot(coupling * sigma);
}

double lyapunov_value(const Vector& w, const Matrix& omega, const Vector& sources,
                      const MemristorParams& p) {
  check_dims(w, omega, sources);
  const double ax = p.alpha * p.xi;
  const Vector w2 = w.cwiseProduct(w);
  const Vector w3 = w2.cwiseProduct(w);
  const double cross = w.dot(omega * w2) - omega.diagonal().dot(w3);  // sum_{i != j} O_ij w_i w_j^2
  return -0.5 * p.alpha * w2.sum() - ax / 3.0 * omega.diagonal().dot(w3) - ax * cross +
         w.dot(omega * sources) / p.beta;
}

Vector effective_field(const Matrix& omega, const Vector& sources, const MemristorParams& p) {
  if (omega.rows() != sources.size() || omega.cols() != sources.size())
    throw DimensionMismatch("interaction matrix and sources must share dimension");
  Vector h = (omega * sources) / -p.beta;
  h.array() += 0.5 * p.alpha;
  h += p.alpha * p.xi / 3.0 * omega.diagonal();
  return h;
}

double lyapunov_asymptotic(const Vector& w, const Matrix& omega, const Vector& sources,
                           const MemristorParams& p) {
  check_dims(w, omega, sources);
  const Vector h = effective_field(omega, sources, p);
  const double pair = w.dot(omega * w) - omega.diagonal().dot(w.cwiseProduct(w));
  return -(w.dot(h) + p.alpha * p.xi * pair);
}

Vector lyapunov_gradient(const Vector& w, const Matrix& omega, const Vector& sources,
                         const MemristorParams& p) {
  check_dims(w, omega, sources);
  const double ax = p.alpha * p.xi;
  const Matrix off = off_diagonal(omega);
  const Vector w2 = w.cwiseProduct(w);
  Vector g = -p.alpha * w;
  g -= ax * omega.diagonal().cwiseProduct(w2);
  g -= ax * (off * w2);
  g += (omega * sources) / p.beta;
  g -= 2.0 * ax * w.cwiseProduct(off * w);
  return g;
}

Vector m_vector(const Vector& w, const Matrix& omega, const MemristorParams& p) {
  const Matrix off = off_diagonal(omega);
  return -2.0 * p.alpha * p.xi * w.cwiseProduct(off.transpose() * w);
}

LyapunovDiagnostics lyapunov_diagnostics(const Vector& w, const Matrix& omega, const Vector& sources,
                                         const MemristorParams& p, const Vector& velocity) {
  LyapunovDiagnostics d;
  d.value = lyapunov_value(w, omega, sources, p);
  d.asymptotic_value = lyapunov_asymptotic(w, omega, sources, p);
  d.gradient = lyapunov_gradient(w, omega, sources, p);
  d.m_vector = m_vector(w, omega, p);
  const Vector metric_v = velocity + p.xi * (omega * w.cwiseProduct(velocity));
  d.weighted_norm_term = velocity.dot(metric_v);
  d.derivative_estimate = -d.weighted_norm_term + d.m_vector.dot(velocity);
  return d;
}

MonotonicityBound monotonicity_bound(const Matrix& omega, const Vector& sources,
                                     const MemristorParams& p) {
  if (p.alpha * p.beta == 0.0) throw InvalidArgument("monotonicity bound needs alpha * beta != 0");
  const double n = static_cast<double>(omega.rows());
  MonotonicityBound b;
  b.s_of_n = (omega * sources).norm() / n;
  b.omega_bar = omega.cwiseAbs().maxCoeff();
  b.lhs = 4.0 * p.xi * p.xi * (1.0 + p.xi) * b.omega_bar * b.omega_bar;
  const double q = b.s_of_n / (p.alpha * p.beta);
  b.rhs = q * q - 2.0 * q;
  b.satisfied = b.lhs < b.rhs;
  return b;
}

QuboInstance to_qubo(const Matrix& omega, const Vector& sources, const MemristorParams& p) {
  QuboInstance q;
  q.linear = -effective_field(omega, sources, p);
  q.quadratic = -p.alpha * p.xi * off_diagonal(omega);
  q.offset = 0.0;
  return q;
}

IsingInstance ising_from_qubo(const QuboInstance& qubo) {
  // w = (1 + s)/2 expands sum_{i!=j} Q_ij w_i w_j into constant, field and coupling parts.
  Matrix q = qubo.quadratic;
  q.diagonal().setZero();
  IsingInstance ising;
  ising.coupling = 0.25 * q;
  ising.h_tilde = 0.5 * qubo.linear + 0.25 * (q.rowwise().sum() + q.colwise().sum().transpose());
  ising.offset = qubo.offset + 0.5 * qubo.linear.sum() + 0.25 * q.sum();
  return ising;
}

IsingInstance to_ising(const Matrix& omega, const Vector& sources, const MemristorParams& p) {
  return ising_from_qubo(to_qubo(omega, sources, p));
}

IsingInstance sk_scaled_ising(const Matrix& q, const Vector& sources, const MemristorParams& p) {
  const double n = static_cast<double>(q.rows());
  Matrix omega = std::sqrt(3.0 / n) * off_diagonal(q);
  omega.diagonal().setOnes();
  return to_ising(omega, sources, p);
}

void write_qubo(std::ostream& out, const QuboInstance& qubo) {
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  const Eigen::Index n = qubo.size();
  out << n << '\n' << "# offset " << qubo.offset << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    if (qubo.linear[i] != 0.0) out << i << ' ' << i << ' ' << qubo.linear[i] << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = qubo.quadratic(i, j) + qubo.quadratic(j, i);
      if (v != 0.0) out << i << ' ' << j << ' ' << v << '\n';
    }
  out.precision(old_prec);
}

QuboInstance read_qubo(std::istream& in) {
  std::string line;
  int lineno = 0;
  long long n = -1;
  QuboInstance q;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      double v = 0.0;
      if ((ls >> hash >> key >> v) && key == "offset") q.offset = v;
      continue;
    }
    if (n < 0) {
      if (!(ls >> n) || n < 0) throw FormatError("expected variable count", lineno);
      q.linear = Vector::Zero(n);
      q.quadratic = Matrix::Zero(n, n);
      continue;
    }
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v)) throw FormatError("expected 'i j value'", lineno);
    if (i < 0 || j < 0 || i >= n || j >= n) throw FormatError("index out of range", lineno);
    if (i == j) {
      q.linear[i] += v;
    } else {
      q.quadratic(i, j) += 0.5 * v;
      q.quadratic(j, i) += 0.5 * v;
    }
  }
  if (n < 0) throw FormatError("empty QUBO file", lineno);
  return q;
}

void write_ising(std::ostream& out, const IsingInstance& ising) {
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  const Eigen::Index n = ising.size();
  out << n << '\n' << "# offset " << ising.offset << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    if (ising.h_tilde[i] != 0.0) out << i << ' ' << i << ' ' << ising.h_tilde[i] << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = ising.coupling(i, j) + ising.coupling(j, i);
      if (v != 0.0) out << i << ' ' << j << ' ' << v << '\n';
    }
  out.precision(old_prec);
}

}  // namespace memcirc
