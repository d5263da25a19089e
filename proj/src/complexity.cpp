#include "memcirc/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <string>

#include "memcirc/errors.hpp"
#include "memcirc/rng.hpp"

namespace memcirc {

OffDiagonalHistogram offdiagonal_histogram(const Matrix& omega, int bins) {
  const Eigen::Index n = omega.rows();
  if (n < 2 || omega.cols() != n) throw InvalidArgument("histogram needs a square matrix with N >= 2");
  if (bins < 1) throw InvalidArgument("bins must be >= 1");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) values.push_back(omega(i, j));

  OffDiagonalHistogram h;
  h.total = static_cast<long long>(values.size());
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  double sum = 0.0;
  for (double v : values) sum += v;
  h.mean = sum / h.total;
  double ss = 0.0;
  for (double v : values) ss += (v - h.mean) * (v - h.mean);
  h.stddev = h.total > 1 ? std::sqrt(ss / (h.total - 1)) : 0.0;
  h.standard_error = h.stddev / std::sqrt(static_cast<double>(h.total));

  if (h.hi == h.lo) {
    h.counts.assign(1, h.total);
  } else {
    h.counts.assign(bins, 0);
    const double width = (h.hi - h.lo) / bins;
    for (double v : values) {
      auto k = static_cast<long long>((v - h.lo) / width);
      k = std::clamp<long long>(k, 0, bins - 1);
      ++h.counts[k];
    }
  }
  long long outside = 0;
  for (double v : values)
    if (std::abs(v - h.mean) > 5.0 * h.stddev) ++outside;
  h.outside_5sigma_fraction = static_cast<double>(outside) / h.total;
  return h;
}

double effective_sigma(const Matrix& omega) {
  const double n = static_cast<double>(omega.rows());
  return offdiagonal_histogram(omega, 1).stddev * std::sqrt(n / 3.0);
}

double mean_one_minus_diagonal(const Matrix& omega) {
  return 1.0 - omega.diagonal().mean();
}

OmegaScalingFit fit_power_law(std::vector<ScalingSample> samples) {
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (!(s.n > 0.0) || !(s.mean_one_minus_omega_ii > 0.0))
      throw InvalidArgument("scaling samples need positive N and positive 1 - Omega_ii");
    distinct.insert(s.n);
  }
  if (distinct.size() < 2) throw InvalidArgument("degenerate scaling fit: all sizes equal");
  if (distinct.size() < 5) throw InvalidArgument("scaling fit needs at least 5 distinct sizes");

  const auto m = static_cast<Eigen::Index>(samples.size());
  Matrix design(m, 2);
  Vector y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(samples[i].n);
    y[i] = std::log(samples[i].mean_one_minus_omega_ii);
  }
  const Vector coef = design.colPivHouseholderQr().solve(y);
  OmegaScalingFit fit;
  fit.c = std::exp(coef[0]);
  fit.exponent = -coef[1];
  fit.residual = std::sqrt((design * coef - y).squaredNorm() / m);
  fit.samples = std::move(samples);
  return fit;
}

int vertices_for_edges(int n_edges, double p) {
  const double v = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * n_edges / p));
  return std::max(3, static_cast<int>(std::lround(v)));
}

OmegaScalingFit fit_diagonal_scaling(const std::vector<int>& circuit_sizes, double p, int seeds_per_size,
                                     std::uint64_t root_seed) {
  if (seeds_per_size < 1) throw InvalidArgument("seeds_per_size must be >= 1");
  std::vector<ScalingSample> samples;
  for (int size : circuit_sizes) {
    const int v = vertices_for_edges(size, p);
    std::vector<double> ys, ns;
    for (int s = 0; s < seeds_per_size; ++s) {
      const auto seed = derive_seed(root_seed, "scaling:" + std::to_string(size), s);
      CircuitGraph g;
      try {
        g = generate_er_circuit(v, p, seed);
      } catch (const InvalidArgument&) {
        continue;
      }
      const auto omega = projector_from_cycles(fundamental_cycle_basis(g));
      ys.push_back(mean_one_minus_diagonal(omega.entries));
      ns.push_back(g.edge_count());
    }
    if (ys.empty()) throw InvalidArgument("no valid circuit for size " + std::to_string(size));
    ScalingSample smp;
    smp.circuits = static_cast<int>(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) {
      smp.n += ns[k] / ys.size();
      smp.mean_one_minus_omega_ii += ys[k] / ys.size();
    }
    if (ys.size() > 1) {
      double ss = 0.0;
      for (double y : ys) ss += (y - smp.mean_one_minus_omega_ii) * (y - smp.mean_one_minus_omega_ii);
      smp.standard_error = std::sqrt(ss / (ys.size() - 1)) / std::sqrt(static_cast<double>(ys.size()));
    }
    samples.push_back(smp);
  }
  return fit_power_law(std::move(samples));
}

DeterminantIdentity projector_det_identity(const Matrix& q, int n) {
  if (q.rows() != n || q.cols() != n) throw DimensionMismatch("projector dimension differs from n");
  DeterminantIdentity d;
  d.rank = static_cast<int>(std::lround(q.trace()));
  const double root_n = std::sqrt(static_cast<double>(n));
  Matrix shifted = q;
  shifted.diagonal().array() -= root_n;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  d.log_lhs = lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
  d.log_rhs = 0.5 * n * std::log(static_cast<double>(n)) + d.rank * std::log1p(-1.0 / root_n);
  return d;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::exploding: return "exploding";
    case Regime::vanishing: return "vanishing";
    case Regime::critical: return "critical";
  }
  return "unknown";
}

namespace {

// One factor of the Gaussian Z: e^{-3a(1)^2/(2 s^2 b(1)^2)}/|b(1)| + (same at w=0).
// A zero b contributes nothing (the Gaussian collapses onto a != 0).
double z_bracket(int n, double sigma, const MemristorParams& p, double source) {
  const double ax = p.alpha * p.xi;
  const double shrink = 1.0 - std::sqrt(3.0 / n);
  auto a = [&](double w) { return ax * shrink * w - (0.5 * p.alpha + ax * shrink); };
  auto b = [&](double w) { return ax * w + source / p.beta; };
  auto term = [&](double w) {
    const double bw = std::abs(b(w));
    if (bw == 0.0) return 0.0;
    const double aw = a(w);
    return std::exp(-3.0 * aw * aw / (2.0 * sigma * sigma * bw * bw)) / bw;
  };
  return term(1.0) + term(0.0);
}

double log_rho(double sigma) { return 0.5 * std::log(3.0 / std::numbers::pi) - std::log(sigma); }

}  // namespace

KacRiceEstimate kac_rice_count(int n, int l, double sigma, const MemristorParams& params, double s_volts) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (n < 2) throw InvalidArgument("n must be >= 2");
  if (l < 0) throw InvalidArgument("l must be >= 0");
  KacRiceEstimate k;
  k.n = n;
  k.l = l;
  k.sigma = sigma;
  k.rho = std::exp(log_rho(sigma));
  const double ax = params.alpha * params.xi;
  const double loop_term = l * std::log1p(-1.0 / std::sqrt(static_cast<double>(n)));
  k.z_term = n * log_rho(sigma) + n * std::log(z_bracket(n, sigma, params, s_volts));
  k.simplified_z_term = n * log_rho(sigma) - n * std::log(ax);
  k.full_log_count = n * std::log(std::sqrt(3.0) * ax) + loop_term + k.z_term;
  k.log_count = loop_term + n * log_rho(sigma);
  if (std::abs(k.rho - 1.0) <= 1e-9)
    k.regime = Regime::critical;
  else
    k.regime = k.rho > 1.0 ? Regime::exploding : Regime::vanishing;
  return k;
}

double kac_rice_log_z(double sigma, const MemristorParams& params, const Vector& sources) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  const auto n = static_cast<int>(sources.size());
  if (n < 2) throw InvalidArgument("need at least two sources");
  double z = n * log_rho(sigma);
  for (double s : sources) z += std::log(z_bracket(n, sigma, params, s));
  return z;
}

void write_scaling_csv(std::ostream& out, const OmegaScalingFit& fit) {
  const auto old_prec = out.precision();
  out << std::setprecision(17) << "N,mean_one_minus_omega_ii,stderr\n";
  for (const auto& s : fit.samples)
    out << s.n << ',' << s.mean_one_minus_omega_ii << ',' << s.standard_error << '\n';
  out.precision(old_prec);
}

void write_kac_rice_csv(std::ostream& out, const std::vector<KacRiceEstimate>& rows) {
  const auto old_prec = out.precision();
  out << std::setprecision(17) << "sigma,N,L,log_count,regime\n";
  for (const auto& r : rows)
    out << r.sigma << ',' << r.n << ',' << r.l << ',' << r.log_count << ',' << to_string(r.regime) << '\n';
  out.precision(old_prec);
}

}  // namespace memcirc
