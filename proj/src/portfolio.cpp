#include "memcirc/portfolio.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "memcirc/errors.hpp"
#include "memcirc/rng.hpp"

namespace memcirc {

void PortfolioProblem::validate() const {
  const Eigen::Index n = returns.size();
  if (n < 1) throw InvalidArgument("portfolio has no assets");
  if (covariance.rows() != n || covariance.cols() != n)
    throw DimensionMismatch("covariance must be N x N with N = number of returns");
  if (!(tradeoff > 0.0)) throw InvalidArgument("tradeoff p must be > 0");
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("covariance must be symmetric");
  if ((covariance.diagonal().array() < 0.0).any()) throw InvalidArgument("negative variance");
  if (!asset_names.empty() && static_cast<Eigen::Index>(asset_names.size()) != n)
    throw DimensionMismatch("asset_names length differs from N");
}

double PortfolioProblem::markowitz(const Vector& w) const {
  const double half_p = 0.5 * tradeoff;
  const Vector eta = covariance.diagonal();
  const double pair = w.dot(covariance * w) - eta.dot(w.cwiseProduct(w));
  return (returns - half_p * eta).dot(w) - half_p * pair;
}

PortfolioProblem load_portfolio(std::istream& in, double tradeoff) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw FormatError("empty portfolio file", 1);
  long long n = 0;
  {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> n) || (ls >> extra) || n < 1) throw FormatError("expected asset count", lineno);
  }

  PortfolioProblem p;
  p.tradeoff = tradeoff;
  p.returns = Vector::Zero(n);
  Vector stddev(n);
  for (long long i = 0; i < n; ++i) {
    if (!next_line()) throw FormatError("missing 'mean stddev' line for asset " + std::to_string(i + 1), lineno + 1);
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> p.returns[i] >> stddev[i]) || (ls >> extra))
      throw FormatError("expected 'mean stddev'", lineno);
    if (!(stddev[i] >= 0.0)) throw FormatError("negative standard deviation", lineno);
  }

  Matrix corr = Matrix::Zero(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  while (next_line()) {
    std::istringstream ls(line);
    long long i = 0, j = 0;
    double c = 0.0;
    std::string extra;
    if (!(ls >> i >> j >> c) || (ls >> extra)) throw FormatError("expected 'i j correlation'", lineno);
    if (i < 1 || j < 1 || i > n || j > n) throw FormatError("asset index out of range", lineno);
    if (!(c >= -1.0 && c <= 1.0)) throw FormatError("correlation outside [-1, 1]", lineno);
    --i;
    --j;
    if (i == j && c != 1.0) throw FormatError("self-correlation must be 1", lineno);
    if (seen(i, j)) throw FormatError("duplicate pair", lineno);
    seen(i, j) = seen(j, i) = true;
    corr(i, j) = corr(j, i) = c;
  }
  for (long long i = 0; i < n; ++i)
    for (long long j = i; j < n; ++j)
      if (!seen(i, j))
        throw FormatError("missing correlation for pair (" + std::to_string(i + 1) + ", " +
                          std::to_string(j + 1) + ")");

  p.covariance = stddev.asDiagonal() * corr * stddev.asDiagonal();
  return p;
}

PortfolioProblem load_portfolio(const std::filesystem::path& path, double tradeoff) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open portfolio file " + path.string());
  return load_portfolio(in, tradeoff);
}

void write_portfolio(std::ostream& out, const PortfolioProblem& problem) {
  problem.validate();
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  const Eigen::Index n = problem.size();
  const Vector sd = problem.covariance.diagonal().cwiseSqrt();
  out << n << '\n';
  for (Eigen::Index i = 0; i < n; ++i) out << problem.returns[i] << ' ' << sd[i] << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double c = 1.0;
      if (i != j) c = (sd[i] > 0.0 && sd[j] > 0.0) ? problem.covariance(i, j) / (sd[i] * sd[j]) : 0.0;
      out << i + 1 << ' ' << j + 1 << ' ' << c << '\n';
    }
  out.precision(old_prec);
}

MarkowitzMapping markowitz_to_dynamics(const PortfolioProblem& problem, double alpha, double beta) {
  problem.validate();
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  const double xi = problem.tradeoff / (2.0 * alpha);
  if (!(xi > 0.0)) throw InvalidArgument("resulting xi is not positive");

  const Matrix& sigma = problem.covariance;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().cwiseAbs().minCoeff();
  if (!(lmin > 1e-14 * lmax)) throw SingularSystem("covariance matrix is singular");

  MarkowitzMapping m;
  m.condition_number = lmax / lmin;
  const Vector eta = sigma.diagonal();
  Vector rhs = (problem.tradeoff / 3.0) * eta - problem.returns;
  rhs.array() += 0.5 * alpha;
  m.sources = -beta * sigma.ldlt().solve(rhs);
  m.omega = ProjectorMatrix::general(-sigma);
  m.params = MemristorParams::from_xi(alpha, beta, xi);
  m.constant = 0.0;

  if (m.condition_number > 1e6) {
    std::ostringstream w;
    w << "covariance condition number " << m.condition_number
      << " exceeds 1e6; |S| = " << m.sources.norm() << ", consider a smaller beta";
    m.warnings.push_back(w.str());
  }
  if (xi * es.eigenvalues().maxCoeff() >= 1.0) {
    std::ostringstream w;
    w << "xi * lambda_max(Sigma) = " << xi * es.eigenvalues().maxCoeff()
      << " >= 1; increase alpha above " << admissible_alpha(problem, 1.0);
    m.warnings.push_back(w.str());
  }
  return m;
}

double admissible_alpha(const PortfolioProblem& problem, double margin) {
  if (!(margin > 0.0)) throw InvalidArgument("margin must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> es(problem.covariance, Eigen::EigenvaluesOnly);
  return problem.tradeoff * es.eigenvalues().maxCoeff() / (2.0 * margin);
}

PortfolioProblem synthetic_portfolio(int assets, double tradeoff, std::uint64_t seed) {
  if (assets < 1) throw InvalidArgument("assets must be >= 1");
  Rng rng(seed);
  Matrix b(assets, 3);
  for (int i = 0; i < assets; ++i)
    for (int k = 0; k < 3; ++k) b(i, k) = 0.15 * rng.normal();
  PortfolioProblem p;
  p.tradeoff = tradeoff;
  p.covariance = b * b.transpose();
  for (int i = 0; i < assets; ++i) p.covariance(i, i) += rng.uniform(0.01, 0.05);
  p.returns = rng.uniform_vector(assets, 0.0, 0.15);
  return p;
}

}  // namespace memcirc
