#include "memcirc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include <Eigen/SparseCore>

#include "memcirc/errors.hpp"
#include "memcirc/rng.hpp"

namespace memcirc {

namespace {

std::vector<std::vector<std::pair<int, int>>> adjacency(const CircuitGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> adj(g.vertex_count);
  for (int k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edges[k];
    adj[e.tail].emplace_back(e.head, k);
    adj[e.head].emplace_back(e.tail, k);
  }
  return adj;
}

// Component label per vertex, labels in order of first vertex.
std::vector<int> components(const CircuitGraph& g, int* count) {
  const auto adj = adjacency(g);
  std::vector<int> label(g.vertex_count, -1);
  int next = 0;
  for (int s = 0; s < g.vertex_count; ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (auto [v, k] : adj[u]) {
        if (label[v] < 0) {
          label[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

// Index of the first row of A that is (numerically) a combination of earlier rows.
int first_dependent_row(const Matrix& a) {
  std::vector<Vector> ortho;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Vector r = a.row(i).transpose();
    const double norm0 = r.norm();
    for (const Vector& q : ortho) r -= q.dot(r) * q;
    for (const Vector& q : ortho) r -= q.dot(r) * q;
    const double norm = r.norm();
    if (norm0 == 0.0 || norm <= 1e-10 * norm0) return static_cast<int>(i);
    ortho.push_back(r / norm);
  }
  return -1;
}

Eigen::LLT<Matrix> gram_factor(const Matrix& a) {
  if (a.rows() == 0) throw InvalidArgument("cycle basis has zero fundamental loops");
  // Loop rows are short, so the Gram product is formed sparsely.
  const Eigen::SparseMatrix<double> sa = a.sparseView();
  const Matrix gram = Matrix(sa * sa.transpose());
  Eigen::LLT<Matrix> llt(gram);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Vector d = llt.matrixLLT().diagonal();
    ok = d.minCoeff() > 1e-8 * d.maxCoeff();
  }
  if (!ok) {
    const int row = first_dependent_row(a);
    throw SingularSystem("cycle matrix is rank deficient: loop row " + std::to_string(row) +
                         " depends on earlier rows");
  }
  return llt;
}

}  // namespace

ProjectorMatrix ProjectorMatrix::general(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("interaction matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("interaction matrix must be symmetric");
  return ProjectorMatrix{std::move(m), false};
}

CircuitGraph generate_er_circuit(int vertex_count, double edge_probability, std::uint64_t seed) {
  if (vertex_count < 3) throw InvalidArgument("vertex_count must be at least 3");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0))
    throw InvalidArgument("edge_probability must lie in (0, 1]");

  Rng rng(seed);
  CircuitGraph full{vertex_count, {}, seed};
  for (int i = 0; i < vertex_count; ++i) {
    for (int j = i + 1; j < vertex_count; ++j) {
      if (!rng.bernoulli(edge_probability)) continue;
      if (rng.bernoulli(0.5))
        full.edges.push_back({i, j});
      else
        full.edges.push_back({j, i});
    }
  }

  int count = 0;
  const std::vector<int> label = components(full, &count);
  std::vector<int> size(count, 0);
  for (int l : label) ++size[l];
  // Ties go to the component holding the lowest vertex.
  const int keep = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());

  std::vector<int> relabel(vertex_count, -1);
  int v = 0;
  for (int i = 0; i < vertex_count; ++i)
    if (label[i] == keep) relabel[i] = v++;

  CircuitGraph g{v, {}, seed};
  for (const Edge& e : full.edges)
    if (label[e.tail] == keep) g.edges.push_back({relabel[e.tail], relabel[e.head]});

  if (g.vertex_count < 3)
    throw InvalidArgument("largest connected component has fewer than 3 vertices");
  if (g.loop_count() <= 0) throw InvalidArgument("generated circuit has zero loops");
  return g;
}

bool is_connected(const CircuitGraph& graph) {
  if (graph.vertex_count == 0) return false;
  int count = 0;
  components(graph, &count);
  return count == 1;
}

void validate_graph(const CircuitGraph& graph) {
  if (graph.vertex_count <= 0) throw InvalidArgument("graph has no vertices");
  for (int k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edges[k];
    if (e.tail < 0 || e.tail >= graph.vertex_count || e.head < 0 || e.head >= graph.vertex_count)
      throw InvalidArgument("edge " + std::to_string(k) + " has an endpoint out of range");
    if (e.tail == e.head) throw InvalidArgument("edge " + std::to_string(k) + " is a self-loop");
  }
  if (!is_connected(graph)) throw InvalidArgument("graph is not connected");
}

IntMatrix incidence_matrix(const CircuitGraph& graph) {
  IntMatrix b = IntMatrix::Zero(graph.vertex_count, graph.edge_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    b(graph.edges[k].tail, k) += 1;
    b(graph.edges[k].head, k) -= 1;
  }
  return b;
}

CycleBasis fundamental_cycle_basis(const CircuitGraph& graph, int root) {
  validate_graph(graph);
  if (root < 0 || root >= graph.vertex_count) throw InvalidArgument("root vertex out of range");
  if (graph.loop_count() <= 0) throw InvalidArgument("graph has zero fundamental loops");

  const auto adj = adjacency(graph);
  const int n = graph.edge_count();
  std::vector<int> parent(graph.vertex_count, -1), parent_edge(graph.vertex_count, -1),
      depth(graph.vertex_count, 0);
  std::vector<bool> seen(graph.vertex_count, false), in_tree(n, false);
  std::queue<int> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (auto [v, k] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = u;
      parent_edge[v] = k;
      depth[v] = depth[u] + 1;
      in_tree[k] = true;
      q.push(v);
    }
  }

  CycleBasis basis;
  for (int k = 0; k < n; ++k)
    if (!in_tree[k]) basis.chords.push_back(k);
  basis.matrix = IntMatrix::Zero(static_cast<Eigen::Index>(basis.chords.size()), n);

  for (std::size_t l = 0; l < basis.chords.size(); ++l) {
    const int k = basis.chords[l];
    auto row = basis.matrix.row(static_cast<Eigen::Index>(l));
    row(k) = 1;
    // Loop: tail -> head along the chord, then back from head to tail in the tree.
    int from = graph.edges[k].head;  // walks up, traversing child -> parent
    int to = graph.edges[k].tail;    // walks up, path later traversed parent -> child
    while (from != to) {
      if (depth[from] >= depth[to]) {
        const int e = parent_edge[from];
        row(e) += graph.edges[e].tail == from ? 1 : -1;
        from = parent[from];
      } else {
        const int e = parent_edge[to];
        row(e) += graph.edges[e].head == to ? 1 : -1;
        to = parent[to];
      }
    }
  }
  return basis;
}

namespace {

// A fundamental basis is [I | D] up to a column permutation (chords, then tree edges).
// Woodbury then gives every block of Omega from K = I + D^T D, which is only (V-1) x (V-1):
//   chord-chord I - D K^{-1} D^T, chord-tree D K^{-1}, tree-tree I - K^{-1}.
std::optional<Matrix> fundamental_projector(const CycleBasis& basis) {
  const Eigen::Index l = basis.matrix.rows(), n = basis.matrix.cols();
  if (l == 0 || static_cast<Eigen::Index>(basis.chords.size()) != l) return std::nullopt;
  std::vector<char> is_chord(n, 0);
  for (Eigen::Index r = 0; r < l; ++r) {
    const int c = basis.chords[r];
    if (c < 0 || c >= n || is_chord[c]) return std::nullopt;
    is_chord[c] = 1;
    if (basis.matrix.col(c).cwiseAbs().sum() != 1 || basis.matrix(r, c) != 1) return std::nullopt;
  }
  std::vector<int> tree;
  for (int k = 0; k < n; ++k)
    if (!is_chord[k]) tree.push_back(k);
  const auto m = static_cast<Eigen::Index>(tree.size());

  Matrix omega = Matrix::Zero(n, n);
  if (m == 0) {
    omega.setIdentity();
    return omega;
  }
  const Matrix d = basis.matrix(Eigen::all, tree).cast<double>();
  Matrix k = Matrix::Identity(m, m);
  k.selfadjointView<Eigen::Lower>().rankUpdate(d.transpose());
  const Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix y = llt.matrixL().solve(d.transpose());  // C^{-1} D^T
  Matrix cc = Matrix::Identity(l, l);
  cc.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose(), -1.0);
  cc.triangularView<Eigen::StrictlyUpper>() = cc.transpose();
  const Matrix tc = llt.matrixU().solve(y);  // K^{-1} D^T
  Matrix kinv = llt.solve(Matrix::Identity(m, m));
  kinv = (0.5 * (kinv + kinv.transpose())).eval();

  omega(basis.chords, basis.chords) = cc;
  omega(tree, basis.chords) = tc;
  omega(basis.chords, tree) = tc.transpose();
  omega(tree, tree) = Matrix::Identity(m, m) - kinv;
  return omega;
}

}  // namespace

ProjectorMatrix projector_from_cycles(const CycleBasis& basis) {
  if (auto fast = fundamental_projector(basis)) return ProjectorMatrix{std::move(*fast), true};
  const Matrix a = basis.matrix.cast<double>();
  const auto llt = gram_factor(a);
  // Omega = Y^T Y with Y = C^{-1} A, filled as a symmetric rank update.
  const Matrix y = llt.matrixL().solve(a);
  Matrix omega = Matrix::Zero(a.cols(), a.cols());
  omega.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
  omega.triangularView<Eigen::StrictlyUpper>() = omega.transpose();
  return ProjectorMatrix{std::move(omega), true};
}

LoopBasis orthonormal_loop_basis(const CycleBasis& basis) {
  const Matrix a = basis.matrix.cast<double>();
  const auto llt = gram_factor(a);
  // With A A^T = C C^T, the rows of C^{-1} A are orthonormal (Gram-Schmidt in row order).
  return LoopBasis{llt.matrixL().solve(a)};
}

ProjectorReport inspect_projector(const ProjectorMatrix& omega, bool check_eigenvalues) {
  const Matrix& m = omega.entries;
  ProjectorReport r;
  r.idempotence_error = (m * m - m).cwiseAbs().maxCoeff();
  r.symmetry_error = (m - m.transpose()).cwiseAbs().maxCoeff();
  r.trace = m.trace();
  r.eigenvalue_error = std::numeric_limits<double>::quiet_NaN();
  if (check_eigenvalues) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    double worst = 0.0;
    for (double ev : es.eigenvalues())
      worst = std::max(worst, std::min(std::abs(ev), std::abs(ev - 1.0)));
    r.eigenvalue_error = worst;
  }
  return r;
}

void write_edge_list(std::ostream& out, const CircuitGraph& graph) {
  out << graph.vertex_count << ' ' << graph.edge_count() << '\n';
  for (const Edge& e : graph.edges) out << e.tail << ' ' << e.head << '\n';
}

CircuitGraph read_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return;
    }
    throw FormatError(std::string("unexpected end of file, expected ") + what, lineno + 1);
  };

  CircuitGraph g;
  long long v = 0, n = 0;
  next_line("header 'V N'");
  {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> v >> n) || (ls >> extra) || v <= 0 || n < 0)
      throw FormatError("malformed header, expected 'V N'", lineno);
  }
  g.vertex_count = static_cast<int>(v);
  g.edges.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    next_line("edge 'tail head'");
    std::istringstream ls(line);
    long long t = 0, h = 0;
    std::string extra;
    if (!(ls >> t >> h) || (ls >> extra)) throw FormatError("malformed edge line", lineno);
    if (t < 0 || t >= v || h < 0 || h >= v) throw FormatError("vertex index out of range", lineno);
    g.edges.push_back({static_cast<int>(t), static_cast<int>(h)});
  }
  return g;
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

}  // namespace memcirc
