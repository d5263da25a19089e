#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "memcirc/types.hpp"

namespace memcirc {

struct Edge {
  int tail = 0;
  int head = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph; edge k carries memristor k, oriented tail -> head.
struct CircuitGraph {
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::optional<std::uint64_t> seed;

  int edge_count() const { return static_cast<int>(edges.size()); }
  /// Cycle-space dimension N - V + 1 for a connected graph.
  int loop_count() const { return edge_count() - vertex_count + 1; }
};

/// Fundamental loop matrix A, L x N, entries in {-1, 0, +1}.
struct CycleBasis {
  IntMatrix matrix;
  /// chords[l] is the edge index that closes loop l.
  std::vector<int> chords;

  int loop_count() const { return static_cast<int>(matrix.rows()); }
  int edge_count() const { return static_cast<int>(matrix.cols()); }
};

/// Symmetric interaction matrix. Exact projectors come from circuits; general
/// symmetric matrices are accepted for optimization use.
struct ProjectorMatrix {
  Matrix entries;
  bool is_exact_projector = false;

  Eigen::Index size() const { return entries.rows(); }
  /// Wraps an arbitrary symmetric matrix (optimization mode). Throws on asymmetry.
  static ProjectorMatrix general(Matrix m);
};

/// Rows of A orthonormalized, so that Omega = rows^T rows.
struct LoopBasis {
  Matrix rows;
};

struct ProjectorReport {
  double idempotence_error = 0.0;  ///< max |Omega^2 - Omega|
  double symmetry_error = 0.0;     ///< max |Omega - Omega^T|
  double trace = 0.0;
  double eigenvalue_error = 0.0;   ///< max distance of an eigenvalue to {0, 1}; NaN if skipped
};

CircuitGraph generate_er_circuit(int vertex_count, double edge_probability, std::uint64_t seed);

/// Throws InvalidArgument when the graph has self-loops, out-of-range endpoints,
/// or is disconnected.
void validate_graph(const CircuitGraph& graph);
bool is_connected(const CircuitGraph& graph);

/// Vertex-edge incidence, V x N: +1 at the tail, -1 at the head.
IntMatrix incidence_matrix(const CircuitGraph& graph);

/// Spanning tree by breadth-first search from `root`, one loop per chord in edge
/// order, each loop oriented so that its chord entry is +1.
CycleBasis fundamental_cycle_basis(const CircuitGraph& graph, int root = 0);

/// Omega = A^T (A A^T)^{-1} A through a Cholesky solve.
ProjectorMatrix projector_from_cycles(const CycleBasis& basis);

LoopBasis orthonormal_loop_basis(const CycleBasis& basis);

/// Full eigen-decomposition is skipped when check_eigenvalues is false.
ProjectorReport inspect_projector(const ProjectorMatrix& omega, bool check_eigenvalues = true);

/// Edge-list text: "V N" then N lines "tail head", 0-indexed.
void write_edge_list(std::ostream& out, const CircuitGraph& graph);
CircuitGraph read_edge_list(std::istream& in);

/// Rows of comma-separated values with 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace memcirc
