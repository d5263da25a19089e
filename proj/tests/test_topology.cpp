#include <doctest.h>

#include <set>
#include <sstream>

#include "helpers.hpp"
#include "memcirc/errors.hpp"
#include "memcirc/topology.hpp"

using namespace memcirc;
using testing::gram_schmidt_projector;

namespace {

// Incidence built directly from the edge list, independent of the library helper.
Matrix incidence_oracle(const CircuitGraph& g) {
  Matrix b = Matrix::Zero(g.vertex_count, g.edge_count());
  for (int k = 0; k < g.edge_count(); ++k) {
    b(g.edges[k].tail, k) = 1.0;
    b(g.edges[k].head, k) = -1.0;
  }
  return b;
}

// Every signed simple cycle of a small graph: x in {-1,0,1}^N with B x = 0 and
// every vertex touching 0 or 2 support edges, support connected.
std::set<std::vector<int>> simple_cycles(const CircuitGraph& g) {
  const int n = g.edge_count();
  const Matrix b = incidence_oracle(g);
  std::set<std::vector<int>> out;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    std::vector<int> x(n);
    int c = code, nnz = 0;
    for (int i = 0; i < n; ++i) {
      x[i] = c % 3 - 1;
      c /= 3;
      nnz += x[i] != 0;
    }
    if (nnz == 0) continue;
    Vector xv(n);
    for (int i = 0; i < n; ++i) xv[i] = x[i];
    if ((b * xv).cwiseAbs().maxCoeff() != 0.0) continue;
    std::vector<int> degree(g.vertex_count, 0);
    for (int i = 0; i < n; ++i)
      if (x[i]) {
        ++degree[g.edges[i].tail];
        ++degree[g.edges[i].head];
      }
    bool ok = true;
    int touched = 0;
    for (int d : degree) {
      ok = ok && (d == 0 || d == 2);
      touched += d > 0;
    }
    // A single cycle on k vertices has exactly k edges.
    if (ok && touched == nnz) out.insert(x);
  }
  return out;
}

}  // namespace

TEST_SUITE("topology") {
  TEST_CASE("complete graph on three vertices is a triangle") {
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
      const auto g = generate_er_circuit(3, 1.0, seed);
      CHECK(g.vertex_count == 3);
      CHECK(g.edge_count() == 3);
      CHECK(g.loop_count() == 1);
    }
  }

  TEST_CASE("ER edge count follows p V (V-1) / 2") {
    const auto g = generate_er_circuit(60, 0.7, 1);
    const double expected = 0.7 * 60 * 59 / 2.0;
    CHECK(std::abs(g.edge_count() - expected) <= 3.0 * std::sqrt(expected));
    CHECK(is_connected(g));
  }

  TEST_CASE("loop count equals N minus incidence rank") {
    const auto g = generate_er_circuit(10, 0.7, 7);
    Eigen::FullPivLU<Matrix> lu(incidence_oracle(g));
    CHECK(lu.rank() == g.vertex_count - 1);
    CHECK(g.loop_count() == g.edge_count() - lu.rank());
    CHECK(fundamental_cycle_basis(g).loop_count() == g.loop_count());
  }

  TEST_CASE("generator is deterministic and keeps the largest component") {
    const auto a = generate_er_circuit(40, 0.1, 5);
    const auto b = generate_er_circuit(40, 0.1, 5);
    CHECK(a.edges == b.edges);
    CHECK(a.seed == std::optional<std::uint64_t>(5));
    CHECK(is_connected(a));
    CHECK(a.vertex_count <= 40);
    CHECK_THROWS_AS(generate_er_circuit(2, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(generate_er_circuit(10, 0.0, 1), InvalidArgument);
    // Far below percolation nothing with a loop survives.
    CHECK_THROWS_AS(generate_er_circuit(30, 0.001, 3), InvalidArgument);
  }

  TEST_CASE("triangle basis is the all-ones row") {
    const auto basis = fundamental_cycle_basis(testing::triangle());
    REQUIRE(basis.loop_count() == 1);
    CHECK(basis.matrix.row(0).cwiseAbs().sum() == 3);
    CHECK(std::abs(basis.matrix.row(0).sum()) == 3);
    CHECK(basis.matrix(0, basis.chords[0]) == 1);
  }

  TEST_CASE("two triangles sharing an edge") {
    const auto g = testing::two_triangles();
    const auto basis = fundamental_cycle_basis(g);
    REQUIRE(basis.loop_count() == 2);
    const auto cycles = simple_cycles(g);
    CHECK(cycles.size() == 6);  // three cycles, two orientations each
    for (int l = 0; l < 2; ++l) {
      CHECK((basis.matrix.row(l).array() != 0).count() == 3);
      CHECK(basis.matrix(l, 0) != 0);
      std::vector<int> row(basis.matrix.cols());
      for (int k = 0; k < basis.edge_count(); ++k) row[k] = basis.matrix(l, k);
      CHECK(cycles.count(row) == 1);
      CHECK(basis.matrix(l, basis.chords[l]) == 1);
    }
  }

  TEST_CASE("cycles lie in the kernel of the incidence operator") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const auto g = generate_er_circuit(25, 0.5, seed);
      const auto basis = fundamental_cycle_basis(g);
      const IntMatrix prod = basis.matrix * incidence_matrix(g).transpose();
      CHECK(prod.cwiseAbs().maxCoeff() == 0);
      CHECK(incidence_matrix(g).cast<double>() == incidence_oracle(g));
    }
  }

  TEST_CASE("acyclic and malformed graphs are rejected") {
    const CircuitGraph path{3, {{0, 1}, {1, 2}}, {}};
    CHECK_THROWS_WITH_AS(fundamental_cycle_basis(path), doctest::Contains("zero fundamental loops"),
                         InvalidArgument);
    const CircuitGraph split{4, {{0, 1}, {1, 0}, {2, 3}}, {}};
    CHECK_THROWS_AS(fundamental_cycle_basis(split), InvalidArgument);
    const CircuitGraph self{2, {{0, 0}, {0, 1}, {1, 0}}, {}};
    CHECK_THROWS_AS(validate_graph(self), InvalidArgument);
  }

  TEST_CASE("triangle projector has every entry 1/3") {
    const auto omega = projector_from_cycles(fundamental_cycle_basis(testing::triangle()));
    CHECK(omega.is_exact_projector);
    CHECK((omega.entries.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);
  }

  TEST_CASE("two-triangle projector matches Gram-Schmidt") {
    const auto basis = fundamental_cycle_basis(testing::two_triangles());
    const auto omega = projector_from_cycles(basis);
    const Matrix oracle = gram_schmidt_projector(basis.matrix.cast<double>());
    CHECK((omega.entries - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("ER projector invariants") {
    CircuitGraph g;
    const auto omega = testing::er_projector(40, 0.7, 3, &g);
    const auto r = inspect_projector(omega);
    CHECK(std::abs(r.trace - g.loop_count()) <= 1e-6);
    CHECK(r.idempotence_error <= 1e-9);
    CHECK(r.symmetry_error <= 1e-12);
    CHECK(r.eigenvalue_error <= 1e-7);
  }

  TEST_CASE("projector is the complement of the cut-space projector") {
    // Independent construction: I - B^T (B B^T)^{-1} B with one incidence row dropped.
    CircuitGraph g;
    const auto omega = testing::er_projector(30, 0.6, 11, &g);
    const Matrix b = incidence_oracle(g).bottomRows(g.vertex_count - 1);
    const Matrix cut = b.transpose() * (b * b.transpose()).inverse() * b;
    const Matrix oracle = Matrix::Identity(g.edge_count(), g.edge_count()) - cut;
    CHECK((omega.entries - oracle).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("projector does not depend on the spanning tree") {
    CircuitGraph g;
    const auto a = testing::er_projector(30, 0.5, 21, &g);
    const auto basis_b = fundamental_cycle_basis(g, g.vertex_count - 1);
    CHECK(basis_b.matrix != fundamental_cycle_basis(g).matrix);
    const auto b = projector_from_cycles(basis_b);
    CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("fundamental shortcut agrees with the general solve") {
    for (std::uint64_t seed : {31ULL, 32ULL}) {
      const auto g = generate_er_circuit(25, 0.6, seed);
      const auto basis = fundamental_cycle_basis(g);
      CycleBasis plain = basis;
      plain.chords.clear();  // without chords the generic Gram solve is used
      const auto fast = projector_from_cycles(basis), slow = projector_from_cycles(plain);
      CHECK((fast.entries - slow.entries).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((fast.entries - fast.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    // A tree with one extra edge: chords cover only one column.
    const CircuitGraph tri = testing::triangle();
    CHECK((projector_from_cycles(fundamental_cycle_basis(tri)).entries.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("rank-deficient loop matrix names the dependent row") {
    CycleBasis basis = fundamental_cycle_basis(testing::two_triangles());
    CycleBasis dup;
    dup.matrix.resize(3, basis.edge_count());
    dup.matrix << basis.matrix.row(0), basis.matrix.row(1), basis.matrix.row(0) + basis.matrix.row(1);
    CHECK_THROWS_WITH_AS(projector_from_cycles(dup), doctest::Contains("row 2"), SingularSystem);
    CHECK_THROWS_AS(orthonormal_loop_basis(dup), SingularSystem);
  }

  TEST_CASE("orthonormal loop basis") {
    const auto tri = orthonormal_loop_basis(fundamental_cycle_basis(testing::triangle()));
    REQUIRE(tri.rows.rows() == 1);
    CHECK((tri.rows.cwiseAbs().array() - 1.0 / std::sqrt(3.0)).abs().maxCoeff() < 1e-15);

    CircuitGraph g;
    const auto omega = testing::er_projector(30, 0.7, 4, &g);
    const auto lb = orthonormal_loop_basis(fundamental_cycle_basis(g));
    const Eigen::Index l = g.loop_count();
    CHECK((lb.rows * lb.rows.transpose() - Matrix::Identity(l, l)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((lb.rows.transpose() * lb.rows - omega.entries).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((omega.entries * lb.rows.transpose() - lb.rows.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("general matrices must be symmetric") {
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK_THROWS_AS(ProjectorMatrix::general(m), InvalidArgument);
    m(1, 0) = 2;
    CHECK_FALSE(ProjectorMatrix::general(m).is_exact_projector);
  }

  TEST_CASE("edge list round trip and parse errors") {
    const auto g = generate_er_circuit(12, 0.6, 8);
    std::stringstream ss;
    write_edge_list(ss, g);
    const auto back = read_edge_list(ss);
    CHECK(back.vertex_count == g.vertex_count);
    CHECK(back.edges == g.edges);

    std::istringstream bad_header("3\n0 1\n");
    CHECK_THROWS_WITH_AS(read_edge_list(bad_header), doctest::Contains("line 1"), FormatError);
    std::istringstream bad_edge("3 3\n0 1\n1 x\n2 0\n");
    CHECK_THROWS_WITH_AS(read_edge_list(bad_edge), doctest::Contains("line 3"), FormatError);
    std::istringstream out_of_range("3 2\n0 1\n1 3\n");
    CHECK_THROWS_WITH_AS(read_edge_list(out_of_range), doctest::Contains("line 3"), FormatError);
    std::istringstream truncated("3 3\n0 1\n");
    CHECK_THROWS_AS(read_edge_list(truncated), FormatError);
  }

  TEST_CASE("matrix CSV keeps 17 significant digits") {
    Matrix m(1, 2);
    m << 1.0 / 3.0, -2.5;
    std::ostringstream os;
    write_matrix_csv(os, m);
    CHECK(os.str() == "0.33333333333333331,-2.5\n");
  }
}
