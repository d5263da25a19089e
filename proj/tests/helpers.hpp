#pragma once

#include <cmath>
#include <cstdint>

#include "memcirc/rng.hpp"
#include "memcirc/topology.hpp"

namespace testing {

using memcirc::CircuitGraph;
using memcirc::Matrix;
using memcirc::Vector;

inline CircuitGraph triangle() { return CircuitGraph{3, {{0, 1}, {1, 2}, {2, 0}}, {}}; }

/// Triangles 0-1-2 and 0-1-3 sharing edge 0->1 (index 0).
inline CircuitGraph two_triangles() {
  return CircuitGraph{4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 0}}, {}};
}

inline memcirc::ProjectorMatrix er_projector(int v, double p, std::uint64_t seed, CircuitGraph* g_out = nullptr) {
  const CircuitGraph g = memcirc::generate_er_circuit(v, p, seed);
  if (g_out) *g_out = g;
  return memcirc::projector_from_cycles(memcirc::fundamental_cycle_basis(g));
}

/// Orthogonal projector onto the row space, built by modified Gram-Schmidt.
inline Matrix gram_schmidt_projector(const Matrix& a) {
  const Eigen::Index n = a.cols();
  Matrix p = Matrix::Zero(n, n);
  std::vector<Vector> q;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Vector r = a.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : q) r -= u.dot(r) * u;
    if (r.norm() < 1e-10) continue;
    q.push_back(r / r.norm());
  }
  for (const Vector& u : q) p += u * u.transpose();
  return p;
}

inline Vector random_interior(memcirc::Rng& rng, Eigen::Index n) { return rng.uniform_vector(n, 0.05, 0.95); }

inline Vector binary_state(std::uint64_t code, Eigen::Index n) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = (code >> i) & 1 ? 1.0 : 0.0;
  return w;
}

}  // namespace testing
