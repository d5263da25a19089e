#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "memcirc/types.hpp"

namespace memcirc {

/// Deterministic per-component seed derived from a root seed and a stream label.
/// Streams with different labels are statistically independent.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

/// mt19937_64 with portable floating-point mapping, so results do not depend
/// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller.
  double normal();

  Vector uniform_vector(Eigen::Index n, double lo, double hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace memcirc
