#pragma once

#include <cstdint>
#include <random>

namespace kinpred {

/// Derives a child seed from a parent seed and a stream index (splitmix64).
/// Used to give every (scene, component) pair its own independent stream so
/// results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Seeded random stream with a fully specified draw sequence.
/// std::normal_distribution is implementation-defined, so normals are drawn
/// with an explicit Box-Muller transform to keep outputs bit-identical for a
/// given seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal draw.
  double normal();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kinpred
