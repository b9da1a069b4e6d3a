#ifndef COOFLAB_RANDOM_HPP
#define COOFLAB_RANDOM_HPP

#include <cstdint>
#include <random>

#include "cooflab/types.hpp"

namespace cooflab {

/// Seeded generator with platform-independent output.
///
/// The standard distributions are implementation-defined, so uniform and
/// Gaussian variates are derived here directly from the raw mt19937_64
/// stream. Every stochastic stage owns one of these; they are never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, pairs cached).
  double normal();

  /// Circular complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Derives an independent child seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cooflab

#endif  // COOFLAB_RANDOM_HPP
