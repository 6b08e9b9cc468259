#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace twoloop {

/// Stream tags for seed derivation. Every consumer of randomness draws from
/// its own substream so that evaluation order never changes results.
enum class Stream : std::uint64_t {
  Init = 1,
  Optimizer = 2,
  Evaluation = 3,
};

/// Counter-based seed split: mixes (master, generation, stream, index)
/// through SplitMix64 finalizers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t generation, Stream stream,
                          std::uint64_t index = 0) noexcept;

/// Deterministic random source. The engine is the standard Mersenne twister;
/// the distributions are implemented here so that draws are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::size_t below(std::size_t n);
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  std::vector<double> normal_vector(std::size_t n, double sigma = 1.0);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace twoloop
