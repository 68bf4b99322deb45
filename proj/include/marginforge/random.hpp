#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace marginforge {

/// Seed tags for the child streams of one run.
enum class StreamTag : std::uint64_t {
  Plan = 1,
  Ball = 2,
  CglqInitial = 3,
  CglqRound = 4,
  Fold = 5,
  Replication = 6,
  Validation = 7,
};

/// Mixes a seed with a list of stream tags into an independent child seed.
/// Used everywhere a parallel task needs its own stream, so results do not
/// depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> tags);

/// xoshiro256** generator. Every distribution helper below is implemented
/// here rather than through <random> distributions so that streams are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Returns `count` distinct values drawn uniformly from `pool`, in draw
  /// order. Requires count <= pool.size().
  std::vector<std::size_t> sample_without_replacement(
      std::span<const std::size_t> pool, std::size_t count);

  /// Random permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t state_[4];
};

}  // namespace marginforge
