#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace exset {

/// Philox4x32-10 counter-based generator. Output is a pure function of
/// (key, counter), so streams are reproducible across platforms and can be
/// indexed randomly.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derives a sub-seed from a master seed and an ordered list of stream tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

/// Random-access stream of standard normal and uniform variates for one seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// The pair of standard normal variates with index 2*block and 2*block+1 (Box-Muller).
  std::array<double, 2> normal_pair(std::uint64_t block) const;
  /// Uniform double in [0, 1) for draw index i.
  double uniform(std::uint64_t i) const;
  /// Uniform integer in [0, n) for draw index i (n > 0).
  std::uint64_t uniform_index(std::uint64_t i, std::uint64_t n) const;

  /// Fills out[k] with the k-th standard normal of this stream.
  void fill_normal(std::span<double> out) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t index, std::uint32_t domain) const;
  std::uint64_t seed_;
};

}  // namespace exset
