#pragma once

#include <cstdint>

namespace pnd {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based generator: value(counter) is a pure function of (seed, counter),
/// so any partition of a sample range draws identical numbers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);
  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;  // in (0, 1)
  double normal(std::uint64_t counter) const;   // inverse c.d.f. of uniform(counter)
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
};

/// Sequential view of a CounterRng.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t start = 0) : rng_(seed), next_(start) {}
  std::uint64_t bits() { return rng_.bits(next_++); }
  double uniform() { return rng_.uniform(next_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return rng_.normal(next_++); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  CounterRng rng_;
  std::uint64_t next_;
};

}  // namespace pnd
