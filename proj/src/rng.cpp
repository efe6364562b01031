#include "pnd/rng.hpp"

#include "pnd/omega.hpp"

namespace pnd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) : seed_(seed), key_(splitmix64(seed ^ 0x6A09E667F3BCC909ull)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ + counter * 0x9E3779B97F4A7C15ull);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const { return normal_quantile(uniform(counter)); }

std::uint64_t RngStream::below(std::uint64_t n) {
  // rejection keeps the draw unbiased
  const std::uint64_t limit = ~0ull - (~0ull % n);
  std::uint64_t v;
  do v = bits();
  while (v >= limit);
  return v % n;
}

}  // namespace pnd
