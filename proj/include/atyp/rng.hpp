#pragma once

#include <cstdint>
#include <random>

namespace atyp {

// splitmix64 step; used to decorrelate (seed, index) pairs before seeding an
// engine, so per-trial streams are independent of execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x7f4a7c15ULL));
}

// Deterministic random source.  mt19937_64's output sequence is pinned by the
// C++ standard; the mappings below are hand-rolled because std::*_distribution
// results are implementation-defined and would break seeded reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng for_trial(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  std::uint8_t next_fair_bit() { return static_cast<std::uint8_t>(eng_() >> 63); }

  // Number of successes in l fair coin flips, via popcount batching.
  std::uint64_t next_binomial_half(std::uint64_t l) {
    std::uint64_t ones = 0;
    while (l >= 64) {
      ones += static_cast<std::uint64_t>(__builtin_popcountll(eng_()));
      l -= 64;
    }
    if (l > 0) {
      const std::uint64_t word = eng_() >> (64 - l);
      ones += static_cast<std::uint64_t>(__builtin_popcountll(word));
    }
    return ones;
  }

  // Number of successes in l Bernoulli(p) draws.
  std::uint64_t next_binomial(std::uint64_t l, double p) {
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < l; ++i) ones += next_bernoulli(p) ? 1u : 0u;
    return ones;
  }

  // Uniform integer in [0, n); n must be small against 2^64 (modulo bias is
  // below 2^-40 for every use in this project and determinism matters more).
  std::uint64_t next_below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace atyp
