#pragma once

#include <cstdint>
#include <random>

namespace deepcomm {

/// Library-wide pseudorandom stream: std::mt19937_64 (MT19937-64, whose
/// output sequence is fixed by the C++ standard). Doubles are built from the
/// top 53 bits so draws do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'f1ed'1e77ULL;

  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, bound), bound > 0 (rejection sampling, unbiased).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }
  /// Standard normal via Box-Muller.
  double normal();

private:
  std::mt19937_64 engine_;
};

/// Seed for independent trial `index` of an experiment seeded with `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

} // namespace deepcomm
