#pragma once

#include <cstdint>

namespace fdgcl {

/// xoshiro256** (Blackman and Vigna) seeded through splitmix64. A stream id
/// is mixed into the seed so that components draw from disjoint sequences.
/// Distributions are implemented here rather than through <random> so that
/// outputs are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

namespace streams {
inline constexpr std::uint64_t encoder1 = 1;
inline constexpr std::uint64_t encoder2 = 2;
inline constexpr std::uint64_t probe = 3;
inline constexpr std::uint64_t sbm_labels = 4;
inline constexpr std::uint64_t sbm_means = 5;
inline constexpr std::uint64_t sbm_noise = 6;
inline constexpr std::uint64_t sbm_edges = 7;
inline constexpr std::uint64_t split = 8;
inline constexpr std::uint64_t pairs = 9;
}  // namespace streams

}  // namespace fdgcl
