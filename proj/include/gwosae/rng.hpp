#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gwosae {

/// SplitMix64 finalizer; used for seeding and for deriving child seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a parent seed with a stream index into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// xoshiro256** generator (Blackman & Vigna), state filled from SplitMix64.
/// Output depends only on the seed, never on the platform or standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform double in [lo,hi). Caller guarantees lo < hi.
  double uniform(double lo, double hi) noexcept;
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() noexcept;
  /// Uniform integer in [0,n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// New generator seeded from this one's seed and a stream id. Does not advance *this.
  Rng derive(std::uint64_t stream) const noexcept { return Rng(derive_seed(seed_, stream)); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// n draws in [lo,hi); throws ArgumentError unless lo < hi.
std::vector<double> uniform_in(Rng& rng, double lo, double hi, std::size_t n);

}  // namespace gwosae
