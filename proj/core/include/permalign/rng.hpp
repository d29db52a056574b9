#pragma once

#include <cstdint>

namespace permalign {

/// Counter-based pseudo-random stream: every draw is a splitmix-style hash of
/// (seed, position), so identical seeds and call sequences reproduce identical
/// bits, and streams can be replayed or forked without shared state.
///
/// Child streams derive their seed as mix64(seed + (index + 1) * GOLDEN);
/// the additive walk is a bijection of the index, so for a fixed parent the
/// child seeds are pairwise distinct.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return pos_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double next_unit();
  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi);
  /// Standard normal via Box-Muller (two uniforms per draw, cosine branch).
  double next_gaussian();

  /// Independent stream for worker `index`; see class comment.
  RngState child(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t pos_ = 0;
};

/// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

}  // namespace permalign
