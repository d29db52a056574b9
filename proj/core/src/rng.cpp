#include "permalign/rng.hpp"

#include <cmath>
#include <numbers>

namespace permalign {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t RngState::next_u64() {
  ++pos_;
  return mix64(seed_ + kGolden * pos_);
}

double RngState::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double RngState::next_gaussian() {
  // 1 - next_unit() lies in (0, 1], keeping the log argument positive.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngState RngState::child(std::uint64_t index) const {
  return RngState(mix64(seed_ + kGolden * (index + 1)));
}

}  // namespace permalign
