#include "sfnav/rng.hpp"

namespace sfnav {

std::uint64_t Rng::bounded(std::uint64_t n) {
  // Rejection sampling over the largest multiple of n below 2^64.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

int Rng::range_int(int lo, int hi) {
  return lo + static_cast<int>(bounded(
                  static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1));
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::range_real(double lo, double hi) { return lo + (hi - lo) * unit(); }

}  // namespace sfnav
