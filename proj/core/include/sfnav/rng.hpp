#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sfnav {

// Deterministic draws on top of mt19937_64. The std:: distributions are
// implementation-defined, so byte-identical outputs across toolchains require
// doing the mapping ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n) via rejection sampling (no modulo bias). n > 0.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform in [lo, hi] inclusive. lo <= hi.
  int range_int(int lo, int hi);

  // Uniform in [0, 1) with 53 random bits.
  double unit();

  // Uniform in [lo, hi).
  double range_real(double lo, double hi);

  // In-place Fisher-Yates using bounded().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sfnav
