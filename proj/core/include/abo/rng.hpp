#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace abo {

// Deterministic named sub-streams: every consumer of randomness derives its
// own stream from (run seed, label, index), so the draw count of one
// component never shifts the draws seen by another.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::string_view label = {},
                     std::uint64_t index = 0)
      : gen_(mix(seed, label, index)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Standard normal via Box-Muller; consumes exactly two u64 draws.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform index in {0, ..., n-1}, n >= 1.
  std::size_t index_below(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static std::uint64_t mix(std::uint64_t seed, std::string_view label,
                           std::uint64_t index) {
    std::uint64_t s = splitmix(seed ^ fnv1a(label));
    return splitmix(s ^ index);
  }

  std::mt19937_64 gen_;
};

/// FNV-1a 64 over arbitrary text; used for config digests and data checksums.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace abo
