#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tucb {

// Counter-style deterministic generator (splitmix64 core). Streams are
// derived by hashing a root seed with integer tags, so independent parts
// of a simulation can draw without disturbing each other and parallel /
// serial executions agree.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  bool bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller (portable across standard libraries).
  double normal() {
    double u1 = 1.0 - next_unit();  // (0, 1]
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic child-stream seed from a root seed and a tag path.
inline std::uint64_t stream_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = detail::mix64(root + 0x9E3779B97F4A7C15ull);
  for (std::uint64_t t : tags) {
    s = detail::mix64(s ^ (t + 0x9E3779B97F4A7C15ull + (s << 6) + (s >> 2)));
  }
  return s;
}

inline Rng stream_rng(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  return Rng(stream_seed(root, tags));
}

}  // namespace tucb
