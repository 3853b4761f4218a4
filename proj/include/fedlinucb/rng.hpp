#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fedlinucb::rng {

// Counter-based random streams: every draw is a pure function of
// (seed, stream tag, index, position), so environment randomness does not
// depend on the order in which rounds are executed.

enum class Stream : std::uint64_t {
  theta = 0x7468657461ULL,
  arms = 0x61726d73ULL,
  noise = 0x6e6f697365ULL,
  schedule = 0x7363686564ULL,
  replication = 0x7265706cULL,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, Stream tag, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ index);
}

/// Sequence of draws keyed by (seed, tag, index).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, Stream tag, std::uint64_t index)
      : key_(stream_key(seed, tag, index)) {}

  std::uint64_t next_u64() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per two uniforms).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// +1 or -1 with equal probability.
  double sign() { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for replication `rep` derived from a base seed.
constexpr std::uint64_t replication_seed(std::uint64_t base, std::uint64_t rep) {
  return rep == 0 ? base : stream_key(base, Stream::replication, rep);
}

}  // namespace fedlinucb::rng
