#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spareopt {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for a named purpose and index below a master seed. Identical
/// arguments always give the identical child, and streams for different
/// (purpose, index) pairs are independent for practical purposes.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          std::uint64_t index = 0);

// Seeded random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. All distributions are implemented here rather than taken from
// <random>, whose algorithms are implementation-defined, so a seed produces
// the same draws on every standard library.
//
// A stream is owned by one consumer at a time. Use split() to hand an
// independent stream to another consumer instead of sharing.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on (0, 1).
  double uniform_open01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform over the integers lo..hi inclusive; requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  double standard_normal();
  double normal(double mean, double sd) { return mean + sd * standard_normal(); }
  double exponential(double mean);
  double gamma(double shape, double scale);
  std::int64_t poisson(double rate);

  /// Independent stream derived from this stream's seed (not its state).
  Rng split(std::string_view purpose, std::uint64_t index = 0) const {
    return Rng(derive_seed(seed_, purpose, index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace spareopt
