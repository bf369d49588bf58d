#include "spareopt/rng.hpp"

#include <cmath>
#include <numbers>

#include "spareopt/error.hpp"

namespace spareopt {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a64(purpose));
  h = splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return h;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open01() {
  double u;
  do {
    u = uniform01();
  } while (u == 0.0);
  return u;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw InvalidInput("uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
}

double Rng::standard_normal() {
  // Box-Muller; the second variate is discarded so each call consumes a
  // fixed two words of the stream.
  const double u1 = uniform_open01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double mean) {
  return -mean * std::log(uniform_open01());
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw InvalidInput("gamma: shape and scale must be > 0");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return scale * g * std::pow(uniform_open01(), 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

std::int64_t Rng::poisson(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("poisson: rate must be finite and >= 0");
  // Inversion by sequential search; large rates are split into chunks
  // (a sum of independent Poissons is Poisson) so exp(-chunk) never underflows.
  constexpr double kChunk = 256.0;
  std::int64_t total = 0;
  double remaining = rate;
  while (remaining > 0.0) {
    const double lambda = std::min(remaining, kChunk);
    remaining -= lambda;
    const double u = uniform01();
    double p = std::exp(-lambda);
    double cumulative = p;
    std::int64_t k = 0;
    while (u >= cumulative) {
      ++k;
      p *= lambda / static_cast<double>(k);
      const double next = cumulative + p;
      if (next == cumulative) break;  // tail exhausted in floating point
      cumulative = next;
    }
    total += k;
  }
  return total;
}

}  // namespace spareopt
