#pragma once

// Deterministic pseudo-random and quasi-random direction sets on the unit sphere.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace evolsym {

using Direction = std::vector<double>;

/// Standard normal deviates from a seeded mt19937_64 via Box-Muller.
///
/// Only the engine output (fully specified by the standard) is consumed, so the
/// stream is identical across standard library implementations.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53 random bits in (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream seed for an independent substream (shell index, field index, ...).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ (0x9E3779B97F4A7C15ull * (index + 1));
}

inline void normalize(Direction& d) {
  double s = 0.0;
  for (double x : d) s += x * x;
  s = std::sqrt(s);
  if (s > 0.0)
    for (double& x : d) x /= s;
}

/// +e_1, -e_1, ..., +e_n, -e_n
inline std::vector<Direction> axis_directions(std::size_t n) {
  std::vector<Direction> out;
  for (std::size_t j = 0; j < n; ++j)
    for (double s : {1.0, -1.0}) {
      Direction d(n, 0.0);
      d[j] = s;
      out.push_back(std::move(d));
    }
  return out;
}

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline constexpr std::uint64_t small_primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace detail

/// Low-discrepancy direction set: alternating signs for n = 1, equispaced angles
/// for n = 2, Halton points pushed through Box-Muller for n >= 3.
inline std::vector<Direction> low_discrepancy_directions(std::size_t n, std::size_t count) {
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Direction d(n, 0.0);
    if (n == 1) {
      d[0] = (k % 2 == 0) ? 1.0 : -1.0;
    } else if (n == 2) {
      const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      d[0] = std::cos(a);
      d[1] = std::sin(a);
    } else {
      const std::size_t pairs = (n + 1) / 2;
      for (std::size_t p = 0; p < pairs; ++p) {
        const double u1 = detail::radical_inverse(k + 1, detail::small_primes[(2 * p) % 16]);
        const double u2 = detail::radical_inverse(k + 1, detail::small_primes[(2 * p + 1) % 16]);
        const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
        d[2 * p] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (2 * p + 1 < n) d[2 * p + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
      }
      normalize(d);
    }
    out.push_back(std::move(d));
  }
  return out;
}

/// Uniformly distributed random unit vectors.
inline std::vector<Direction> random_directions(std::size_t n, std::size_t count, std::uint64_t seed) {
  NormalStream rng(seed);
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Direction d(n);
    do {
      for (double& x : d) x = rng.next();
      normalize(d);
    } while (d[0] == 0.0 && n == 1);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace evolsym
