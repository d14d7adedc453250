#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace spinshell {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for sample `index` of a run seeded with `seed`.
/// Samples can then be generated in any order (or concurrently) without
/// changing the stream any one of them sees.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index)));
}

/// Uniform double in (0, 1], from the top 53 bits of the engine output.
/// Self-contained so streams are identical across standard libraries.
inline double uniform_unit(std::mt19937_64& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

/// Standard complex Gaussian (independent N(0,1) real and imaginary parts)
/// via one Box-Muller pair.
inline std::complex<double> complex_gaussian(std::mt19937_64& eng) {
  const double u1 = uniform_unit(eng);
  const double u2 = uniform_unit(eng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace spinshell
