#pragma once

#include <cstdint>
#include <random>

namespace beamgp {

/// splitmix64 step; used to derive independent stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for stream (a, b) of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (a + 0x632BE59BD9B4E019ULL));
  s = splitmix64(s ^ (b + 0x9E6C63D0876A9A47ULL));
  return s;
}

using RngEngine = std::mt19937_64;

}  // namespace beamgp
