#ifndef PRMMC_RNG_HPP
#define PRMMC_RNG_HPP

#include <cstdint>
#include <random>

namespace prmmc {

/// splitmix64 finalizer; used to derive independent seeds from keys.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

template <typename... Rest>
std::uint64_t mix64(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix64(mix64(a, b), static_cast<std::uint64_t>(rest)...);
}

using Rng = std::mt19937_64;

inline std::uint64_t draw_u64(Rng& rng) { return rng(); }

}  // namespace prmmc

#endif
