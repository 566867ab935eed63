#pragma once

#include <cstdint>
#include <random>

namespace metaviz {

// splitmix64 finalizer; decorrelates structured counter inputs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation: the same (seed, salts...) always yields
/// the same generator state, independent of draw order elsewhere.
template <typename... Salts>
std::mt19937_64 make_rng(std::uint64_t seed, Salts... salts) {
  std::uint64_t state = mix64(seed);
  ((state = mix64(state ^ mix64(static_cast<std::uint64_t>(salts)))), ...);
  return std::mt19937_64(state);
}

}  // namespace metaviz
