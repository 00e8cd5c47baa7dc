#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kfr {

using Rng = std::mt19937_64;

/// Named sub-streams; every random draw in the library descends from
/// (seed, stream, ...) so components can be reproduced in isolation.
enum class Stream : std::uint64_t {
  env = 0x656e76,
  rollout = 0x726f6c6c,
  policy = 0x706f6c,
  corpus = 0x636f7270,
  eval = 0x6576616c,
  audit = 0x61756474,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream s,
                                 std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s)));
  for (auto p : path) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline Rng make_rng(std::uint64_t seed, Stream s, std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(seed, s, path));
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace kfr
