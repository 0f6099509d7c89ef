#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fico {

using Rng = std::mt19937_64;

// Stream domains, so that e.g. the individual-planning stream of agent 3 at
// step 7 never coincides with its PIBT stream.
enum class Stream : std::uint64_t {
  kIndividualPlan = 1,
  kPibt = 2,
  kDelay = 3,
  kAddition = 4,
  kGoalStream = 5,
  kInstance = 6,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of an independent stream identified by (seed, domain, keys...). The
// result does not depend on evaluation order or thread schedule.
inline std::uint64_t stream_seed(std::uint64_t seed, Stream domain,
                                 std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(domain)));
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t seed, Stream domain, std::initializer_list<std::uint64_t> keys) {
  return Rng(stream_seed(seed, domain, keys));
}

}  // namespace fico
