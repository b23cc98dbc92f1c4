#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace wbsense {

using Rng = boost::random::mt19937_64;

/// splitmix64 finalizer; decorrelates nearby seeds before they reach the engine.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for (master_seed, index), e.g. one per trial or frame.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(mix_seed(mix_seed(master_seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace wbsense
