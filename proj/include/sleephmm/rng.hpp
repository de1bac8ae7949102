#ifndef SLEEPHMM_RNG_HPP
#define SLEEPHMM_RNG_HPP

#include <cstdint>

namespace sleephmm {

/// splitmix64 mixing step; used to derive independent per-replicate seeds
/// from (study seed, replicate index) so results do not depend on the
/// execution order of concurrent replicates.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t study_seed, std::uint64_t replicate) {
  return splitmix64(splitmix64(study_seed) ^ splitmix64(replicate + 1));
}

}  // namespace sleephmm

#endif  // SLEEPHMM_RNG_HPP
