#include "weavemc/rng.hpp"

namespace weavemc {

std::uint64_t seed_split(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 finalizer over master + (index+1) * golden-ratio increment.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace weavemc
