#include "sparsense/random.hpp"

namespace sparsense {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream RandomStream::for_trial(const MasterSeed& key) {
  std::uint64_t state = key.seed;
  std::uint64_t whitened = splitmix64(state);
  state = whitened ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(key.trial_index) + 1));
  std::uint64_t derived = splitmix64(state);
  return RandomStream(derived);
}

}  // namespace sparsense
