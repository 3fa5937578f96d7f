#pragma once

#include <cstdint>
#include <random>

namespace sparsense {

/// Identifies one trial's entire random stream. Distinct trial indices under
/// the same seed yield statistically independent streams, so trials can run
/// on any number of workers without perturbing each other's draws.
struct MasterSeed {
  std::uint64_t seed = 0;
  std::uint32_t trial_index = 0;
};

/// Deterministic source of the scalar draws the generators need.
/// Every generator takes one of these explicitly; there is no hidden
/// global RNG state anywhere in the library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for one (master seed, trial index) pair, derived by counter-based
  /// splitmix64 whitening so neighbouring trial indices decorrelate.
  static RandomStream for_trial(const MasterSeed& key);

  /// One N(0, 1) draw.
  double gaussian() { return normal_(engine_); }

  /// One N(0, stddev^2) draw.
  double gaussian(double stddev) { return stddev * normal_(engine_); }

  /// Uniform draw from {0, 1, ..., bound-1}. bound must be >= 1.
  std::uint64_t uniform_index(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 step; used for seed whitening.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace sparsense
