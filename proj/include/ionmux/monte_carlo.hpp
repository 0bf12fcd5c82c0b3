#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "ionmux/markov_engine.hpp"

namespace ionmux {

/// Path-sampling estimate of an EmissionProfile with binomial standard errors.
struct MonteCarloEstimate {
  EmissionProfile profile;
  std::vector<double> per_mode_se;
  double total_se = 0.0;
  std::uint64_t samples = 0;
};

/// Samples are split into a fixed number of shards with seeds derived from
/// `seed`; shard results are integer counts, so the output does not depend on
/// thread count or merge order. `threads` = 0 uses hardware concurrency.
MonteCarloEstimate monte_carlo_oracle(const PopulationVector& initial, const PulseProgram& program,
                                      std::uint64_t samples, std::uint64_t seed,
                                      std::optional<int> ion = std::nullopt,
                                      unsigned threads = 0);

/// Uniform [0,1) double from the top 53 bits of a 64-bit engine.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 step, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Number of fixed sample shards; shard seeds derive from the run seed only.
inline constexpr unsigned kMonteCarloShards = 64;

/// Runs `body(shard, count, rng)` for every shard, spreading shards over
/// `threads` workers (0 = hardware concurrency). Shards must only write to
/// their own slot.
void for_each_shard(std::uint64_t samples, std::uint64_t seed, unsigned threads,
                    const std::function<void(unsigned, std::uint64_t, std::mt19937_64&)>& body);

/// Samples one trajectory of a single ion from pure S_up through the program
/// (primitives of `ion` only). Returns the mode index whose detection window
/// caught the photon, or -1 when none was emitted into a window.
int sample_emission(const PulseProgram& program, int ion, std::mt19937_64& rng);

}  // namespace ionmux
