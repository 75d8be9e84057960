#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mchit/chain.hpp"
#include "mchit/hitting.hpp"

namespace mchit {

/// Counter-based deterministic generator: every trajectory gets its own
/// xoshiro256** stream seeded through splitmix64 from (seed, index), so the
/// output is independent of sharding and platform.
/// Generator id: "splitmix64/xoshiro256** v1".
struct SampleSet {
    std::uint64_t seed = 0;
    State start = 0;
    StateSet target;
    std::vector<std::int64_t> samples;
    std::int64_t capped_count = 0; // trajectories stopped at the step cap
    std::int64_t step_cap = 0;
};

struct SampleOptions {
    std::int64_t count = 1;
    std::uint64_t seed = 0;
    /// Per-trajectory cap; <= 0 derives 10^4 x T^E from an exact solve.
    std::int64_t step_cap = 0;
};

SampleSet sample_hitting_times(const MarkovChain& chain, State start, const StateSet& target,
                               const SampleOptions& opt);

/// Sup distance between the empirical CDF of the samples and the exact CDF
/// carried by the survival curve.
double ks_distance(const SampleSet& samples, const SurvivalCurve& exact);

/// 99% Dvoretzky-Kiefer-Wolfowitz band half-width for n samples.
double dkw_band(std::int64_t n, double confidence = 0.99);

void samples_to_csv(const SampleSet& s, const std::string& path);

} // namespace mchit
