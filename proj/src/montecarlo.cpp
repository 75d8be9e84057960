#include "mchit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mchit/linalg.hpp"

namespace mchit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Xoshiro256ss {
    std::uint64_t s[4];

    // per-trajectory substream: state derived from (seed, index) via splitmix64
    Xoshiro256ss(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed ^ (index * 0xD6E8FEB86659FD93ULL + 0xA5A5A5A5A5A5A5A5ULL);
        for (auto& word : s) word = splitmix64(sm);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

} // namespace

SampleSet sample_hitting_times(const MarkovChain& chain, State start, const StateSet& target,
                               const SampleOptions& opt) {
    if (opt.count < 1) throw ParamOutOfRange("sample_hitting_times: count must be >= 1");
    const auto in_target = mask_of(chain.n(), target);

    SampleSet set;
    set.seed = opt.seed;
    set.start = start;
    set.target = target;
    set.step_cap = opt.step_cap;
    if (set.step_cap <= 0) {
        const double T = mean_hitting_time(chain, start, target);
        set.step_cap = std::max<std::int64_t>(1, static_cast<std::int64_t>(1e4 * std::max(T, 1.0)));
    }
    set.samples.reserve(static_cast<std::size_t>(opt.count));

    for (std::int64_t i = 0; i < opt.count; ++i) {
        Xoshiro256ss rng(opt.seed, static_cast<std::uint64_t>(i));
        State x = start;
        std::int64_t steps = 0;
        while (!in_target[x] && steps < set.step_cap) {
            const double u = rng.uniform();
            double acc = 0.0;
            State next = x;
            for (const auto& [y, p] : chain.row(x)) {
                acc += p;
                if (u < acc) {
                    next = y;
                    break;
                }
            }
            x = next;
            ++steps;
        }
        if (!in_target[x]) ++set.capped_count;
        set.samples.push_back(steps);
    }
    return set;
}

double ks_distance(const SampleSet& samples, const SurvivalCurve& exact) {
    if (samples.samples.empty()) throw ParamOutOfRange("ks_distance: empty sample set");
    auto sorted = samples.samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    auto cdf = [&](std::int64_t t) {
        if (t < 0) return 0.0;
        return 1.0 - exact.tail(static_cast<double>(t));
    };
    double dist = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::int64_t v = sorted[i];
        const double before = static_cast<double>(i) / n; // F_n just left of v
        const double at = static_cast<double>(j) / n;     // F_n at v
        dist = std::max(dist, std::abs(cdf(v - 1) - before));
        dist = std::max(dist, std::abs(cdf(v) - at));
        i = j;
    }
    return dist;
}

double dkw_band(std::int64_t n, double confidence) {
    if (n < 1) throw ParamOutOfRange("dkw_band: n must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ParamOutOfRange("dkw_band: confidence must lie in (0,1)");
    const double alpha = 1.0 - confidence;
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

void samples_to_csv(const SampleSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write samples file: " + path);
    out << "index,hitting_time\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i) out << i << "," << s.samples[i] << "\n";
}

} // namespace mchit
