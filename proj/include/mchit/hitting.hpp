#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mchit/chain.hpp"

namespace mchit {

/// Tail function t -> P(tau > t) on the integer grid t = 0..horizon.
struct SurvivalCurve {
    State start = 0;
    StateSet target;
    std::vector<double> values; // values[t] = P(tau > t)
    double tail_mass_bound = 0.0;
    bool horizon_exceeded = false;

    std::int64_t horizon() const { return static_cast<std::int64_t>(values.size()) - 1; }

    /// P(tau > u) for any real u >= 0 (tau is integer valued, so this is
    /// values[floor(u)]). Past the horizon returns the final stored value if
    /// the curve terminated below threshold, throws CurveTooShort if capped.
    double tail(double u) const;

    /// Sum of the stored tail values; approximates E tau up to tail_mass_bound.
    double partial_mean() const;
};

struct SurvivalOptions {
    double threshold = 1e-12;        // stop once the tail drops below this
    std::int64_t hard_cap = 100000000; // and never iterate past this many steps
};

SurvivalCurve survival_curve(const MarkovChain& chain, State start, const StateSet& target,
                             const SurvivalOptions& opt = {});

/// E tau_A^start via the linear solve h = 1 + Q h on A^c.
double mean_hitting_time(const MarkovChain& chain, State start, const StateSet& target);

/// Mean hitting times of A from every start at once (zero on A).
std::vector<double> mean_hitting_times(const MarkovChain& chain, const StateSet& target);

/// inf{k >= 1 : P(tau <= k) >= 1 - zeta}.
std::int64_t quantile(const SurvivalCurve& curve, double zeta);

/// Green function of the taboo set A: g[x][y] = expected visits to y strictly
/// before hitting A, starting from x. Rows indexed by x; zero rows on A.
struct GreenTable {
    StateSet taboo;
    std::vector<std::vector<double>> g;
};

GreenTable green_function(const MarkovChain& chain, const StateSet& taboo);

/// Diagonal of the Green function only: E xi_A^x(x) for every x (zero on A).
/// Uses the banded path on birth-death chains.
std::vector<double> green_diagonal(const MarkovChain& chain, const StateSet& taboo);

/// P(first positive hitting of Y happens before first positive hitting of B),
/// starting from `start`. Always first-step decomposed, so start may lie in
/// Y or B.
double taboo_probability(const MarkovChain& chain, State start, const StateSet& Y,
                         const StateSet& B);

struct HittingStats {
    double mean = 0.0;                         // T^E
    std::map<double, std::int64_t> quantile_map; // zeta -> Q(zeta)
    double local_time_at_start = 0.0;          // T^LT = E xi_G^{x0}(x0)
};

HittingStats hitting_stats(const MarkovChain& chain, const ReferencePair& pair,
                           const std::vector<double>& zetas);

/// Redundant second route for E tau_A^start: sum of local times of visited
/// points. Cross-checked against mean_hitting_time by callers.
double mean_hitting_time_via_local_times(const MarkovChain& chain, State start,
                                         const StateSet& target);

} // namespace mchit
