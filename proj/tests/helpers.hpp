#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "mchit/chain.hpp"

namespace mchit::testing {

/// Random irreducible row-stochastic chain with n <= 15 states. A random
/// Hamiltonian cycle gets positive mass so irreducibility always holds.
inline MarkovChain random_chain(std::mt19937_64& rng, int n_min = 3, int n_max = 15) {
    std::uniform_int_distribution<int> pick_n(n_min, n_max);
    const int n = pick_n(rng);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::uniform_int_distribution<int> pick_state(0, n - 1);

    std::vector<int> cycle(n);
    for (int i = 0; i < n; ++i) cycle[i] = i;
    std::shuffle(cycle.begin(), cycle.end(), rng);

    std::vector<std::vector<std::pair<State, double>>> rows(n);
    for (int x = 0; x < n; ++x) {
        std::vector<double> weight(n, 0.0);
        const int extra = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int e = 0; e < extra; ++e) weight[pick_state(rng)] += unif(rng);
        weight[x] += unif(rng); // self-loop keeps chains aperiodic
        double total = 0.0;
        for (double w : weight) total += w;
        // cycle edge carries a fixed share of the row
        const double cycle_share = unif(rng);
        const int succ = cycle[(std::find(cycle.begin(), cycle.end(), x) - cycle.begin() + 1) % n];
        for (int y = 0; y < n; ++y)
            if (weight[y] > 0)
                rows[x].emplace_back(y, (1.0 - cycle_share) * weight[y] / total);
        rows[x].emplace_back(succ, cycle_share);
    }
    return MarkovChain(n, std::move(rows));
}

/// Random reference pair on the chain: x0 plus a nonempty disjoint G.
inline ReferencePair random_pair(std::mt19937_64& rng, const MarkovChain& chain) {
    const int n = chain.n();
    std::vector<int> states(n);
    for (int i = 0; i < n; ++i) states[i] = i;
    std::shuffle(states.begin(), states.end(), rng);
    const State x0 = states[0];
    const int g_size = std::uniform_int_distribution<int>(1, std::max(1, (n - 1) / 2))(rng);
    StateSet G(states.begin() + 1, states.begin() + 1 + g_size);
    return ReferencePair(x0, std::move(G));
}

} // namespace mchit::testing
