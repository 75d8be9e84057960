#include "mchit/network.hpp"

#include <algorithm>
#include <cmath>

#include "mchit/hitting.hpp"
#include "mchit/linalg.hpp"

namespace mchit {

double ResistorNetwork::edge_resistance(State x, State y) const {
    if (x > y) std::swap(x, y);
    if (birth_death && y == x + 1) return rk[x];
    for (const auto& e : edges)
        if (e.x == x && e.y == y) return e.resistance;
    throw ParamOutOfRange("edge_resistance: no such edge");
}

ResistorNetwork edge_resistances(const MarkovChain& chain, const StateDistribution& mu) {
    const auto rev = check_reversibility(chain, mu);
    if (!rev.reversible)
        throw NotReversible("edge_resistances: detailed balance violated by " +
                            std::to_string(rev.max_violation));
    ResistorNetwork net;
    net.n = chain.n();
    net.mu = mu.weights;
    net.birth_death = chain.is_tridiagonal();
    for (State x = 0; x < chain.n(); ++x)
        for (const auto& [y, p] : chain.row(x)) {
            if (y <= x || p <= 0) continue;
            net.edges.push_back({x, y, 1.0 / (mu[x] * p)});
        }
    if (net.birth_death) {
        net.rk.assign(net.n - 1, 0.0);
        for (const auto& e : net.edges) net.rk[e.x] = e.resistance;
    }
    return net;
}

SeriesResistances series_resistances(const ResistorNetwork& net) {
    if (!net.birth_death) throw NotBirthDeath("series_resistances: network is not a path");
    const int n = net.n;
    SeriesResistances s;
    s.R0.assign(n, 0.0);
    s.RL.assign(n, 0.0);
    for (int x = 1; x < n; ++x) s.R0[x] = s.R0[x - 1] + net.rk[x - 1];
    for (int x = n - 2; x >= 0; --x) s.RL[x] = s.RL[x + 1] + net.rk[x];
    return s;
}

namespace {

// effective resistance between x and the set B via the Dirichlet energy of the
// voltage: R = 1 / (mu(x) P_x(escape)), with the escape probability of the
// harmonic potential v = P(tau~_x < tau~_B)
double effective_resistance(const MarkovChain& chain, const ResistorNetwork& net, State x,
                            const StateSet& B) {
    const auto in_x = mask_of(chain.n(), StateSet{x});
    const auto in_B = mask_of(chain.n(), B);
    if (in_B[x]) throw ParamOutOfRange("effective_resistance: x lies in B");
    const auto v = harmonic_solve(chain, in_x, in_B);
    double escape = 0.0;
    for (const auto& [y, p] : chain.row(x))
        if (y != x) escape += p * (1.0 - v[y]);
    if (escape <= 0.0) throw SolverFailure("effective_resistance: zero escape probability");
    return 1.0 / (net.mu[x] * escape);
}

} // namespace

ResistanceGreenCheck total_resistance_vs_green(const MarkovChain& chain,
                                               const ResistorNetwork& net, State x,
                                               const StateSet& B) {
    ResistanceGreenCheck check;
    if (net.birth_death && B.size() == 1) {
        // pure series path between x and the single pole
        const auto s = series_resistances(net);
        const State b = B[0];
        check.R_total = std::abs(s.R0[x] - s.R0[b]);
    } else if (net.birth_death && B.size() == 2 && B[0] == 0 && B[1] == net.n - 1) {
        // the two poles of the path in parallel
        const auto s = series_resistances(net);
        const double RL0 = s.RL[0];
        check.R_total = s.R0[x] * (RL0 - s.R0[x]) / RL0;
    } else {
        check.R_total = effective_resistance(chain, net, x, B);
    }
    const auto diag = green_diagonal(chain, B);
    check.green_over_mu = diag[x] / net.mu[x];
    const double scale = std::max(std::abs(check.R_total), std::abs(check.green_over_mu));
    check.relative_gap = scale > 0 ? std::abs(check.R_total - check.green_over_mu) / scale : 0.0;
    return check;
}

double voltage(const MarkovChain& chain, const StateSet& source, const StateSet& sink,
               State query) {
    return taboo_probability(chain, query, source, sink);
}

} // namespace mchit
