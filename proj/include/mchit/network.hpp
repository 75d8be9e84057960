#pragma once

#include <vector>

#include "mchit/chain.hpp"

namespace mchit {

/// Electric network of a reversible chain: r_{x,y} = 1 / (mu(x) P(x,y)).
struct ResistorNetwork {
    int n = 0;
    std::vector<double> mu; // normalized stationary measure
    // per-edge resistances stored on the sparse support (x < y once per edge)
    struct Edge {
        State x, y;
        double resistance;
    };
    std::vector<Edge> edges;
    bool birth_death = false;
    std::vector<double> rk; // rk[k] = r_{k,k+1} when birth_death

    double edge_resistance(State x, State y) const;
};

/// Throws NotReversible when detailed balance fails beyond tolerance.
ResistorNetwork edge_resistances(const MarkovChain& chain, const StateDistribution& mu);

struct SeriesResistances {
    std::vector<double> R0; // R0[x] = total resistance between x and 0
    std::vector<double> RL; // RL[x] = total resistance between x and L
};

/// Prefix/suffix sums of the edge resistances of a birth-death network.
SeriesResistances series_resistances(const ResistorNetwork& net);

struct ResistanceGreenCheck {
    double R_total = 0.0;      // effective resistance between x and B
    double green_over_mu = 0.0; // E(xi_B^x(x)) / mu(x)
    double relative_gap = 0.0;
};

/// Cross-checks the identity R_B^x = E(xi_B^x)/mu(x). Birth-death networks
/// use series/parallel reduction; general networks a Dirichlet solve.
ResistanceGreenCheck total_resistance_vs_green(const MarkovChain& chain,
                                               const ResistorNetwork& net, State x,
                                               const StateSet& B);

/// Harmonic voltage with source set at 1 and sink at 0, evaluated at `query`.
/// Equals P(tau~_source < tau~_sink) from `query`.
double voltage(const MarkovChain& chain, const StateSet& source, const StateSet& sink,
               State query);

} // namespace mchit
