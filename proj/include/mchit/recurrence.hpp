#pragma once

#include <cstdint>
#include <vector>

#include "mchit/chain.hpp"

namespace mchit {

/// Certified Rec(R,r): from every state, {x0} u G is reached within R steps
/// except with probability at most r.
struct RecurrenceCertificate {
    std::int64_t R = 1;
    double r = 0.0;        // requested / certified level
    double achieved = 0.0; // sup_x P(tau_{x0,G}^x > R)
    State argmax_state = 0;
    bool capped = false;   // search hit its step budget before certifying
};

struct RecurrenceError {
    double value = 0.0;
    State argmax_state = 0;
};

/// sup over all x of P(tau_{{x0} u G}^x > R), computed by R applications of the
/// substochastic restriction to the all-ones vector.
RecurrenceError recurrence_error(const MarkovChain& chain, const ReferencePair& pair,
                                 std::int64_t R);

/// Smallest R with recurrence error <= r_target (exponential-then-binary
/// search; the error is non-increasing in R). `max_R` caps the search.
RecurrenceCertificate minimal_R(const MarkovChain& chain, const ReferencePair& pair,
                                double r_target, std::int64_t max_R = -1);

struct Basin {
    double r0 = 0.0;
    StateSet members;           // {x : value(x) > 1 - r0}, strict
    std::vector<double> values; // per-state P(tau_{{x0} u G} = tau_{x0})
};

Basin basin(const MarkovChain& chain, const ReferencePair& pair, double r0);

} // namespace mchit
