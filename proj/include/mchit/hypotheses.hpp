#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mchit/chain.hpp"
#include "mchit/recurrence.hpp"

namespace mchit {

/// sup_{z not in {x0} u G} E(xi_{{x0} u G}^z(z)) / E(xi_G^{x0}(x0)),
/// computed through Green-function diagonals (reciprocal return probabilities).
/// Returns 0 with empty_supremum set when no interior state exists.
struct RhoResult {
    double value = 0.0;
    State argmax_state = -1;
    bool empty_supremum = false;
};

RhoResult rho_A(const MarkovChain& chain, const ReferencePair& pair);

/// sup_{z not in {x0} u G} E(tau_{{x0} u G}^z) / E(tau_G^{x0}).
RhoResult rho_B(const MarkovChain& chain, const ReferencePair& pair);

/// {x not in G : sup_{z not in {x,G}} E(tau_{{x},G}^z) / E(tau_G^x) < eps}.
StateSet metastable_set(const MarkovChain& chain, const StateSet& G, double eps);

struct HypothesisReport {
    double parameter = 0.0; // grid value this report belongs to
    std::int64_t n_states = 0;
    double family_size = 0.0; // |X^(n)| supplied by the sweep (default n)
    double rho_A = 0.0;
    double rho_B = 0.0;
    double T_E = 0.0;
    double T_LT = 0.0;
    std::map<double, std::int64_t> T_Q; // zeta -> quantile (may be empty if skipped)
    double sup_tau_pair = 0.0;          // sup_z E tau_{{x0} u G}^z
    std::int64_t R_n = 0;               // selected recurrence time
    double r_n_markov = 0.0;            // Markov-bound recurrence error at R_n
    std::optional<double> r_n_exact;    // exact error when the iteration budget allows
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_rel_residual = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct SweepThresholds {
    double final_value = 0.1;    // "holds" requires the last point below this
    double max_residual = 0.2;   // and the log-log fit this tight
    std::int64_t exact_error_budget = 2000000; // max restriction applications for exact r_n
};

struct FamilySweep {
    std::string parameter_name;
    std::vector<double> grid;
    std::vector<HypothesisReport> points;
    std::map<std::string, SlopeFit> fits; // tracked quantity -> fit
    std::map<std::string, bool> verdicts; // Hp.A, Hp.B, Hp.G_E, Hp.G_LT, Hp.G_Q
    bool quantiles_skipped = false;
};

struct SweepInputs {
    std::function<MarkovChain(double)> build;
    std::function<ReferencePair(const MarkovChain&, double)> pair;
    std::function<double(const MarkovChain&, double)> family_size; // optional; default n
    std::string parameter_name = "param";
    std::vector<double> grid;
    double zeta = 0.36787944117144233; // e^{-1}
    SweepThresholds thresholds;
    bool use_minimal_R = false; // alternative R_n selection (default: geometric-mean rule)
    double minimal_R_target = 0.01;
    int workers = 1; // grid points evaluated concurrently; results independent of the count
};

FamilySweep evaluate_hypotheses(const SweepInputs& in);

/// Finite-level inequalities behind the implication structure between the
/// six hypotheses, checked on one chain with exact solves.
struct InequalityCheck {
    std::string name;
    std::string detail;
    bool pass = false;
    double slack = 0.0; // bound minus value (>= 0 when passing)
};

struct T3Report {
    std::vector<InequalityCheck> checks;
    bool all_pass() const;
};

T3Report theorem_t3_inequality_suite(const MarkovChain& chain, const ReferencePair& pair,
                                     double zeta);

} // namespace mchit
