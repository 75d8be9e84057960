#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mchit/chain.hpp"
#include "mchit/hitting.hpp"
#include "mchit/hypotheses.hpp"
#include "mchit/recurrence.hpp"

namespace mchit {

/// Explicit constants of the deviation envelope, assembled from a certified
/// (R, r) pair and the measured short-time behaviour of the chain.
struct ExpBoundParams {
    double eps = 0.0; // R / T
    double r = 0.0;
    double eta = 0.0; // intermediate scale S / T
    double c = 0.0;
    double cbar = 0.0;
    double delta0 = 0.0;
    double alpha0 = 0.0, alpha1 = 0.0;
    double lambda0 = 0.0, lambda1 = 0.0;
    double C_plus_1 = 0.0, C_minus_1 = 0.0;
    double C_plus_0 = 0.0, C_minus_0 = 0.0;
    double Cbar_plus = 0.0, Cbar_minus = 0.0;
    double C_plus = 0.0, C_minus = 0.0;
    double r0 = 0.0;
    double Ctilde_plus = 0.0, Ctilde_minus = 0.0;
};

/// c = P(tau_G^{x0} <= 2R) + r and the companion root cbar of cbar(1-cbar) = c.
std::pair<double, double> compute_c_cbar(const MarkovChain& chain, const ReferencePair& pair,
                                         std::int64_t R, double r);

struct EnvelopeInputs {
    double eps = 0.0;
    double r = 0.0;
    double eta = 0.0; // <= 0 selects the democratic default sqrt(max{eps, r})
    double c = 0.0;
    double cbar = 0.0;
    double r0 = 0.0;
};

/// Throws SmallnessViolated (naming the failed condition) unless
/// eps < eta < 1, c + cbar + r < 1/2 and eta + eps + r < 1.
ExpBoundParams assemble_envelope(const EnvelopeInputs& in);

struct DeviationReport {
    std::vector<double> t_grid;
    std::vector<double> measured; // |P(tau/T > t) - e^{-t}|
    std::vector<double> envelope;
    double max_ratio = 0.0; // worst measured/envelope
    double max_measured = 0.0;
    double worst_t = 0.0;
    bool pass = false;
};

/// Measured deviation of the exact rescaled survival curve from exp(1),
/// compared pointwise against the envelope. `from_state` defaults to x0;
/// when `use_basin_constants` is set the Ctilde variant is applied.
DeviationReport verify_exponential_law(const MarkovChain& chain, const ReferencePair& pair,
                                       const ExpBoundParams& params, double T,
                                       const std::vector<double>& t_grid,
                                       State from_state, bool use_basin_constants,
                                       const SurvivalOptions& opt = {});

std::vector<double> default_t_grid(int points = 200, double t_max = 20.0);

/// Exact-probability evaluation of the key-lemma inequalities
/// (factorization, additive and multiplicative tail bounds, basin transfer).
struct LemmaSuiteOptions {
    std::int64_t S = 0;       // integer intermediate scale, must exceed R
    int grid_points = 20;     // per axis for the (u, v) factorization grids
    int max_power = 50;       // k range for the iterated bounds
    double slack = 1e-10;
    SurvivalOptions survival;
};

struct LemmaSuiteReport {
    std::vector<InequalityCheck> checks;
    int evaluated = 0;
    int skipped = 0; // stated hypotheses of the lemma not satisfiable here
    bool all_pass() const;
};

LemmaSuiteReport lemma_suite(const MarkovChain& chain, const ReferencePair& pair,
                             const RecurrenceCertificate& cert, const LemmaSuiteOptions& opt);

/// Early-exponential defect at scale S: worst relative error of the cell
/// factorization P(tau in (kS,(k+1)S]) ~ P(tau>S)^k P(tau<=S) for kS <= T^E.
double ee_check(const MarkovChain& chain, const ReferencePair& pair, std::int64_t S,
                const SurvivalOptions& opt = {});

struct DensityCell {
    std::int64_t k = 0;
    double a_k = 0.0;
    double density_estimate = 0.0; // e^{-lambda k}(1 - e^{-lambda})(1 + a_k) / (S/T)
    double cell_mass = 0.0;        // exact P(tau in (kS,(k+1)S])
};

std::vector<DensityCell> density_profile(const MarkovChain& chain, const ReferencePair& pair,
                                         std::int64_t S, const SurvivalOptions& opt = {});

} // namespace mchit
