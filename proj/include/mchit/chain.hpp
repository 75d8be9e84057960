#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mchit/errors.hpp"

namespace mchit {

/// Numerical tolerances shared by the whole toolkit.
struct Tolerances {
    double structural = 1e-12; // row sums, detailed balance, probability bounds
    double solver = 1e-10;     // residuals of linear solves
    double cross_check = 1e-8; // agreement between independent computation routes
};

const Tolerances& tolerances();

using State = int;
using StateSet = std::vector<State>;

/// Finite discrete-time Markov chain, row-stochastic, immutable after construction.
///
/// Rows are stored sparsely as (column, probability) pairs sorted by column.
/// Birth-death chains additionally carry an up/down representation that the
/// solvers use as a banded fast path.
class MarkovChain {
  public:
    MarkovChain(int n, std::vector<std::vector<std::pair<State, double>>> rows);

    /// Tridiagonal constructor: up[x] = P(x,x+1), down[x] = P(x,x-1),
    /// self-loops complete each row to 1.
    static MarkovChain birth_death(const std::vector<double>& up, const std::vector<double>& down);

    int n() const { return n_; }
    const std::vector<std::pair<State, double>>& row(State x) const { return rows_[x]; }
    double prob(State x, State y) const;

    bool is_tridiagonal() const { return tridiagonal_; }
    const std::vector<double>& up() const { return up_; }
    const std::vector<double>& down() const { return down_; }
    const std::vector<double>& stay() const { return stay_; }

    /// Number of stored transitions across all rows.
    std::size_t nnz() const;

  private:
    int n_ = 0;
    std::vector<std::vector<std::pair<State, double>>> rows_;
    bool tridiagonal_ = false;
    std::vector<double> up_, down_, stay_;

    void detect_band();
};

struct StateDistribution {
    std::vector<double> weights;
    double operator[](State x) const { return weights[x]; }
    int size() const { return static_cast<int>(weights.size()); }
};

/// Distinguished state x0 together with a nonempty target set G.
struct ReferencePair {
    State x0;
    StateSet G;

    ReferencePair(State x0_, StateSet G_);
    bool in_G(State x) const;
    /// {x0} union G as a sorted vector.
    StateSet absorbing_set() const;
};

struct ValidationReport {
    bool row_sums_ok = true;
    bool entries_ok = true;
    bool irreducible = true;
    std::vector<State> bad_rows; // offending rows for the first two checks
    bool pass() const { return row_sums_ok && entries_ok && irreducible; }
};

ValidationReport validate(const MarkovChain& chain);

/// Invariant distribution: pi P = pi, sum pi = 1.
/// Uses the detailed-balance product formula on birth-death chains and a
/// dense solve (one equation replaced by normalization) otherwise.
StateDistribution stationary_distribution(const MarkovChain& chain);

struct ReversibilityReport {
    bool reversible = false;
    double max_violation = 0.0;
};

ReversibilityReport check_reversibility(const MarkovChain& chain, const StateDistribution& pi);

// --- chain JSON interchange format (see README) ---
std::string chain_to_json(const MarkovChain& chain);
MarkovChain chain_from_json(const std::string& text);
MarkovChain chain_from_json_file(const std::string& path);
void chain_to_json_file(const MarkovChain& chain, const std::string& path);

} // namespace mchit
