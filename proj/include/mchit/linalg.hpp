#pragma once

#include <vector>

#include "mchit/chain.hpp"

namespace mchit {

/// Solves (I - Q) x = rhs where Q is the restriction of the transition matrix
/// to the complement of the absorbing set. Entries of the returned vector on
/// the absorbing set are zero. Throws SolverFailure if the residual exceeds
/// the solver tolerance (relative to the rhs scale).
///
/// Tridiagonal chains are solved segment by segment with the Thomas
/// algorithm; everything else goes through a dense LU factorization.
std::vector<double> solve_absorbing(const MarkovChain& chain,
                                    const std::vector<char>& absorbing,
                                    const std::vector<double>& rhs);

/// Harmonic solve: u = P u off (Y u B), u = 1 on Y, u = 0 on B.
/// Returns the full-length vector including the boundary values.
std::vector<double> harmonic_solve(const MarkovChain& chain,
                                   const std::vector<char>& in_Y,
                                   const std::vector<char>& in_B);

/// One application of the substochastic restriction: w = Q v, where rows and
/// columns in the absorbing set are dropped (entries there forced to zero).
void apply_restriction(const MarkovChain& chain, const std::vector<char>& absorbing,
                       const std::vector<double>& v, std::vector<double>& w);

std::vector<char> mask_of(int n, const StateSet& states);

} // namespace mchit
