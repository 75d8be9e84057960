#pragma once

#include <string>
#include <vector>

#include "mchit/chain.hpp"

namespace mchit {

/// Four-state birth-death chain 0 - 1 - 2 - G with a shallow trap at 1.
struct HModelParams {
    double p = 0.0; // in (0,1)
    double h = 0.0; // in (0,1)
};

/// States are 0,1,2,3 with 3 playing the role of G.
MarkovChain build_h_model(const HModelParams& params);
inline constexpr State h_model_G = 3;

/// Birth-death chain on {0..L} with polynomial-in-L transition modifiers.
struct AbcModelParams {
    int L = 0;    // >= 6
    double a = 0.0, b = 0.0, c = 0.0; // b <= a, b <= c, all >= 0
};

MarkovChain build_abc_model(const AbcModelParams& params);

/// Generic tridiagonal chain, self-loops complete the rows.
MarkovChain build_birth_death(const std::vector<double>& up, const std::vector<double>& down);

/// Metropolis chain: P(x,y) = proposal(x,y) * min(1, exp(-beta (H(y)-H(x)))).
MarkovChain build_metropolis(const std::vector<double>& energy, double beta,
                             const std::vector<std::vector<std::pair<State, double>>>& proposal);

/// Named presets: "h", "abc", "abc-ex1" (5/8, 1/4, 7/4), "abc-ex2" (0, 0, 3/2).
/// Unused parameters are ignored; unknown names throw ParamOutOfRange.
MarkovChain build_preset(const std::string& name, double p, double h, int L, double a, double b,
                         double c);

AbcModelParams abc_example1(int L); // (5/8, 1/4, 7/4)
AbcModelParams abc_example2(int L); // (0, 0, 3/2)

} // namespace mchit
