#include "mchit/models.hpp"

#include <cmath>

namespace mchit {

MarkovChain build_h_model(const HModelParams& params) {
    const double p = params.p, h = params.h;
    if (!(p > 0.0 && p < 1.0)) throw ParamOutOfRange("h model: p must lie in (0,1)");
    if (!(h > 0.0 && h < 1.0)) throw ParamOutOfRange("h model: h must lie in (0,1)");
    const std::vector<double> up = {std::pow(p, h) / 2, std::pow(p, 1.0 - h) / 2, 0.5, 0.0};
    const std::vector<double> down = {0.0, 0.5, 0.5, p * p / 2};
    return MarkovChain::birth_death(up, down);
}

MarkovChain build_abc_model(const AbcModelParams& params) {
    const int L = params.L;
    const double a = params.a, b = params.b, c = params.c;
    if (L < 6) throw ParamOutOfRange("abc model: L must be >= 6");
    if (a < 0 || b < 0 || c < 0) throw ParamOutOfRange("abc model: exponents must be >= 0");
    if (b > a || b > c) throw ParamOutOfRange("abc model: need b <= a and b <= c");
    const double dL = static_cast<double>(L);
    std::vector<double> up(L + 1, 0.0), down(L + 1, 0.0);
    up[0] = std::pow(dL, -a) / 2;
    for (int x = 1; x <= L - 3; ++x) {
        up[x] = 0.5;
        down[x] = 0.5;
    }
    up[L - 2] = std::pow(dL, -c) / 2;
    down[L - 2] = std::pow(dL, -b) / 2;
    up[L - 1] = 0.5;
    down[L - 1] = 0.5;
    down[L] = std::pow(dL, -2.0 * (a + b + c)) / 2;
    return MarkovChain::birth_death(up, down);
}

MarkovChain build_birth_death(const std::vector<double>& up, const std::vector<double>& down) {
    return MarkovChain::birth_death(up, down);
}

MarkovChain build_metropolis(const std::vector<double>& energy, double beta,
                             const std::vector<std::vector<std::pair<State, double>>>& proposal) {
    const int n = static_cast<int>(energy.size());
    if (static_cast<int>(proposal.size()) != n)
        throw ParamOutOfRange("metropolis: proposal size must match energy size");
    if (beta < 0) throw ParamOutOfRange("metropolis: beta must be >= 0");
    std::vector<std::vector<std::pair<State, double>>> rows(n);
    for (State x = 0; x < n; ++x) {
        double off = 0.0;
        for (const auto& [y, q] : proposal[x]) {
            if (y == x) continue;
            if (q < 0) throw ParamOutOfRange("metropolis: negative proposal probability");
            const double acc = std::min(1.0, std::exp(-beta * (energy[y] - energy[x])));
            const double p = q * acc;
            if (p > 0) {
                rows[x].emplace_back(y, p);
                off += p;
            }
        }
        if (off > 1.0 + tolerances().structural)
            throw ParamOutOfRange("metropolis: proposal row exceeds 1");
        rows[x].emplace_back(x, 1.0 - off);
    }
    return MarkovChain(n, std::move(rows));
}

AbcModelParams abc_example1(int L) { return {L, 5.0 / 8, 1.0 / 4, 7.0 / 4}; }

AbcModelParams abc_example2(int L) { return {L, 0.0, 0.0, 3.0 / 2}; }

MarkovChain build_preset(const std::string& name, double p, double h, int L, double a, double b,
                         double c) {
    if (name == "h") return build_h_model({p, h});
    if (name == "abc") return build_abc_model({L, a, b, c});
    if (name == "abc-ex1") return build_abc_model(abc_example1(L));
    if (name == "abc-ex2") return build_abc_model(abc_example2(L));
    throw ParamOutOfRange("unknown preset: " + name);
}

} // namespace mchit
