#include "mchit/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "mchit/linalg.hpp"

namespace mchit {

double SurvivalCurve::tail(double u) const {
    if (u < 0) throw ParamOutOfRange("SurvivalCurve::tail: negative time");
    const auto t = static_cast<std::int64_t>(std::floor(u));
    if (t <= horizon()) return values[static_cast<std::size_t>(t)];
    if (!horizon_exceeded) return values.back(); // below the stop threshold
    throw CurveTooShort("SurvivalCurve::tail: time " + std::to_string(u) +
                        " past a capped horizon");
}

double SurvivalCurve::partial_mean() const {
    // E tau = sum_{t >= 0} P(tau > t); compensated sum of the stored part
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

SurvivalCurve survival_curve(const MarkovChain& chain, State start, const StateSet& target,
                             const SurvivalOptions& opt) {
    const int n = chain.n();
    if (start < 0 || start >= n) throw ParamOutOfRange("survival_curve: start out of range");
    SurvivalCurve curve;
    curve.start = start;
    curve.target = target;
    const auto absorbing = mask_of(n, target);

    std::vector<double> v(n, 0.0), w;
    for (int x = 0; x < n; ++x)
        if (!absorbing[x]) v[x] = 1.0;
    curve.values.push_back(v[start]);

    double prev = curve.values[0];
    while (curve.values.back() > opt.threshold) {
        if (static_cast<std::int64_t>(curve.values.size()) > opt.hard_cap) {
            curve.horizon_exceeded = true;
            break;
        }
        apply_restriction(chain, absorbing, v, w);
        v.swap(w);
        curve.values.push_back(v[start]);
    }

    const double last = curve.values.back();
    prev = curve.values.size() > 1 ? curve.values[curve.values.size() - 2] : last;
    const double ratio = prev > 0 ? last / prev : 0.0;
    curve.tail_mass_bound = (ratio < 1.0) ? last * ratio / (1.0 - ratio)
                                          : std::numeric_limits<double>::infinity();
    return curve;
}

double mean_hitting_time(const MarkovChain& chain, State start, const StateSet& target) {
    return mean_hitting_times(chain, target)[start];
}

std::vector<double> mean_hitting_times(const MarkovChain& chain, const StateSet& target) {
    const auto absorbing = mask_of(chain.n(), target);
    std::vector<double> ones(chain.n(), 0.0);
    for (int x = 0; x < chain.n(); ++x)
        if (!absorbing[x]) ones[x] = 1.0;
    return solve_absorbing(chain, absorbing, ones);
}

std::int64_t quantile(const SurvivalCurve& curve, double zeta) {
    if (zeta <= 0.0 || zeta >= 1.0) throw ParamOutOfRange("quantile: zeta must lie in (0,1)");
    for (std::int64_t k = 1; k <= curve.horizon(); ++k)
        if (curve.values[static_cast<std::size_t>(k)] <= zeta) return k;
    if (!curve.horizon_exceeded && curve.values.back() <= zeta) return curve.horizon();
    throw CurveTooShort("quantile: curve never drops below zeta");
}

GreenTable green_function(const MarkovChain& chain, const StateSet& taboo) {
    const int n = chain.n();
    const auto absorbing = mask_of(n, taboo);
    GreenTable table;
    table.taboo = taboo;
    table.g.assign(n, std::vector<double>(n, 0.0));
    // column y of the Green matrix solves (I - Q) g = e_y
    std::vector<double> e(n, 0.0);
    for (State y = 0; y < n; ++y) {
        if (absorbing[y]) continue;
        e[y] = 1.0;
        const auto col = solve_absorbing(chain, absorbing, e);
        e[y] = 0.0;
        for (State x = 0; x < n; ++x)
            if (!absorbing[x]) table.g[x][y] = col[x];
    }
    return table;
}

std::vector<double> green_diagonal(const MarkovChain& chain, const StateSet& taboo) {
    const int n = chain.n();
    const auto in_taboo = mask_of(n, taboo);
    std::vector<double> diag(n, 0.0);

    if (chain.is_tridiagonal()) {
        // g(z,z) = 1 / P(hit taboo before returning to z), one O(n) solve per z
        std::vector<char> in_z(n, 0);
        for (State z = 0; z < n; ++z) {
            if (in_taboo[z]) continue;
            in_z[z] = 1;
            const auto w = harmonic_solve(chain, in_taboo, in_z); // P(tau_A < tau_z)
            in_z[z] = 0;
            double escape = 0.0;
            for (const auto& [y, p] : chain.row(z))
                if (y != z) escape += p * w[y];
            if (escape <= 0.0) throw SolverFailure("green_diagonal: zero escape probability");
            diag[z] = 1.0 / escape;
        }
        return diag;
    }

    // dense path: diagonal of (I - Q)^{-1} on the free block
    std::vector<int> free_states, index(n, -1);
    for (int i = 0; i < n; ++i)
        if (!in_taboo[i]) {
            index[i] = static_cast<int>(free_states.size());
            free_states.push_back(i);
        }
    const int m = static_cast<int>(free_states.size());
    if (m == 0) return diag;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i)
        for (const auto& [y, p] : chain.row(free_states[i]))
            if (index[y] >= 0) A(i, index[y]) -= p;
    Eigen::MatrixXd inv = A.partialPivLu().solve(Eigen::MatrixXd::Identity(m, m));
    for (int i = 0; i < m; ++i) diag[free_states[i]] = inv(i, i);
    return diag;
}

double taboo_probability(const MarkovChain& chain, State start, const StateSet& Y,
                         const StateSet& B) {
    const int n = chain.n();
    const auto in_Y = mask_of(n, Y);
    const auto in_B = mask_of(n, B);
    const auto u = harmonic_solve(chain, in_Y, in_B);
    double p = 0.0;
    for (const auto& [y, q] : chain.row(start)) {
        if (in_Y[y])
            p += q;
        else if (!in_B[y])
            p += q * u[y];
    }
    return p;
}

HittingStats hitting_stats(const MarkovChain& chain, const ReferencePair& pair,
                           const std::vector<double>& zetas) {
    HittingStats stats;
    stats.mean = mean_hitting_time(chain, pair.x0, pair.G);
    // E xi_G^{x0}(x0) = 1 / P(tau~_G < tau~_{x0} from x0)
    const double escape = taboo_probability(chain, pair.x0, pair.G, StateSet{pair.x0});
    if (escape <= 0.0) throw SolverFailure("hitting_stats: zero escape probability");
    stats.local_time_at_start = 1.0 / escape;
    if (!zetas.empty()) {
        const auto curve = survival_curve(chain, pair.x0, pair.G);
        for (double z : zetas) stats.quantile_map[z] = quantile(curve, z);
    }
    return stats;
}

double mean_hitting_time_via_local_times(const MarkovChain& chain, State start,
                                         const StateSet& target) {
    // E tau = sum_y P(tau_y < tau_A) * E xi_A^y(y), an independent route
    const int n = chain.n();
    const auto in_A = mask_of(n, target);
    if (in_A[start]) return 0.0;
    const auto diag = green_diagonal(chain, target);
    std::vector<char> in_y(n, 0);
    double total = 0.0;
    for (State y = 0; y < n; ++y) {
        if (in_A[y]) continue;
        double reach;
        if (y == start) {
            reach = 1.0;
        } else {
            in_y[y] = 1;
            const auto u = harmonic_solve(chain, in_y, in_A);
            in_y[y] = 0;
            reach = u[start];
        }
        total += reach * diag[y];
    }
    return total;
}

} // namespace mchit
