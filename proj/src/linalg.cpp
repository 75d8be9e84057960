#include "mchit/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace mchit {

std::vector<char> mask_of(int n, const StateSet& states) {
    std::vector<char> m(n, 0);
    for (State x : states) {
        if (x < 0 || x >= n) throw ParamOutOfRange("mask_of: state out of range");
        m[x] = 1;
    }
    return m;
}

namespace {

// Thomas algorithm on one contiguous free segment [lo, hi] of a tridiagonal
// chain. Coefficient matrix is (I - Q) restricted to the segment.
void thomas_segment(const MarkovChain& chain, int lo, int hi, const std::vector<double>& rhs,
                    std::vector<double>& x) {
    const int m = hi - lo + 1;
    std::vector<double> c(m), d(m); // modified superdiagonal / rhs
    auto diag = [&](int i) { return 1.0 - chain.stay()[lo + i]; };
    auto upper = [&](int i) { return -chain.up()[lo + i]; };   // couples i to i+1
    auto lower = [&](int i) { return -chain.down()[lo + i]; }; // couples i to i-1

    double piv = diag(0);
    if (piv == 0.0) throw SolverFailure("thomas_segment: zero pivot");
    c[0] = (m > 1) ? upper(0) / piv : 0.0;
    d[0] = rhs[lo] / piv;
    for (int i = 1; i < m; ++i) {
        piv = diag(i) - lower(i) * c[i - 1];
        if (piv == 0.0) throw SolverFailure("thomas_segment: zero pivot");
        c[i] = (i + 1 < m) ? upper(i) / piv : 0.0;
        d[i] = (rhs[lo + i] - lower(i) * d[i - 1]) / piv;
    }
    x[hi] = d[m - 1];
    for (int i = m - 2; i >= 0; --i) x[lo + i] = d[i] - c[i] * x[lo + i + 1];
}

} // namespace

void apply_restriction(const MarkovChain& chain, const std::vector<char>& absorbing,
                       const std::vector<double>& v, std::vector<double>& w) {
    const int n = chain.n();
    w.assign(n, 0.0);
    if (chain.is_tridiagonal()) {
        for (State x = 0; x < n; ++x) {
            if (absorbing[x]) continue;
            double acc = chain.stay()[x] * v[x];
            if (x > 0 && !absorbing[x - 1]) acc += chain.down()[x] * v[x - 1];
            if (x + 1 < n && !absorbing[x + 1]) acc += chain.up()[x] * v[x + 1];
            w[x] = acc;
        }
        return;
    }
    for (State x = 0; x < n; ++x) {
        if (absorbing[x]) continue;
        double acc = 0.0;
        for (const auto& [y, p] : chain.row(x))
            if (!absorbing[y]) acc += p * v[y];
        w[x] = acc;
    }
}

std::vector<double> solve_absorbing(const MarkovChain& chain, const std::vector<char>& absorbing,
                                    const std::vector<double>& rhs) {
    const int n = chain.n();
    if (static_cast<int>(absorbing.size()) != n || static_cast<int>(rhs.size()) != n)
        throw ParamOutOfRange("solve_absorbing: size mismatch");
    bool any_absorbing = false;
    for (char a : absorbing) any_absorbing = any_absorbing || a;
    if (!any_absorbing) throw ParamOutOfRange("solve_absorbing: absorbing set is empty");

    std::vector<double> x(n, 0.0);
    if (chain.is_tridiagonal()) {
        int lo = -1;
        for (int i = 0; i <= n; ++i) {
            const bool free_state = i < n && !absorbing[i];
            if (free_state && lo < 0) lo = i;
            if (!free_state && lo >= 0) {
                thomas_segment(chain, lo, i - 1, rhs, x);
                lo = -1;
            }
        }
    } else {
        std::vector<int> free_states;
        std::vector<int> index(n, -1);
        for (int i = 0; i < n; ++i)
            if (!absorbing[i]) {
                index[i] = static_cast<int>(free_states.size());
                free_states.push_back(i);
            }
        const int m = static_cast<int>(free_states.size());
        if (m > 0) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
            Eigen::VectorXd b(m);
            for (int i = 0; i < m; ++i) {
                for (const auto& [y, p] : chain.row(free_states[i]))
                    if (index[y] >= 0) A(i, index[y]) -= p;
                b(i) = rhs[free_states[i]];
            }
            Eigen::VectorXd sol = A.partialPivLu().solve(b);
            for (int i = 0; i < m; ++i) x[free_states[i]] = sol(i);
        }
    }

    // residual check relative to the problem scale (rhs and solution)
    std::vector<double> qx;
    apply_restriction(chain, absorbing, x, qx);
    double scale = 1.0;
    for (int i = 0; i < n; ++i)
        scale = std::max({scale, std::abs(rhs[i]), std::abs(x[i])});
    double resid = 0.0;
    for (int i = 0; i < n; ++i)
        if (!absorbing[i]) resid = std::max(resid, std::abs(x[i] - qx[i] - rhs[i]));
    if (resid > tolerances().solver * scale)
        throw SolverFailure("solve_absorbing: residual " + std::to_string(resid / scale));
    return x;
}

std::vector<double> harmonic_solve(const MarkovChain& chain, const std::vector<char>& in_Y,
                                   const std::vector<char>& in_B) {
    const int n = chain.n();
    if (static_cast<int>(in_Y.size()) != n || static_cast<int>(in_B.size()) != n)
        throw ParamOutOfRange("harmonic_solve: size mismatch");
    std::vector<char> absorbing(n, 0);
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (in_Y[i] && in_B[i]) throw ParamOutOfRange("harmonic_solve: Y and B overlap");
        absorbing[i] = in_Y[i] || in_B[i];
    }
    // rhs(x) = P(x, Y) for free x, so the solution is P(tau_Y < tau_B)
    for (int x = 0; x < n; ++x) {
        if (absorbing[x]) continue;
        for (const auto& [y, p] : chain.row(x))
            if (in_Y[y]) rhs[x] += p;
    }
    std::vector<double> u = solve_absorbing(chain, absorbing, rhs);
    for (int i = 0; i < n; ++i)
        if (in_Y[i]) u[i] = 1.0;
    return u;
}

} // namespace mchit
