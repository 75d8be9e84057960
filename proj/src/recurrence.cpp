#include "mchit/recurrence.hpp"

#include <algorithm>

#include "mchit/linalg.hpp"

namespace mchit {

namespace {

// advances the restricted power iteration by `steps` and reports the max entry
std::pair<double, State> iterate_error(const MarkovChain& chain, const std::vector<char>& absorbing,
                                       std::vector<double>& v, std::int64_t steps) {
    std::vector<double> w;
    for (std::int64_t k = 0; k < steps; ++k) {
        apply_restriction(chain, absorbing, v, w);
        v.swap(w);
    }
    double best = 0.0;
    State arg = 0;
    for (State x = 0; x < chain.n(); ++x)
        if (v[x] > best) {
            best = v[x];
            arg = x;
        }
    return {best, arg};
}

std::vector<double> free_ones(const MarkovChain& chain, const std::vector<char>& absorbing) {
    std::vector<double> v(chain.n(), 0.0);
    for (State x = 0; x < chain.n(); ++x)
        if (!absorbing[x]) v[x] = 1.0;
    return v;
}

} // namespace

RecurrenceError recurrence_error(const MarkovChain& chain, const ReferencePair& pair,
                                 std::int64_t R) {
    if (R < 0) throw ParamOutOfRange("recurrence_error: R must be >= 0");
    const auto absorbing = mask_of(chain.n(), pair.absorbing_set());
    auto v = free_ones(chain, absorbing);
    const auto [value, arg] = iterate_error(chain, absorbing, v, R);
    return {value, arg};
}

RecurrenceCertificate minimal_R(const MarkovChain& chain, const ReferencePair& pair,
                                double r_target, std::int64_t max_R) {
    if (!(r_target > 0.0 && r_target < 1.0))
        throw ParamOutOfRange("minimal_R: r_target must lie in (0,1)");
    if (max_R < 0) max_R = 100000000;
    const auto absorbing = mask_of(chain.n(), pair.absorbing_set());

    // exponential search for the first power of two that certifies, reusing
    // the running iterate (the error is non-increasing in R)
    auto v = free_ones(chain, absorbing);
    std::int64_t R = 1;
    auto [err, arg] = iterate_error(chain, absorbing, v, 1);
    while (err > r_target && R < max_R) {
        const std::int64_t steps = std::min(R, max_R - R);
        auto [e2, a2] = iterate_error(chain, absorbing, v, steps);
        R += steps;
        err = e2;
        arg = a2;
    }
    RecurrenceCertificate cert;
    cert.r = r_target;
    if (err > r_target) {
        cert.R = R;
        cert.achieved = err;
        cert.argmax_state = arg;
        cert.capped = true;
        return cert;
    }

    // binary search in (R/2, R] for the minimal certifying R
    std::int64_t lo = R / 2, hi = R; // error(lo) > r_target (or lo == 0)
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        const auto e = recurrence_error(chain, pair, mid);
        if (e.value <= r_target)
            hi = mid;
        else
            lo = mid;
    }
    const auto final_err = recurrence_error(chain, pair, hi);
    cert.R = hi;
    cert.achieved = final_err.value;
    cert.argmax_state = final_err.argmax_state;
    return cert;
}

Basin basin(const MarkovChain& chain, const ReferencePair& pair, double r0) {
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw ParamOutOfRange("basin: r0 must lie in [0,1]");
    const int n = chain.n();
    Basin b;
    b.r0 = r0;
    // value(x) = P(tau_{{x0} u G} = tau_{x0}) = P(tau_{x0} < tau_G), with
    // tau >= 0 so x0 itself scores 1 and members of G score 0
    const auto u = harmonic_solve(chain, mask_of(n, StateSet{pair.x0}), mask_of(n, pair.G));
    b.values = u;
    for (State x = 0; x < n; ++x)
        if (u[x] > 1.0 - r0) b.members.push_back(x);
    return b;
}

} // namespace mchit
