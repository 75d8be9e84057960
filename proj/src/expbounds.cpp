#include "mchit/expbounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mchit/linalg.hpp"

namespace mchit {

std::pair<double, double> compute_c_cbar(const MarkovChain& chain, const ReferencePair& pair,
                                         std::int64_t R, double r) {
    if (R < 0) throw ParamOutOfRange("compute_c_cbar: R must be >= 0");
    const auto absorbing = mask_of(chain.n(), pair.G);
    std::vector<double> v(chain.n(), 0.0), w;
    for (State x = 0; x < chain.n(); ++x)
        if (!absorbing[x]) v[x] = 1.0;
    for (std::int64_t k = 0; k < 2 * R; ++k) {
        apply_restriction(chain, absorbing, v, w);
        v.swap(w);
    }
    const double c = (1.0 - v[pair.x0]) + r;
    const double cbar = (c <= 0.25) ? 0.5 - std::sqrt(0.25 - c) : 1.0;
    return {c, cbar};
}

ExpBoundParams assemble_envelope(const EnvelopeInputs& in) {
    ExpBoundParams p;
    p.eps = in.eps;
    p.r = in.r;
    p.c = in.c;
    p.cbar = in.cbar;
    p.r0 = in.r0;
    p.eta = in.eta > 0 ? in.eta : std::sqrt(std::max(in.eps, in.r));

    if (!(p.eps < p.eta))
        throw SmallnessViolated("assemble_envelope: requires eps < eta");
    if (!(p.eta < 1.0))
        throw SmallnessViolated("assemble_envelope: requires eta < 1");
    const double X = p.c + p.cbar + p.r;
    if (!(X < 0.5))
        throw SmallnessViolated("assemble_envelope: requires c + cbar + r < 1/2");
    if (!(p.eta + p.eps + p.r < 1.0))
        throw SmallnessViolated("assemble_envelope: requires eta + eps + r < 1");
    if (!(p.cbar > 0.0 && p.cbar <= 1.0))
        throw SmallnessViolated("assemble_envelope: requires cbar in (0,1]");
    if (!(p.r + p.r0 < 1.0))
        throw SmallnessViolated("assemble_envelope: requires r + r0 < 1");

    const double eta = p.eta, eps = p.eps, r = p.r;
    p.delta0 = std::log(1.0 + X / (1.0 - X));
    p.alpha0 = 1.0 + std::log(1.0 / (1.0 + eta - 2.0 * eps) + r) / eta;
    p.alpha1 = -1.0 - std::log(1.0 - eta - eps - r) / eta;

    // sup/inf over t in (eps, eta] on a geometric grid, endpoint included
    const int N = 1000;
    p.C_plus_1 = 0.0;
    p.C_minus_1 = std::numeric_limits<double>::infinity();
    const double denom_up = 1.0 / (1.0 + eta - 2.0 * eps) + r;
    for (int j = 1; j <= N; ++j) {
        const double t = eps * std::pow(eta / eps, static_cast<double>(j) / N);
        const double up = (1.0 / (1.0 + t - 2.0 * eps) + r) / std::pow(denom_up, t / eta);
        const double low = std::pow(1.0 - eta - eps - r, t / eta) / (1.0 - t - eps - r);
        p.C_plus_1 = std::max(p.C_plus_1, up);
        p.C_minus_1 = std::min(p.C_minus_1, low);
    }
    p.C_plus_0 = std::exp(eps);
    p.C_minus_0 = 1.0 - (2.0 * eps + r);
    p.Cbar_plus = std::max(p.C_plus_0, p.C_plus_1);
    p.Cbar_minus = std::min(p.C_minus_0, p.C_minus_1);
    p.lambda0 = p.alpha0 + p.delta0 / eta;
    p.lambda1 = p.alpha1 + p.delta0 / eta;
    p.C_plus = p.Cbar_plus * (1.0 + X / (1.0 - X));
    p.C_minus = p.Cbar_minus * (1.0 - X);
    p.Ctilde_plus = p.C_plus * (1.0 + X / (1.0 - X));
    p.Ctilde_minus = p.C_minus * (1.0 - p.r - p.r0);
    return p;
}

std::vector<double> default_t_grid(int points, double t_max) {
    if (points < 1 || t_max <= 0) throw ParamOutOfRange("default_t_grid: bad shape");
    std::vector<double> grid(points);
    for (int i = 1; i <= points; ++i)
        grid[i - 1] = t_max * static_cast<double>(i) / points;
    return grid;
}

DeviationReport verify_exponential_law(const MarkovChain& chain, const ReferencePair& pair,
                                       const ExpBoundParams& params, double T,
                                       const std::vector<double>& t_grid, State from_state,
                                       bool use_basin_constants, const SurvivalOptions& opt) {
    const double Cp = use_basin_constants ? params.Ctilde_plus : params.C_plus;
    const double Cm = use_basin_constants ? params.Ctilde_minus : params.C_minus;
    const auto curve = survival_curve(chain, from_state, pair.G, opt);

    DeviationReport rep;
    rep.t_grid = t_grid;
    rep.pass = true;
    for (double t : t_grid) {
        const double tail = curve.tail(t * T);
        const double e = std::exp(-t);
        const double measured = std::abs(tail - e);
        const double env = std::max(Cp * std::exp(-(1.0 - params.lambda0) * t) - e,
                                    e - Cm * std::exp(-(1.0 + params.lambda1) * t));
        rep.measured.push_back(measured);
        rep.envelope.push_back(env);
        if (measured > env) rep.pass = false;
        if (env > 0 && measured / env > rep.max_ratio) rep.max_ratio = measured / env;
        if (measured > rep.max_measured) {
            rep.max_measured = measured;
            rep.worst_t = t;
        }
    }
    return rep;
}

bool LemmaSuiteReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

struct Check {
    std::string name;
    std::string detail;
    double worst_slack = std::numeric_limits<double>::infinity();
    bool any = false;

    // value must stay <= bound
    void require_le(double value, double bound) {
        any = true;
        worst_slack = std::min(worst_slack, bound - value);
    }
    InequalityCheck finish(double slack_tol) const {
        InequalityCheck c;
        c.name = name;
        c.detail = detail;
        c.slack = any ? worst_slack : 0.0;
        c.pass = !any || worst_slack >= -slack_tol;
        return c;
    }
};

} // namespace

LemmaSuiteReport lemma_suite(const MarkovChain& chain, const ReferencePair& pair,
                             const RecurrenceCertificate& cert, const LemmaSuiteOptions& opt) {
    const std::int64_t R = cert.R;
    const double r = cert.achieved;
    const std::int64_t S = opt.S;
    if (S <= R) throw ParamOutOfRange("lemma_suite: needs S > R");

    const double T = mean_hitting_time(chain, pair.x0, pair.G);
    const auto [c, cbar] = compute_c_cbar(chain, pair, R, r);
    const double X = c + cbar + r;

    // survival curves tau_G^z for the reference start and a set of probe states
    StateSet probes;
    probes.push_back(pair.x0);
    if (chain.n() <= 16) {
        for (State z = 0; z < chain.n(); ++z)
            if (!pair.in_G(z) && z != pair.x0) probes.push_back(z);
    } else {
        const int step = std::max(1, chain.n() / 8);
        for (State z = 0; z < chain.n(); z += step)
            if (!pair.in_G(z) && z != pair.x0) probes.push_back(z);
    }

    // integer time ladder up to T: tau is integer valued, so probing the
    // inequalities at integer scales keeps both sides on the same grid
    const int g = opt.grid_points;
    std::vector<std::int64_t> u_values(g);
    for (int i = 1; i <= g; ++i)
        u_values[i - 1] = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::llround(static_cast<double>(i) * T / g)));

    // horizon: u + v up to 2T, plus the kS ladder and the R offsets
    std::int64_t horizon = 2 * u_values.back() + 2 * R;
    horizon = std::max(horizon, S * (opt.max_power + 1) + 2 * R);
    SurvivalOptions sopt = opt.survival;
    sopt.hard_cap = std::max<std::int64_t>(sopt.hard_cap, horizon + 1);

    auto curve_for = [&](State z) {
        SurvivalOptions so = sopt;
        so.threshold = 0.0; // keep the full horizon even deep in the tail
        so.hard_cap = horizon;
        return survival_curve(chain, z, pair.G, so);
    };
    std::vector<SurvivalCurve> curves;
    for (State z : probes) curves.push_back(curve_for(z));
    const SurvivalCurve& x0_curve = curves[0];
    auto tail = [](const SurvivalCurve& cv, double u) {
        if (u < 0) return 1.0;
        const auto t = static_cast<std::int64_t>(std::floor(u));
        if (t > cv.horizon()) return cv.values.back();
        return cv.values[static_cast<std::size_t>(t)];
    };

    const Basin basin_r = basin(chain, pair, std::clamp(r, 0.0, 1.0));
    const Basin basin_lemma = basin(chain, pair, std::clamp(cbar - c, 0.0, 1.0));
    auto in_members = [](const Basin& b, State z) {
        return std::find(b.members.begin(), b.members.end(), z) != b.members.end();
    };

    LemmaSuiteReport rep;
    auto push = [&](const Check& ck) {
        rep.checks.push_back(ck.finish(opt.slack));
        if (ck.any)
            ++rep.evaluated;
        else
            ++rep.skipped;
    };

    // factorization bounds: for horizons u and v > R,
    // P(tau > u+v) sandwiched by shifted products
    {
        Check lower{"factorization_lower",
                    "P(tau^z > u+v) >= [P(tau^z > u+R) - r P(tau^z > u)] P(tau^x0 > v)"};
        Check upper{"factorization_upper",
                    "P(tau^x0 > u+v) <= [P(tau^x0 > u-R) + r] P(tau^x0 > v)"};
        for (std::size_t zi = 0; zi < probes.size(); ++zi)
            for (std::int64_t u : u_values)
                for (std::int64_t v : u_values) {
                    if (v <= R) continue;
                    const double lhs = tail(curves[zi], static_cast<double>(u + v));
                    const double lo = (tail(curves[zi], static_cast<double>(u + R)) -
                                       r * tail(curves[zi], static_cast<double>(u))) *
                                      tail(x0_curve, static_cast<double>(v));
                    lower.require_le(lo, lhs);
                    if (probes[zi] == pair.x0) {
                        const double up = (tail(x0_curve, static_cast<double>(u - R)) + r) *
                                          tail(x0_curve, static_cast<double>(v));
                        upper.require_le(lhs, up);
                    }
                }
        push(lower);
        push(upper);
    }

    // iterated factorization: P(tau > Sk) between the k-th powers
    {
        Check up{"iterated_upper", "P(tau > Sk) <= [P(tau > S-R) + r]^k"};
        Check lo{"iterated_lower", "P(tau > Sk) >= [P(tau > S+R) - r]^k"};
        if (S < T) {
            const double base_up = tail(x0_curve, static_cast<double>(S - R)) + r;
            const double base_lo = tail(x0_curve, static_cast<double>(S + R)) - r;
            for (int k = 2; k <= opt.max_power; ++k) {
                if (static_cast<double>(k) * S > static_cast<double>(horizon)) break;
                const double lhs = tail(x0_curve, static_cast<double>(k) * S);
                up.require_le(lhs, std::pow(base_up, k));
                if (base_lo > 0) lo.require_le(std::pow(base_lo, k), lhs);
            }
        }
        push(up);
        push(lo);
    }

    // additive distribution bounds at scale S
    {
        Check a{"additive_upper", "P(tau <= S) <= (S+R)/T + r"};
        Check b{"additive_lower", "P(tau <= S) >= 1/(1 + T/(S-2R)) - r"};
        Check d{"additive_window", "|P(tau <= S) - S/T| < 2R/T + (S/T)^2 + r"};
        if (S < T) {
            const double PleS = 1.0 - tail(x0_curve, static_cast<double>(S));
            a.require_le(PleS, (static_cast<double>(S + R)) / T + r);
            if (S > 2 * R)
                b.require_le(1.0 / (1.0 + T / static_cast<double>(S - 2 * R)) - r, PleS);
            const double SoT = static_cast<double>(S) / T;
            d.require_le(std::abs(PleS - SoT), 2.0 * R / T + SoT * SoT + r);
        }
        push(a);
        push(b);
        push(d);
    }

    // tail-density control: adding R to the horizon costs at most c of mass,
    // and at most a (1-c-cbar) factor for basin starts
    {
        Check a{"density_additive", "P(tau^z <= S'+R) <= P(tau^z <= S') + c"};
        Check b{"density_multiplicative",
                "z in B(x0, cbar-c): P(tau^z > S'+R) >= P(tau^z > S') (1-c-cbar)"};
        Check b2{"density_multiplicative_alt_radius",
                 "z in B(x0, c-cbar): same bound at the mirrored radius"};
        const Basin basin_alt = basin(chain, pair, std::clamp(c - cbar, 0.0, 1.0));
        for (std::size_t zi = 0; zi < probes.size(); ++zi)
            for (std::int64_t ui : u_values) {
                if (ui <= R) continue;
                const auto u = static_cast<double>(ui);
                const double le_u = 1.0 - tail(curves[zi], u);
                const double le_uR = 1.0 - tail(curves[zi], u + R);
                a.require_le(le_uR, le_u + c);
                if (in_members(basin_lemma, probes[zi]))
                    b.require_le(tail(curves[zi], u) * (1.0 - c - cbar),
                                 tail(curves[zi], u + R));
                if (in_members(basin_alt, probes[zi]))
                    b2.require_le(tail(curves[zi], u) * (1.0 - c - cbar),
                                  tail(curves[zi], u + R));
            }
        push(a);
        push(b);
        push(b2);
    }

    // multiplicative factorization with basin-aware constants
    if (X < 1.0) {
        Check lo{"multiplicative_lower",
                 "z in B(x0,r): P(tau^z > u+v) >= (1-(c+cbar+r)) P(tau^z > u) P(tau^x0 > v)"};
        Check up{"multiplicative_upper",
                 "P(tau^z > u+v) <= (1 + X/(1-X)) P(tau^z > u) P(tau^x0 > v)"};
        const double lo_const = 1.0 - X;
        const double up_const = 1.0 + X / (1.0 - X);
        for (std::size_t zi = 0; zi < probes.size(); ++zi)
            for (std::int64_t u : u_values)
                for (std::int64_t v : u_values) {
                    if (u < R || v < R) continue;
                    const double lhs = tail(curves[zi], static_cast<double>(u + v));
                    const double prod = tail(curves[zi], static_cast<double>(u)) *
                                        tail(x0_curve, static_cast<double>(v));
                    if (in_members(basin_r, probes[zi])) lo.require_le(lo_const * prod, lhs);
                    up.require_le(lhs, up_const * prod);
                }
        push(lo);
        push(up);
    }

    // iterated multiplicative bound with rate delta0
    if (X < 0.5) {
        Check ck{"iterated_multiplicative",
                 "e^{-delta0 k} <= P(tau > kS)/P(tau > S)^k <= e^{delta0 k}"};
        const double delta0 = std::log(1.0 + X / (1.0 - X));
        const double PS = tail(x0_curve, static_cast<double>(S));
        for (int k = 1; k <= opt.max_power; ++k) {
            if (static_cast<double>(k) * S > static_cast<double>(horizon)) break;
            if (PS <= 0) break;
            const double ratio = tail(x0_curve, static_cast<double>(k) * S) / std::pow(PS, k);
            ck.require_le(std::exp(-delta0 * k), ratio);
            ck.require_le(ratio, std::exp(delta0 * k));
        }
        push(ck);
    }

    // basin transfer of the reference tail
    {
        Check lo{"basin_tail_lower",
                 "z in B(x0,r0): P(tau^z > u) >= P(tau^x0 > u) (1-r-r0)"};
        Check up{"basin_tail_upper", "P(tau^z > u+R) <= P(tau^x0 > u) + r"};
        const double r0 = r;
        const Basin b0 = basin(chain, pair, r0);
        if (static_cast<double>(R) < T) {
            for (std::size_t zi = 0; zi < probes.size(); ++zi)
                for (std::int64_t ui : u_values) {
                    const auto u = static_cast<double>(ui);
                    if (in_members(b0, probes[zi]))
                        lo.require_le(tail(x0_curve, u) * (1.0 - r - r0),
                                      tail(curves[zi], u));
                    up.require_le(tail(curves[zi], u + R),
                                  tail(x0_curve, u) + r);
                }
        }
        push(lo);
        push(up);
    }

    // full sandwich for basin starts
    if (X < 1.0 && r + r < 1.0) {
        Check lo{"sandwich_lower",
                 "(1-X)/(1+r) <= P(tau^z > u+v) / [P(tau^z > u) P(tau^z > v)]"};
        Check up{"sandwich_upper",
                 "P(tau^z > u+v) / [P(tau^z > u) P(tau^z > v)] <= (1 + X/(1-X))/(1-r-r0)"};
        const double r0 = r;
        const Basin b0 = basin(chain, pair, r0);
        const double lo_const = (1.0 - X) / (1.0 + r);
        const double up_const = (1.0 + X / (1.0 - X)) / (1.0 - r - r0);
        for (std::size_t zi = 0; zi < probes.size(); ++zi) {
            if (!in_members(b0, probes[zi])) continue;
            for (std::int64_t u : u_values)
                for (std::int64_t v : u_values) {
                    if (u < R || v < R) continue;
                    const double denom = tail(curves[zi], static_cast<double>(u)) *
                                         tail(curves[zi], static_cast<double>(v));
                    if (denom <= 0) continue;
                    const double ratio = tail(curves[zi], static_cast<double>(u + v)) / denom;
                    lo.require_le(lo_const, ratio);
                    up.require_le(ratio, up_const);
                }
        }
        push(lo);
        push(up);
    }

    // recurrence error is submultiplicative over stacked horizons
    {
        Check ck{"recurrence_power", "sup_x P(tau_pair > NR) <= r^N"};
        if (R >= 1 && r > 0) {
            for (int N = 1; N <= 4; ++N) {
                const auto e = recurrence_error(chain, pair, N * R);
                ck.require_le(e.value, std::pow(r, N));
            }
        }
        push(ck);
    }

    return rep;
}

double ee_check(const MarkovChain& chain, const ReferencePair& pair, std::int64_t S,
                const SurvivalOptions& opt) {
    const double T = mean_hitting_time(chain, pair.x0, pair.G);
    if (static_cast<double>(S) > T) throw ParamOutOfRange("ee_check: needs S <= T^E");
    SurvivalOptions so = opt;
    so.threshold = 0.0;
    so.hard_cap = static_cast<std::int64_t>(T) + S + 1;
    const auto curve = survival_curve(chain, pair.x0, pair.G, so);
    const double PS = curve.tail(static_cast<double>(S));
    const double PleS = 1.0 - PS;
    if (PleS <= 0) throw SolverFailure("ee_check: P(tau <= S) vanishes");
    double alpha = 0.0;
    for (std::int64_t k = 0; static_cast<double>(k) * S <= T; ++k) {
        const double mass = curve.tail(static_cast<double>(k) * S) -
                            curve.tail(static_cast<double>(k + 1) * S);
        const double predicted = std::pow(PS, static_cast<double>(k)) * PleS;
        alpha = std::max(alpha, std::abs(mass / predicted - 1.0));
    }
    return alpha;
}

std::vector<DensityCell> density_profile(const MarkovChain& chain, const ReferencePair& pair,
                                         std::int64_t S, const SurvivalOptions& opt) {
    const double T = mean_hitting_time(chain, pair.x0, pair.G);
    if (static_cast<double>(S) > T) throw ParamOutOfRange("density_profile: needs S <= T^E");
    SurvivalOptions so = opt;
    so.threshold = 0.0;
    so.hard_cap = static_cast<std::int64_t>(T) + S + 1;
    const auto curve = survival_curve(chain, pair.x0, pair.G, so);
    const double PS = curve.tail(static_cast<double>(S));
    const double PleS = 1.0 - PS;
    if (PS <= 0 || PleS <= 0) throw SolverFailure("density_profile: degenerate scale");
    const double lambda = -std::log(PS);
    std::vector<DensityCell> cells;
    for (std::int64_t k = 0; static_cast<double>(k) * S <= T; ++k) {
        DensityCell cell;
        cell.k = k;
        cell.cell_mass = curve.tail(static_cast<double>(k) * S) -
                         curve.tail(static_cast<double>(k + 1) * S);
        cell.a_k = cell.cell_mass / (std::pow(PS, static_cast<double>(k)) * PleS) - 1.0;
        cell.density_estimate = std::exp(-lambda * static_cast<double>(k)) *
                                (1.0 - std::exp(-lambda)) * (1.0 + cell.a_k) /
                                (static_cast<double>(S) / T);
        cells.push_back(cell);
    }
    return cells;
}

} // namespace mchit
