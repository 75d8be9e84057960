#include "mchit/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace mchit {

const Tolerances& tolerances() {
    static Tolerances tol;
    return tol;
}

MarkovChain::MarkovChain(int n, std::vector<std::vector<std::pair<State, double>>> rows)
    : n_(n), rows_(std::move(rows)) {
    if (n_ <= 0 || static_cast<int>(rows_.size()) != n_)
        throw ParamOutOfRange("MarkovChain: row count must equal n");
    for (auto& row : rows_) {
        std::sort(row.begin(), row.end());
        // merge duplicate columns, drop exact zeros
        std::vector<std::pair<State, double>> merged;
        for (auto& [col, p] : row) {
            if (col < 0 || col >= n_)
                throw ParamOutOfRange("MarkovChain: column index out of range");
            if (!merged.empty() && merged.back().first == col)
                merged.back().second += p;
            else
                merged.emplace_back(col, p);
        }
        std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
        row = std::move(merged);
    }
    detect_band();
}

MarkovChain MarkovChain::birth_death(const std::vector<double>& up,
                                     const std::vector<double>& down) {
    const int n = static_cast<int>(up.size());
    if (n < 2 || down.size() != up.size())
        throw ParamOutOfRange("birth_death: need matching up/down of length >= 2");
    if (up[n - 1] != 0.0 || down[0] != 0.0)
        throw ParamOutOfRange("birth_death: up at the right edge and down at 0 must be 0");
    std::vector<std::vector<std::pair<State, double>>> rows(n);
    for (int x = 0; x < n; ++x) {
        const double u = up[x], d = down[x];
        if (u < 0 || d < 0 || u + d > 1.0 + tolerances().structural)
            throw ParamOutOfRange("birth_death: up + down must lie in [0,1] per state");
        if (x > 0 && d > 0) rows[x].emplace_back(x - 1, d);
        const double s = 1.0 - u - d;
        if (s != 0.0) rows[x].emplace_back(x, s);
        if (x < n - 1 && u > 0) rows[x].emplace_back(x + 1, u);
    }
    return MarkovChain(n, std::move(rows));
}

void MarkovChain::detect_band() {
    tridiagonal_ = true;
    for (State x = 0; x < n_ && tridiagonal_; ++x)
        for (const auto& [y, p] : rows_[x])
            if (std::abs(y - x) > 1) tridiagonal_ = false;
    if (!tridiagonal_) return;
    up_.assign(n_, 0.0);
    down_.assign(n_, 0.0);
    stay_.assign(n_, 0.0);
    for (State x = 0; x < n_; ++x)
        for (const auto& [y, p] : rows_[x]) {
            if (y == x + 1)
                up_[x] = p;
            else if (y == x - 1)
                down_[x] = p;
            else
                stay_[x] = p;
        }
}

double MarkovChain::prob(State x, State y) const {
    for (const auto& [col, p] : rows_[x])
        if (col == y) return p;
    return 0.0;
}

std::size_t MarkovChain::nnz() const {
    std::size_t total = 0;
    for (const auto& row : rows_) total += row.size();
    return total;
}

ReferencePair::ReferencePair(State x0_, StateSet G_) : x0(x0_), G(std::move(G_)) {
    if (G.empty()) throw ParamOutOfRange("ReferencePair: G must be nonempty");
    std::sort(G.begin(), G.end());
    G.erase(std::unique(G.begin(), G.end()), G.end());
    if (std::binary_search(G.begin(), G.end(), x0))
        throw ParamOutOfRange("ReferencePair: x0 must not belong to G");
}

bool ReferencePair::in_G(State x) const { return std::binary_search(G.begin(), G.end(), x); }

StateSet ReferencePair::absorbing_set() const {
    StateSet a = G;
    a.push_back(x0);
    std::sort(a.begin(), a.end());
    return a;
}

namespace {

// strong connectivity = every state reachable from 0 in the graph and in its reverse
bool strongly_connected(const MarkovChain& chain) {
    const int n = chain.n();
    std::vector<std::vector<State>> rev(n);
    for (State x = 0; x < n; ++x)
        for (const auto& [y, p] : chain.row(x))
            if (p > 0 && y != x) rev[y].push_back(x);
    auto bfs = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<State> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            State x = stack.back();
            stack.pop_back();
            if (forward) {
                for (const auto& [y, p] : chain.row(x))
                    if (p > 0 && !seen[y]) {
                        seen[y] = 1;
                        ++count;
                        stack.push_back(y);
                    }
            } else {
                for (State y : rev[x])
                    if (!seen[y]) {
                        seen[y] = 1;
                        ++count;
                        stack.push_back(y);
                    }
            }
        }
        return count == n;
    };
    return bfs(true) && bfs(false);
}

} // namespace

ValidationReport validate(const MarkovChain& chain) {
    ValidationReport rep;
    const double tol = tolerances().structural;
    for (State x = 0; x < chain.n(); ++x) {
        double sum = 0.0;
        bool entries_ok = true;
        for (const auto& [y, p] : chain.row(x)) {
            sum += p;
            if (p < -tol || p > 1.0 + tol) entries_ok = false;
        }
        const bool row_ok = std::abs(sum - 1.0) <= tol;
        if (!row_ok || !entries_ok) rep.bad_rows.push_back(x);
        rep.row_sums_ok = rep.row_sums_ok && row_ok;
        rep.entries_ok = rep.entries_ok && entries_ok;
    }
    rep.irreducible = strongly_connected(chain);
    return rep;
}

StateDistribution stationary_distribution(const MarkovChain& chain) {
    const int n = chain.n();
    if (!strongly_connected(chain)) throw NotIrreducible("stationary_distribution: chain is not irreducible");

    StateDistribution pi;
    pi.weights.assign(n, 0.0);

    if (chain.is_tridiagonal()) {
        // detailed-balance product formula, in log space to dodge overflow
        std::vector<double> logw(n, 0.0);
        for (int x = 0; x + 1 < n; ++x) {
            const double u = chain.up()[x], d = chain.down()[x + 1];
            if (u <= 0 || d <= 0) throw NotIrreducible("stationary_distribution: broken band");
            logw[x + 1] = logw[x] + std::log(u) - std::log(d);
        }
        const double m = *std::max_element(logw.begin(), logw.end());
        double z = 0.0;
        for (int x = 0; x < n; ++x) {
            pi.weights[x] = std::exp(logw[x] - m);
            z += pi.weights[x];
        }
        for (auto& w : pi.weights) w /= z;
    } else {
        if (n > 4000) throw SolverFailure("stationary_distribution: dense solve too large");
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n); // (P^T - I) with last row = normalization
        for (State x = 0; x < n; ++x) {
            for (const auto& [y, p] : chain.row(x)) A(y, x) += p;
            A(x, x) -= 1.0;
        }
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        A.row(n - 1).setOnes();
        b(n - 1) = 1.0;
        Eigen::VectorXd sol = A.partialPivLu().solve(b);
        for (State x = 0; x < n; ++x) pi.weights[x] = sol(x);
    }

    // residual check ||pi P - pi||_inf
    std::vector<double> piP(n, 0.0);
    for (State x = 0; x < n; ++x)
        for (const auto& [y, p] : chain.row(x)) piP[y] += pi.weights[x] * p;
    double resid = 0.0;
    for (State x = 0; x < n; ++x) resid = std::max(resid, std::abs(piP[x] - pi.weights[x]));
    if (resid > tolerances().solver)
        throw SolverFailure("stationary_distribution: residual " + std::to_string(resid));
    return pi;
}

ReversibilityReport check_reversibility(const MarkovChain& chain, const StateDistribution& pi) {
    ReversibilityReport rep;
    for (State x = 0; x < chain.n(); ++x)
        for (const auto& [y, p] : chain.row(x)) {
            if (y <= x) continue;
            const double v = std::abs(pi[x] * p - pi[y] * chain.prob(y, x));
            rep.max_violation = std::max(rep.max_violation, v);
        }
    rep.reversible = rep.max_violation <= tolerances().structural;
    return rep;
}

// --- JSON interchange ---

std::string chain_to_json(const MarkovChain& chain) {
    nlohmann::json j;
    j["n"] = chain.n();
    if (chain.is_tridiagonal()) {
        j["format"] = "tridiagonal";
        j["up"] = chain.up();
        j["down"] = chain.down();
    } else {
        j["format"] = "dense";
        auto& rows = j["rows"];
        rows = nlohmann::json::array();
        for (State x = 0; x < chain.n(); ++x) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& [y, p] : chain.row(x)) row.push_back({y, p});
            rows.push_back(std::move(row));
        }
    }
    return j.dump(2);
}

MarkovChain chain_from_json(const std::string& text) try {
    nlohmann::json j = nlohmann::json::parse(text);
    const int n = j.at("n").get<int>();
    const std::string format = j.value("format", "dense");
    if (format == "tridiagonal" && j.contains("up")) {
        auto up = j.at("up").get<std::vector<double>>();
        auto down = j.at("down").get<std::vector<double>>();
        if (static_cast<int>(up.size()) != n)
            throw ConfigError("chain_from_json: up/down length mismatch with n");
        return MarkovChain::birth_death(up, down);
    }
    std::vector<std::vector<std::pair<State, double>>> rows(n);
    const auto& jrows = j.at("rows");
    if (static_cast<int>(jrows.size()) != n) throw ConfigError("chain_from_json: rows size mismatch");
    for (int x = 0; x < n; ++x)
        for (const auto& e : jrows[x])
            rows[x].emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    return MarkovChain(n, std::move(rows));
} catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("chain_from_json: malformed document: ") + e.what());
}

MarkovChain chain_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open chain file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return chain_from_json(ss.str());
}

void chain_to_json_file(const MarkovChain& chain, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write chain file: " + path);
    out << chain_to_json(chain) << "\n";
}

} // namespace mchit
