// Python bindings for the hitting-time analysis core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "mchit/chain.hpp"
#include "mchit/expbounds.hpp"
#include "mchit/hitting.hpp"
#include "mchit/hypotheses.hpp"
#include "mchit/models.hpp"
#include "mchit/montecarlo.hpp"
#include "mchit/network.hpp"
#include "mchit/recurrence.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace mchit;

namespace {

ReferencePair make_pair(State x0, const std::vector<State>& G) {
    return ReferencePair(x0, StateSet(G.begin(), G.end()));
}

} // namespace

PYBIND11_MODULE(_mchit, m) {
    m.doc() = "Exact and Monte Carlo analysis of hitting times of finite Markov chains";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ParamOutOfRange>(m, "ParamOutOfRange");
    py::register_exception<SolverFailure>(m, "SolverFailure");
    py::register_exception<SmallnessViolated>(m, "SmallnessViolated");
    py::register_exception<InsufficientGrid>(m, "InsufficientGrid");

    py::class_<MarkovChain>(m, "MarkovChain")
        .def_property_readonly("n", &MarkovChain::n)
        .def("prob", &MarkovChain::prob, py::arg("x"), py::arg("y"))
        .def_property_readonly("is_tridiagonal", &MarkovChain::is_tridiagonal)
        .def("to_json", [](const MarkovChain& c) { return chain_to_json(c); })
        .def_static("from_json", [](const std::string& s) { return chain_from_json(s); })
        .def("__repr__", [](const MarkovChain& c) {
            return "<MarkovChain n=" + std::to_string(c.n()) + ">";
        });

    m.def("build_preset", &build_preset, py::arg("name"), py::arg("p") = 0.01,
          py::arg("h") = 0.25, py::arg("L") = 64, py::arg("a") = 0.0, py::arg("b") = 0.0,
          py::arg("c") = 0.0,
          "Built-in families: 'h', 'abc', 'abc-ex1', 'abc-ex2'");
    m.def("build_birth_death", &build_birth_death, py::arg("up"), py::arg("down"));
    m.def(
        "validate",
        [](const MarkovChain& chain) {
            const auto v = validate(chain);
            return py::dict("row_sums_ok"_a = v.row_sums_ok, "entries_ok"_a = v.entries_ok,
                            "irreducible"_a = v.irreducible, "pass"_a = v.pass());
        },
        py::arg("chain"));

    m.def(
        "mean_hitting_time",
        [](const MarkovChain& chain, State start, const std::vector<State>& target) {
            return mean_hitting_time(chain, start, StateSet(target.begin(), target.end()));
        },
        py::arg("chain"), py::arg("start"), py::arg("target"));
    m.def(
        "survival_curve",
        [](const MarkovChain& chain, State start, const std::vector<State>& target) {
            return survival_curve(chain, start, StateSet(target.begin(), target.end())).values;
        },
        py::arg("chain"), py::arg("start"), py::arg("target"),
        "Exact tail P(tau > t) for t = 0..horizon");
    m.def(
        "hitting_stats",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G,
           const std::vector<double>& zetas) {
            const auto s = hitting_stats(chain, make_pair(x0, G), zetas);
            return py::dict("T_E"_a = s.mean, "T_LT"_a = s.local_time_at_start,
                            "T_Q"_a = s.quantile_map);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"),
        py::arg("zetas") = std::vector<double>{std::exp(-1.0)});
    m.def(
        "green_diagonal",
        [](const MarkovChain& chain, const std::vector<State>& taboo) {
            return green_diagonal(chain, StateSet(taboo.begin(), taboo.end()));
        },
        py::arg("chain"), py::arg("taboo"));
    m.def(
        "taboo_probability",
        [](const MarkovChain& chain, State start, const std::vector<State>& Y,
           const std::vector<State>& B) {
            return taboo_probability(chain, start, StateSet(Y.begin(), Y.end()),
                                     StateSet(B.begin(), B.end()));
        },
        py::arg("chain"), py::arg("start"), py::arg("Y"), py::arg("B"));

    m.def(
        "rho_A",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G) {
            return rho_A(chain, make_pair(x0, G)).value;
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"));
    m.def(
        "rho_B",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G) {
            return rho_B(chain, make_pair(x0, G)).value;
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"));
    m.def(
        "metastable_set",
        [](const MarkovChain& chain, const std::vector<State>& G, double eps) {
            return metastable_set(chain, StateSet(G.begin(), G.end()), eps);
        },
        py::arg("chain"), py::arg("G"), py::arg("eps"));

    m.def(
        "minimal_R",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G, double r_target,
           std::int64_t max_R) {
            const auto c = minimal_R(chain, make_pair(x0, G), r_target, max_R);
            return py::dict("R"_a = c.R, "r"_a = c.r, "achieved"_a = c.achieved,
                            "argmax_state"_a = c.argmax_state, "capped"_a = c.capped);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"), py::arg("r_target"),
        py::arg("max_R") = -1);
    m.def(
        "basin",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G, double r0) {
            const auto b = basin(chain, make_pair(x0, G), r0);
            return py::dict("r0"_a = b.r0, "members"_a = b.members, "values"_a = b.values);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"), py::arg("r0"));

    m.def(
        "lemma_suite",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G, double r_target) {
            const auto pair = make_pair(x0, G);
            const auto cert = minimal_R(chain, pair, r_target);
            const double T = mean_hitting_time(chain, x0, pair.G);
            LemmaSuiteOptions opt;
            opt.S = std::max<std::int64_t>(cert.R + 1, static_cast<std::int64_t>(T / 3));
            const auto rep = lemma_suite(chain, pair, cert, opt);
            py::list checks;
            for (const auto& c : rep.checks)
                checks.append(py::dict("name"_a = c.name, "pass"_a = c.pass,
                                       "slack"_a = c.slack, "detail"_a = c.detail));
            return py::dict("all_pass"_a = rep.all_pass(), "evaluated"_a = rep.evaluated,
                            "skipped"_a = rep.skipped, "checks"_a = checks);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"), py::arg("r_target") = 0.1);

    m.def(
        "verify_exponential_law",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G, double r_target,
           int t_points, double t_max) {
            const auto pair = make_pair(x0, G);
            const double T = mean_hitting_time(chain, x0, pair.G);
            const auto cert = minimal_R(chain, pair, r_target);
            const auto [c, cbar] = compute_c_cbar(chain, pair, cert.R, cert.achieved);
            EnvelopeInputs in;
            in.eps = static_cast<double>(cert.R) / T;
            in.r = cert.achieved;
            in.c = c;
            in.cbar = cbar;
            in.r0 = cert.achieved;
            const auto params = assemble_envelope(in);
            const auto dev = verify_exponential_law(chain, pair, params, T,
                                                    default_t_grid(t_points, t_max), x0, false);
            return py::dict("pass"_a = dev.pass, "max_measured"_a = dev.max_measured,
                            "max_ratio"_a = dev.max_ratio, "worst_t"_a = dev.worst_t,
                            "t_grid"_a = dev.t_grid, "measured"_a = dev.measured,
                            "envelope"_a = dev.envelope);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"), py::arg("r_target") = 0.1,
        py::arg("t_points") = 200, py::arg("t_max") = 20.0);

    m.def(
        "theorem_t3_inequality_suite",
        [](const MarkovChain& chain, State x0, const std::vector<State>& G, double zeta) {
            const auto rep = theorem_t3_inequality_suite(chain, make_pair(x0, G), zeta);
            py::list checks;
            for (const auto& c : rep.checks)
                checks.append(py::dict("name"_a = c.name, "pass"_a = c.pass,
                                       "slack"_a = c.slack, "detail"_a = c.detail));
            return py::dict("all_pass"_a = rep.all_pass(), "checks"_a = checks);
        },
        py::arg("chain"), py::arg("x0"), py::arg("G"), py::arg("zeta") = std::exp(-1.0));

    m.def(
        "sample_hitting_times",
        [](const MarkovChain& chain, State start, const std::vector<State>& target,
           std::int64_t count, std::uint64_t seed, std::int64_t step_cap) {
            SampleOptions opt;
            opt.count = count;
            opt.seed = seed;
            opt.step_cap = step_cap;
            const auto s = sample_hitting_times(chain, start,
                                                StateSet(target.begin(), target.end()), opt);
            return py::dict("samples"_a = s.samples, "capped_count"_a = s.capped_count,
                            "step_cap"_a = s.step_cap, "seed"_a = s.seed);
        },
        py::arg("chain"), py::arg("start"), py::arg("target"), py::arg("count"),
        py::arg("seed") = 0, py::arg("step_cap") = 0);
    m.def("dkw_band", &dkw_band, py::arg("n"), py::arg("confidence") = 0.99);
}
