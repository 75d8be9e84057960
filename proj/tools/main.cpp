// mchit-cli: reproducible hitting-time analyses of finite Markov chains.
//
// Subcommands: model | analyze | sweep | verify | simulate.
// Exit codes: 0 success, 2 config error, 3 numerical / check failure.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mchit/chain.hpp"
#include "mchit/expbounds.hpp"
#include "mchit/hitting.hpp"
#include "mchit/hypotheses.hpp"
#include "mchit/models.hpp"
#include "mchit/montecarlo.hpp"
#include "mchit/network.hpp"
#include "mchit/recurrence.hpp"

using nlohmann::json;
using namespace mchit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

/// JSON flavour of the CLI11 config file: {"subcommand": {"flag": value}}.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json doc = json::parse(input);
        std::vector<CLI::ConfigItem> items;
        const std::function<void(const json&, std::vector<std::string>)> walk =
            [&](const json& obj, std::vector<std::string> parents) {
                for (const auto& [key, value] : obj.items()) {
                    if (value.is_object()) {
                        auto next = parents;
                        next.push_back(key);
                        walk(value, next);
                        continue;
                    }
                    CLI::ConfigItem item;
                    item.name = key;
                    item.parents = parents;
                    if (value.is_array())
                        for (const auto& entry : value)
                            item.inputs.push_back(entry.is_string()
                                                      ? entry.get<std::string>()
                                                      : entry.dump());
                    else if (value.is_string())
                        item.inputs.push_back(value.get<std::string>());
                    else
                        item.inputs.push_back(value.dump());
                    items.push_back(std::move(item));
                }
            };
        walk(doc, {});
        return items;
    }
};

struct ModelParams {
    std::string preset;
    double p = 0.01, h = 0.25;
    int L = 64;
    double a = 0.0, b = 0.0, c = 0.0;
};

void add_model_flags(CLI::App* cmd, ModelParams& mp, bool require_preset) {
    cmd->set_help_flag("--help", "print this help message and exit");
    auto* preset = cmd->add_option("--preset", mp.preset,
                                   "model family: h | abc | abc-ex1 | abc-ex2");
    if (require_preset) preset->required();
    cmd->add_option("--p", mp.p, "depth parameter of the h family");
    cmd->add_option("--h", mp.h, "step exponent of the h family");
    cmd->add_option("--L", mp.L, "interval length of the abc family");
    cmd->add_option("--a", mp.a, "left-wall exponent");
    cmd->add_option("--b", mp.b, "back-step exponent");
    cmd->add_option("--c", mp.c, "forward-step exponent");
}

MarkovChain build_from_params(const ModelParams& mp) {
    return build_preset(mp.preset, mp.p, mp.h, mp.L, mp.a, mp.b, mp.c);
}

struct ChainSource {
    std::string file;
    ModelParams model;
};

void add_chain_source(CLI::App* cmd, ChainSource& src) {
    cmd->add_option("--chain", src.file, "chain JSON file");
    add_model_flags(cmd, src.model, false);
}

MarkovChain load_chain(const ChainSource& src) {
    if (!src.file.empty() && !src.model.preset.empty())
        throw ConfigError("give either --chain or --preset, not both");
    if (!src.file.empty()) return chain_from_json_file(src.file);
    if (!src.model.preset.empty()) return build_from_params(src.model);
    throw ConfigError("a chain is required: --chain FILE or --preset NAME");
}

/// Default reference pair of the built-in families: the metastable start
/// against the deep target.
ReferencePair default_pair(const MarkovChain& chain, const std::string& preset) {
    if (preset == "h") return ReferencePair(1, {3});
    return ReferencePair(0, {chain.n() - 1});
}

ReferencePair resolve_pair(const MarkovChain& chain, const ChainSource& src,
                           std::optional<int> x0, const std::vector<int>& G) {
    if (!x0.has_value() && G.empty() && !src.model.preset.empty())
        return default_pair(chain, src.model.preset);
    if (!x0.has_value() || G.empty())
        throw ConfigError("a reference pair is required: --x0 and --G");
    for (int g : G)
        if (g < 0 || g >= chain.n()) throw ConfigError("--G state out of range");
    if (*x0 < 0 || *x0 >= chain.n()) throw ConfigError("--x0 out of range");
    return ReferencePair(*x0, StateSet(G.begin(), G.end()));
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text;
}

json check_to_json(const InequalityCheck& c) {
    return {{"name", c.name}, {"detail", c.detail}, {"pass", c.pass}, {"slack", c.slack}};
}

void print_check_table(const std::vector<InequalityCheck>& checks) {
    for (const auto& c : checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(34) << c.name
                  << " slack " << std::setprecision(6) << c.slack << '\n';
}

json validation_to_json(const ValidationReport& v) {
    return {{"row_sums_ok", v.row_sums_ok},
            {"entries_ok", v.entries_ok},
            {"irreducible", v.irreducible},
            {"pass", v.pass()}};
}

void require_valid(const MarkovChain& chain) {
    const auto v = validate(chain);
    if (!v.pass()) throw ConfigError("chain validation failed: " + validation_to_json(v).dump());
}

// ---------------------------------------------------------------- analyze --

int cmd_analyze(const ChainSource& src, std::optional<int> x0, const std::vector<int>& G,
                std::vector<double> zetas, double r_target, int t_points, double t_max,
                const std::vector<std::string>& suites, const std::string& out) {
    const auto chain = load_chain(src);
    require_valid(chain);
    const auto pair = resolve_pair(chain, src, x0, G);
    if (zetas.empty()) zetas.push_back(std::exp(-1.0));

    json doc;
    doc["n_states"] = chain.n();
    doc["pair"] = {{"x0", pair.x0}, {"G", pair.G}};
    doc["validation"] = validation_to_json(validate(chain));

    const auto stats = hitting_stats(chain, pair, zetas);
    json quantiles = json::object();
    for (const auto& [z, q] : stats.quantile_map) quantiles[std::to_string(z)] = q;
    doc["hitting"] = {{"T_E", stats.mean},
                      {"T_LT", stats.local_time_at_start},
                      {"T_Q", quantiles}};

    const auto cert = minimal_R(chain, pair, r_target);
    doc["recurrence"] = {{"R", cert.R},
                         {"r_target", cert.r},
                         {"r_achieved", cert.achieved},
                         {"argmax_state", cert.argmax_state},
                         {"capped", cert.capped}};
    if (cert.capped) throw SolverFailure("recurrence certificate search hit its budget");

    doc["rho_A"] = rho_A(chain, pair).value;
    doc["rho_B"] = rho_B(chain, pair).value;

    const auto [c, cbar] = compute_c_cbar(chain, pair, cert.R, cert.achieved);
    doc["short_time"] = {{"c", c}, {"cbar", cbar}};

    const bool want = suites.empty();
    auto wanted = [&](const std::string& name) {
        return want || std::find(suites.begin(), suites.end(), name) != suites.end();
    };

    if (wanted("envelope")) {
        EnvelopeInputs in;
        in.eps = static_cast<double>(cert.R) / stats.mean;
        in.r = cert.achieved;
        in.c = c;
        in.cbar = cbar;
        const auto params = assemble_envelope(in);
        const auto dev = verify_exponential_law(chain, pair, params, stats.mean,
                                                default_t_grid(t_points, t_max), pair.x0,
                                                false);
        doc["envelope"] = {{"eps", params.eps},
                           {"eta", params.eta},
                           {"lambda0", params.lambda0},
                           {"lambda1", params.lambda1},
                           {"C_plus", params.C_plus},
                           {"C_minus", params.C_minus},
                           {"Ctilde_plus", params.Ctilde_plus},
                           {"Ctilde_minus", params.Ctilde_minus},
                           {"pass", dev.pass},
                           {"max_ratio", dev.max_ratio},
                           {"max_measured", dev.max_measured},
                           {"worst_t", dev.worst_t},
                           {"t_grid", dev.t_grid},
                           {"measured", dev.measured},
                           {"bound", dev.envelope}};
    }

    if (wanted("lemmas")) {
        LemmaSuiteOptions lopt;
        lopt.S = std::max<std::int64_t>(cert.R + 1,
                                        static_cast<std::int64_t>(stats.mean / 3.0));
        json arr = json::array();
        const auto suite = lemma_suite(chain, pair, cert, lopt);
        for (const auto& ck : suite.checks) arr.push_back(check_to_json(ck));
        doc["lemma_suite"] = {{"checks", arr},
                              {"evaluated", suite.evaluated},
                              {"skipped", suite.skipped},
                              {"all_pass", suite.all_pass()}};
    }

    write_text(out, doc.dump(2) + "\n");
    return kExitOk;
}

// ------------------------------------------------------------------ sweep --

int cmd_sweep(const std::string& preset, ModelParams mp, const std::vector<double>& grid,
              double zeta, bool use_minimal_R, double minimal_R_target,
              const std::string& out_csv, const std::string& out_json) {
    if (grid.empty()) throw InsufficientGrid("sweep: --grid is empty");
    SweepInputs in;
    in.grid = grid;
    in.zeta = zeta;
    in.use_minimal_R = use_minimal_R;
    in.minimal_R_target = minimal_R_target;
    if (const char* env = std::getenv("MCHIT_WORKERS")) in.workers = std::atoi(env);

    if (preset == "h") {
        in.parameter_name = "p";
        const double h = mp.h;
        in.build = [h](double p) { return build_h_model({p, h}); };
        in.pair = [](const MarkovChain&, double) { return ReferencePair(1, {3}); };
    } else if (preset == "abc" || preset == "abc-ex1" || preset == "abc-ex2") {
        in.parameter_name = "L";
        in.build = [preset, mp](double L) {
            ModelParams local = mp;
            local.preset = preset;
            local.L = static_cast<int>(L);
            return build_from_params(local);
        };
        in.pair = [](const MarkovChain& chain, double) {
            return ReferencePair(0, {chain.n() - 1});
        };
    } else {
        throw ConfigError("sweep: unknown preset " + preset);
    }

    const auto sweep = evaluate_hypotheses(in);

    std::ostringstream csv;
    csv << "param,n_states,rho_A,rho_B,T_E,T_LT,T_Q,sup_tau_pair,R_n,r_n_markov,r_n_exact\n";
    for (const auto& pt : sweep.points) {
        csv << std::setprecision(17) << pt.parameter << ',' << pt.n_states << ',' << pt.rho_A
            << ',' << pt.rho_B << ',' << pt.T_E << ',' << pt.T_LT << ',';
        if (!pt.T_Q.empty()) csv << pt.T_Q.begin()->second;
        csv << ',' << pt.sup_tau_pair << ',' << pt.R_n << ',' << pt.r_n_markov << ',';
        if (pt.r_n_exact) csv << *pt.r_n_exact;
        csv << '\n';
    }
    write_text(out_csv, csv.str());

    json doc;
    doc["parameter"] = sweep.parameter_name;
    doc["grid"] = sweep.grid;
    doc["quantiles_skipped"] = sweep.quantiles_skipped;
    json fits = json::object();
    for (const auto& [key, fit] : sweep.fits)
        fits[key] = {{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"max_rel_residual", fit.max_rel_residual}};
    doc["fits"] = fits;
    doc["verdicts"] = sweep.verdicts;
    write_text(out_json, doc.dump(2) + "\n");
    return kExitOk;
}

// ----------------------------------------------------------------- verify --

int cmd_verify(const ChainSource& src, std::optional<int> x0, const std::vector<int>& G,
               const std::vector<std::string>& suites, double r_target, double slack,
               double zeta) {
    const auto chain = load_chain(src);
    require_valid(chain);
    const auto pair = resolve_pair(chain, src, x0, G);

    const bool all = suites.empty();
    auto wanted = [&](const std::string& name) {
        return all || std::find(suites.begin(), suites.end(), name) != suites.end();
    };

    std::vector<InequalityCheck> checks;
    if (wanted("lemmas")) {
        const auto cert = minimal_R(chain, pair, r_target);
        if (cert.capped) throw SolverFailure("recurrence certificate search hit its budget");
        const double T = mean_hitting_time(chain, pair.x0, pair.G);
        LemmaSuiteOptions lopt;
        lopt.S = std::max<std::int64_t>(cert.R + 1, static_cast<std::int64_t>(T / 3.0));
        lopt.slack = slack;
        const auto suite = lemma_suite(chain, pair, cert, lopt);
        checks.insert(checks.end(), suite.checks.begin(), suite.checks.end());
    }
    if (wanted("t3")) {
        const auto rep = theorem_t3_inequality_suite(chain, pair, zeta);
        checks.insert(checks.end(), rep.checks.begin(), rep.checks.end());
    }
    if (wanted("network")) {
        const auto pi = stationary_distribution(chain);
        const auto rev = check_reversibility(chain, pi);
        InequalityCheck c;
        c.name = "resistance_vs_local_time";
        c.detail = "R_B^x = E(xi_B^x(x)) / mu(x) on the reversible network";
        if (!rev.reversible) {
            c.pass = true; // not applicable: the identity needs detailed balance
            c.detail += " (skipped: chain not reversible)";
        } else {
            const auto net = edge_resistances(chain, pi);
            double worst = 0.0;
            for (State z = 0; z < chain.n(); ++z) {
                if (pair.in_G(z)) continue;
                worst = std::max(worst,
                                 total_resistance_vs_green(chain, net, z, pair.G).relative_gap);
            }
            c.slack = 1e-10 - worst;
            c.pass = worst <= 1e-10;
        }
        checks.push_back(c);
    }
    print_check_table(checks);
    const bool ok = std::all_of(checks.begin(), checks.end(),
                                [](const InequalityCheck& c) { return c.pass; });
    return ok ? kExitOk : kExitCheck;
}

// --------------------------------------------------------------- simulate --

int cmd_simulate(const ChainSource& src, int start, const std::vector<int>& target,
                 std::int64_t count, std::uint64_t seed, std::int64_t step_cap,
                 const std::string& out_samples, const std::string& out_report) {
    const auto chain = load_chain(src);
    require_valid(chain);
    if (count <= 0) throw ConfigError("simulate: --count must be positive");
    StateSet G;
    if (target.empty() && !src.model.preset.empty()) {
        const auto pair = default_pair(chain, src.model.preset);
        G = pair.G;
        if (start < 0) start = pair.x0;
    } else {
        G = StateSet(target.begin(), target.end());
    }
    if (G.empty()) throw ConfigError("simulate: --target is required");
    if (start < 0 || start >= chain.n()) throw ConfigError("simulate: bad --start");

    SampleOptions opt;
    opt.count = count;
    opt.seed = seed;
    opt.step_cap = step_cap;
    const auto samples = sample_hitting_times(chain, start, G, opt);
    if (!out_samples.empty()) samples_to_csv(samples, out_samples);

    const auto exact = survival_curve(chain, start, G);
    const double ks = ks_distance(samples, exact);
    const double band = dkw_band(count);
    json doc = {{"generator", "splitmix64/xoshiro256** v1"},
                {"seed", seed},
                {"count", count},
                {"capped_count", samples.capped_count},
                {"step_cap", samples.step_cap},
                {"ks_distance", ks},
                {"dkw_band_99", band},
                {"pass", ks <= band}};
    write_text(out_report, doc.dump(2) + "\n");
    return ks <= band ? kExitOk : kExitCheck;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hitting-time analysis toolkit for finite Markov chains"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file: {\"subcommand\": {\"flag\": value}}");

    // model
    auto* model = app.add_subcommand("model", "emit a chain JSON file for a preset family");
    ModelParams model_params;
    std::string model_out;
    add_model_flags(model, model_params, true);
    model->add_option("--out", model_out, "output file (default stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "full single-chain report");
    ChainSource an_src;
    std::optional<int> an_x0;
    std::vector<int> an_G;
    std::vector<double> an_zetas;
    double an_r_target = 0.1;
    int an_t_points = 200;
    double an_t_max = 20.0;
    std::vector<std::string> an_suites;
    std::string an_out;
    add_chain_source(analyze, an_src);
    analyze->add_option("--x0", an_x0, "reference state");
    analyze->add_option("--G", an_G, "target states")->delimiter(',');
    analyze->add_option("--zeta", an_zetas, "quantile levels (default e^-1)")->delimiter(',');
    analyze->add_option("--r-target", an_r_target, "recurrence error target");
    analyze->add_option("--t-points", an_t_points, "deviation grid size");
    analyze->add_option("--t-max", an_t_max, "deviation grid endpoint");
    analyze->add_option("--suites", an_suites, "subset of {envelope, lemmas}")->delimiter(',');
    analyze->add_option("--out", an_out, "report JSON file (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "family sweep with log-log fits and verdicts");
    ModelParams sw_params;
    std::string sw_preset;
    std::vector<double> sw_grid;
    double sw_zeta = std::exp(-1.0);
    bool sw_minimal = false;
    double sw_minimal_target = 0.01;
    std::string sw_csv, sw_json;
    sweep->add_option("--preset", sw_preset, "h | abc | abc-ex1 | abc-ex2")->required();
    sweep->add_option("--grid", sw_grid, "parameter grid (p for h, L for abc)")
        ->delimiter(',')
        ->required();
    sweep->set_help_flag("--help", "print this help message and exit");
    sweep->add_option("--h", sw_params.h, "step exponent of the h family");
    sweep->add_option("--a", sw_params.a, "left-wall exponent");
    sweep->add_option("--b", sw_params.b, "back-step exponent");
    sweep->add_option("--c", sw_params.c, "forward-step exponent");
    sweep->add_option("--zeta", sw_zeta, "quantile level");
    sweep->add_flag("--minimal-R", sw_minimal, "select R_n by certified search");
    sweep->add_option("--minimal-R-target", sw_minimal_target, "error target for --minimal-R");
    sweep->add_option("--out-csv", sw_csv, "per-point CSV (default stdout)");
    sweep->add_option("--out-json", sw_json, "fits + verdicts JSON (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "exact inequality suites; exit 0 iff all pass");
    ChainSource ve_src;
    std::optional<int> ve_x0;
    std::vector<int> ve_G;
    std::vector<std::string> ve_suites;
    double ve_r_target = 0.2;
    double ve_slack = 1e-10;
    double ve_zeta = std::exp(-1.0);
    add_chain_source(verify, ve_src);
    verify->add_option("--x0", ve_x0, "reference state");
    verify->add_option("--G", ve_G, "target states")->delimiter(',');
    verify->add_option("--suites", ve_suites, "subset of {lemmas, t3, network}")->delimiter(',');
    verify->add_option("--r-target", ve_r_target, "recurrence error target");
    verify->add_option("--slack", ve_slack, "tolerated slack on exact inequalities");
    verify->add_option("--zeta", ve_zeta, "quantile level");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample hitting times and test the law");
    ChainSource si_src;
    int si_start = -1;
    std::vector<int> si_target;
    std::int64_t si_count = 10000;
    std::uint64_t si_seed = 0;
    std::int64_t si_cap = 0;
    std::string si_samples, si_report;
    add_chain_source(simulate, si_src);
    simulate->add_option("--start", si_start, "starting state");
    simulate->add_option("--target", si_target, "target states")->delimiter(',');
    simulate->add_option("--count", si_count, "number of trajectories");
    simulate->add_option("--seed", si_seed, "base seed");
    simulate->add_option("--step-cap", si_cap, "per-trajectory cap (0 derives from T^E)");
    simulate->add_option("--out", si_samples, "samples CSV file");
    simulate->add_option("--report", si_report, "KS report JSON (default stdout)");

    try {
        app.parse(argc, argv);
        if (*model) {
            const auto chain = build_from_params(model_params);
            write_text(model_out, chain_to_json(chain) + "\n");
            return kExitOk;
        }
        if (*analyze)
            return cmd_analyze(an_src, an_x0, an_G, an_zetas, an_r_target, an_t_points,
                               an_t_max, an_suites, an_out);
        if (*sweep)
            return cmd_sweep(sw_preset, sw_params, sw_grid, sw_zeta, sw_minimal,
                             sw_minimal_target, sw_csv, sw_json);
        if (*verify)
            return cmd_verify(ve_src, ve_x0, ve_G, ve_suites, ve_r_target, ve_slack, ve_zeta);
        if (*simulate)
            return cmd_simulate(si_src, si_start, si_target, si_count, si_seed, si_cap,
                                si_samples, si_report);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParamOutOfRange& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientGrid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "check failure: " << e.what() << '\n';
        return kExitCheck;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheck;
    }
}
