#pragma once

#include "adaptscan/dot.hpp"
#include "adaptscan/stats.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace adaptscan {
namespace cli {

namespace detail2 {

inline ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

inline std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = adaptscan::detail::strip(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Override syntax: [column=]target~uniform(lo,hi) | [column=]target~constant(c)
inline SampleOverride parse_override(const std::string& spec) {
    std::string s = adaptscan::detail::strip(spec);
    SampleOverride ov;
    size_t tilde = s.find('~');
    if (tilde == std::string::npos)
        throw Error("override '" + spec + "' lacks '~distribution'");
    std::string head = adaptscan::detail::strip(s.substr(0, tilde));
    size_t eq = head.find('=');
    if (eq != std::string::npos) {
        ov.column = adaptscan::detail::strip(head.substr(0, eq));
        ov.target = adaptscan::detail::strip(head.substr(eq + 1));
    } else {
        ov.target = head;
    }
    ov.dist = adaptscan::detail::parse_distribution(s.substr(tilde + 1), 0);
    return ov;
}

struct Output {
    std::ostream& fallback;
    std::string path;
    std::ofstream file;
    std::ostream& stream() {
        if (path.empty()) return fallback;
        if (!file.is_open()) {
            file.open(path);
            if (!file) throw Error("cannot open output file '" + path + "'");
        }
        return file;
    }
};

inline BipartiteSystem bipartite_for_mode(const ModelSpec& m, const std::string& mode) {
    if (mode == "dynamic") return build_bipartite(m, dynamic_system(m));
    if (mode == "equilibrium") return build_bipartite(m, equilibrium_system(m));
    throw Error("unknown mode '" + mode + "'");
}

inline void print_report(std::ostream& out, const ExperimentResult& res) {
    out << "variable,pre_eq,transient_peak,final_value,final_deviation,signed_change\n";
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const auto& d : res.report)
        out << d.var << "," << num(d.pre_eq) << "," << num(d.transient_peak) << ","
            << num(d.final_value) << "," << num(d.final_deviation) << ","
            << num(d.signed_change) << "\n";
}

inline void print_verdict(std::ostream& out, const DetectionVerdict& v) {
    out << "target: " << v.target_equation << "\n";
    out << "condition1: " << (v.condition1 ? "yes" : "no") << "\n";
    out << "condition2: " << (v.condition2 ? "yes" : "no");
    if (!v.witnesses.empty()) {
        out << " (witnesses:";
        for (const auto& w : v.witnesses) out << " " << w;
        out << ")";
    }
    out << "\n";
    out << "conclusion: " << (v.adaptation_detected() ? "adaptation_detected" : "inconclusive")
        << "\n";
}

} // namespace detail2

/// Command-line driver; returns the process exit code. Exit codes: 0 success,
/// 1 usage error, 2 model/graph/data error, 3 numerical non-convergence.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"causal ordering and perfect adaptation analysis"};
    app.require_subcommand(1);

    std::string model_path, mode = "equilibrium", out_path, format = "dot";
    std::string a_arg, b_arg, given_arg, vars_arg, input_arg, param_arg;
    std::string data_path, context_arg, candidates_arg, target_arg;
    std::string baseline_path, intervened_path, equation_arg, x0_arg;
    std::vector<std::string> override_specs;
    double pre = 0.0, post = 0.0, alpha = 0.01;
    int max_cond = 1, n_samples = 500;
    std::uint64_t seed = 1;
    bool oriented = false;
    SimConfig cfg;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("model", model_path, "model file (.com)")->required();
    };
    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--mode", mode, "dynamic or equilibrium")
            ->check(CLI::IsMember({"dynamic", "equilibrium"}));
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "output file"); };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--dt", cfg.dt, "integration step");
        sub->add_option("--t-max", cfg.t_max, "integration horizon");
        sub->add_option("--tol", cfg.eq_tol, "equilibrium tolerance");
    };

    CLI::App* order = app.add_subcommand("order", "emit the causal ordering graph as DOT");
    add_model(order);
    add_mode(order);
    add_out(order);
    order->add_flag("--oriented", oriented, "emit the matching-oriented bipartite graph");
    order->add_option("--format", format)->check(CLI::IsMember({"dot"}));

    CLI::App* markov = app.add_subcommand("markov", "emit the Markov ordering graph as DOT");
    add_model(markov);
    add_mode(markov);
    add_out(markov);
    markov->add_option("--format", format)->check(CLI::IsMember({"dot"}));

    CLI::App* dsep = app.add_subcommand("dsep", "d-separation query on the Markov ordering graph");
    add_model(dsep);
    add_mode(dsep);
    dsep->add_option("--a", a_arg, "first vertex set (comma separated)")->required();
    dsep->add_option("--b", b_arg, "second vertex set")->required();
    dsep->add_option("--given", given_arg, "conditioning set");

    CLI::App* indep = app.add_subcommand("indep-table",
                                         "implied (in)dependences over a vertex subset");
    add_model(indep);
    add_mode(indep);
    add_out(indep);
    indep->add_option("--vars", vars_arg, "vertices (default: inputs + endogenous)");
    indep->add_option("--max-cond", max_cond, "largest conditioning set");
    indep->add_option("--format", format)->check(CLI::IsMember({"csv"}));

    CLI::App* adapt = app.add_subcommand("adapt", "identify perfectly adapting variables");
    add_model(adapt);
    adapt->add_option("--input", input_arg, "input signal name")->required();
    add_out(adapt);

    double sim_horizon = 100.0;
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the dynamics, write a trace");
    add_model(simulate);
    add_out(simulate);
    simulate->add_option("--dt", cfg.dt, "integration step");
    simulate->add_option("--t-max", sim_horizon, "integration horizon");
    simulate->add_option("--x0", x0_arg, "initial state overrides var=val[,var=val]");

    CLI::App* step = app.add_subcommand("step", "input step-change experiment");
    add_model(step);
    add_sim(step);
    add_out(step);
    step->add_option("--input", input_arg, "input signal name")->required();
    step->add_option("--pre", pre, "pre-switch value")->required();
    step->add_option("--post", post, "post-switch value")->required();

    CLI::App* intervene = app.add_subcommand("intervene", "soft intervention experiment");
    add_model(intervene);
    add_sim(intervene);
    add_out(intervene);
    intervene->add_option("--param", param_arg, "constant or exogenous symbol")->required();
    intervene->add_option("--pre", pre, "pre-switch value")->required();
    intervene->add_option("--post", post, "post-switch value")->required();

    CLI::App* sample = app.add_subcommand("sample", "sample equilibria over exogenous noise");
    add_model(sample);
    add_sim(sample);
    add_out(sample);
    sample->add_option("--n", n_samples, "sample count");
    sample->add_option("--seed", seed, "PRNG seed");
    sample->add_option("--override", override_specs,
                       "distribution override [col=]sym~uniform(a,b)|constant(c)");

    CLI::App* lcd_cmd = app.add_subcommand("lcd", "local causal discovery on a dataset");
    lcd_cmd->add_option("--data", data_path, "dataset CSV")->required();
    lcd_cmd->add_option("--context", context_arg, "context column")->required();
    lcd_cmd->add_option("--candidates", candidates_arg, "candidate columns")->required();
    lcd_cmd->add_option("--alpha", alpha, "test level");
    add_out(lcd_cmd);

    CLI::App* detect = app.add_subcommand("detect", "perfect-adaptation detection verdict");
    add_model(detect);
    detect->add_option("--equation", equation_arg, "graph-side: target equilibrium equation");
    detect->add_option("--target", target_arg, "data-side: target variable");
    detect->add_option("--baseline", baseline_path, "data-side: baseline dataset CSV");
    detect->add_option("--intervened", intervened_path, "data-side: intervened dataset CSV");
    detect->add_option("--alpha", alpha, "test level");
    add_out(detect);

    std::reverse(args.begin(), args.end()); // CLI11 vector parse order
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 1;
    }

    detail2::Output output{out, out_path, {}};
    try {
        if (order->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            BipartiteSystem b = detail2::bipartite_for_mode(m, mode);
            if (oriented) {
                Matching match = perfect_matching(b);
                output.stream() << to_dot(b, orient(b, match), m.name + "_" + mode + "_oriented");
            } else {
                CausalOrderingGraph cog = causal_ordering(b);
                output.stream() << to_dot(cog, m.name + "_" + mode + "_causal_ordering");
            }
        } else if (markov->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            CausalOrderingGraph cog = causal_ordering(detail2::bipartite_for_mode(m, mode));
            output.stream() << to_dot(markov_ordering(cog), m.name + "_" + mode + "_markov_ordering");
        } else if (dsep->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            CausalOrderingGraph cog = causal_ordering(detail2::bipartite_for_mode(m, mode));
            SeparationQuery q{detail2::split_csv_list(a_arg), detail2::split_csv_list(b_arg),
                              detail2::split_csv_list(given_arg)};
            out << (d_separated(markov_ordering(cog), q) ? "separated" : "connected") << "\n";
        } else if (indep->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            CausalOrderingGraph cog = causal_ordering(detail2::bipartite_for_mode(m, mode));
            MarkovOrderingGraph mog = markov_ordering(cog);
            std::vector<std::string> vars = detail2::split_csv_list(vars_arg);
            if (vars.empty()) {
                for (const auto& [n, v] : m.inputs) vars.push_back(n);
                for (const auto& v : m.variables) vars.push_back(var_vertex_name(v));
            }
            auto& os = output.stream();
            os << "a,b,given,separated\n";
            for (const auto& row : implied_independences(mog, vars, max_cond)) {
                os << row.a << "," << row.b << ",";
                for (size_t i = 0; i < row.z.size(); ++i) os << (i ? ";" : "") << row.z[i];
                os << "," << (row.separated ? "yes" : "no") << "\n";
            }
        } else if (adapt->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            AdaptationReport rep = adapting_variables(m, input_arg);
            auto& os = output.stream();
            auto contains = [](const std::vector<std::string>& v, const std::string& x) {
                return std::find(v.begin(), v.end(), x) != v.end();
            };
            os << "variable,transient,equilibrium,adapting\n";
            for (const auto& v : m.variables)
                os << v << "," << (contains(rep.transient_reachable, v) ? "yes" : "no") << ","
                   << (contains(rep.equilibrium_reachable, v) ? "yes" : "no") << ","
                   << (contains(rep.adapting, v) ? "yes" : "no") << "\n";
        } else if (simulate->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            Simulator sim(m);
            std::vector<double> x0 = sim.initial_state();
            for (const auto& kv : detail2::split_csv_list(x0_arg)) {
                size_t eq = kv.find('=');
                if (eq == std::string::npos) throw Error("bad --x0 entry '" + kv + "'");
                int vi = m.var_index(adaptscan::detail::strip(kv.substr(0, eq)));
                if (vi < 0) throw UnknownSymbolError(kv.substr(0, eq));
                x0[vi] = std::stod(kv.substr(eq + 1));
            }
            SimConfig run_cfg = cfg;
            run_cfg.t_max = sim_horizon;
            Trace tr = sim.integrate(default_bindings(m), x0, sim.default_inputs(), run_cfg);
            write_csv(tr, output.stream());
        } else if (step->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            Simulator sim(m);
            ExperimentResult res = sim.step_response(default_bindings(m), input_arg, pre, post, cfg);
            for (const auto& w : res.warnings) err << "warning: " << w << "\n";
            detail2::print_report(output.stream(), res);
        } else if (intervene->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            Simulator sim(m);
            ExperimentResult res = sim.soft_intervention(default_bindings(m), param_arg, pre, post, cfg);
            for (const auto& w : res.warnings) err << "warning: " << w << "\n";
            detail2::print_report(output.stream(), res);
        } else if (sample->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            std::vector<SampleOverride> overrides;
            for (const auto& spec : override_specs)
                overrides.push_back(detail2::parse_override(spec));
            Dataset ds = sample_equilibria(m, n_samples, seed, cfg, overrides);
            write_csv(ds, output.stream());
        } else if (lcd_cmd->parsed()) {
            Dataset ds = read_csv_file(data_path);
            LcdResult res = lcd(ds, context_arg, detail2::split_csv_list(candidates_arg), alpha);
            auto& os = output.stream();
            os << "context,x,y,rho_cx,p_cx,rho_xy,p_xy,rho_cy_given_x,p_cy_given_x\n";
            char buf[40];
            auto num = [&](double v) {
                std::snprintf(buf, sizeof(buf), "%.6g", v);
                return std::string(buf);
            };
            for (const auto& t : res.triples)
                os << t.context << "," << t.x << "," << t.y << "," << num(t.cx.rho) << ","
                   << num(t.cx.p) << "," << num(t.xy.rho) << "," << num(t.xy.p) << ","
                   << num(t.cy_x.rho) << "," << num(t.cy_x.p) << "\n";
            for (const auto& s : res.skipped)
                err << "skipped pair (" << s.x << ", " << s.y << "): " << s.reason << "\n";
        } else if (detect->parsed()) {
            ModelSpec m = detail2::load_model(model_path);
            CausalOrderingGraph cog = causal_ordering(build_bipartite(m, equilibrium_system(m)));
            MarkovOrderingGraph mog = markov_ordering(cog);
            if (!equation_arg.empty()) {
                detail2::print_verdict(output.stream(),
                                       detect_adaptation_graphside(cog, mog, equation_arg));
            } else if (!target_arg.empty()) {
                if (baseline_path.empty() || intervened_path.empty())
                    throw Error("data-side detection needs --baseline and --intervened");
                DetectionVerdict v = detect_adaptation_from_data(
                    read_csv_file(baseline_path), read_csv_file(intervened_path), target_arg,
                    mog, alpha);
                detail2::print_verdict(output.stream(), v);
            } else {
                throw Error("detect needs --equation (graph side) or --target with datasets");
            }
        }
    } catch (const NoConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SamplingError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const NonFiniteStateError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const MatchingError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace cli
} // namespace adaptscan
