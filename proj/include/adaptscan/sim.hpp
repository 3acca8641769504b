#pragma once

#include "adaptscan/adaptation.hpp"

#include <functional>

namespace adaptscan {

struct SimConfig {
    double dt = 1e-3;
    double t_max = 1e4;
    double eq_tol = 1e-9;   // equilibrium tolerance on ||dX/dt||_inf
    int eq_sustain = 100;   // consecutive steps below eq_tol required
    int record_stride = 0;  // 0 = choose automatically (~10k rows)
};

/// Time-indexed states from integration. States cover every endogenous
/// variable (statics included), inputs are recorded per time point.
struct Trace {
    std::vector<std::string> var_names;   // raw names, declaration order
    std::vector<std::string> input_names;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> input_values;
};

/// Piecewise-constant input schedule: entry k applies for t >= times[k].
struct InputSchedule {
    std::vector<std::string> names;
    std::vector<double> times;                 // ascending, times[0] <= t0
    std::vector<std::vector<double>> values;   // one vector per switch point

    static InputSchedule constant(const std::vector<std::string>& names,
                                  const std::vector<double>& vals) {
        return {names, {0.0}, {vals}};
    }
    const std::vector<double>& at(double t) const {
        size_t k = 0;
        while (k + 1 < times.size() && times[k + 1] <= t) ++k;
        return values[k];
    }
};

struct EquilibriumResult {
    std::vector<double> state; // full endogenous vector
    double t = 0.0;
    double residual_norm = 0.0;              // ||dX/dt||_inf at the terminal state
    std::vector<double> equilibrium_residuals; // equilibrium-system residuals (with overrides)
    std::vector<std::string> warnings;
};

struct VarDeviation {
    std::string var;
    double pre_eq = 0.0;
    double transient_peak = 0.0;  // max |X(t) - pre_eq|
    double final_value = 0.0;
    double final_deviation = 0.0; // |final - pre_eq|
    double signed_change = 0.0;   // final - pre_eq
};

struct ExperimentResult {
    Trace trace;
    std::vector<double> pre_state;
    std::vector<VarDeviation> report;
    std::vector<std::string> warnings;
};

inline std::map<std::string, double> default_bindings(const ModelSpec& m) {
    std::map<std::string, double> b;
    for (const auto& e : m.exogenous) b[e.name] = e.dist.midpoint();
    for (const auto& [n, v] : m.constants) b[n] = v;
    return b;
}

/// Classical fixed-step RK4 integrator over a compiled model. Static
/// equations define algebraic variables solved by forward substitution along
/// their own dependency order; each must be linear in its solved variable.
class Simulator {
public:
    explicit Simulator(const ModelSpec& m) : model_(m) {
        for (const auto& v : m.variables) slots_.intern(v);
        for (const auto& [n, v] : m.inputs) slots_.intern(n);
        for (const auto& e : m.exogenous) slots_.intern(e.name);
        for (const auto& [n, v] : m.constants) slots_.intern(n);

        for (const auto& d : m.dynamics) {
            dyn_vars_.push_back(m.var_index(d.var));
            dyn_rhs_.push_back(compile_expr(d.rhs, slots_));
        }
        build_static_plan();
        for (const auto& eq : equilibrium_system(m).equations) {
            eq_residuals_.push_back(compile_expr(eq.residual, slots_));
            eq_labels_.push_back(eq.label);
            eq_residual_terms_.push_back(compile_terms(eq.residual));
            eq_overridden_.push_back(m.label_is_overridden(eq.label));
        }
    }

    const ModelSpec& model() const { return model_; }

    std::vector<double> initial_state() const {
        std::vector<double> x0;
        for (const auto& v : model_.variables) x0.push_back(model_.init_of(v));
        return x0;
    }

    /// Integrates over [0, t_max], recording every `stride` steps.
    Trace integrate(const std::map<std::string, double>& bindings,
                    const std::vector<double>& x0, const InputSchedule& inputs,
                    const SimConfig& cfg) const {
        Run run(*this, bindings, x0, inputs, cfg);
        Trace trace = make_trace(inputs);
        long total_steps = static_cast<long>(cfg.t_max / cfg.dt);
        long stride = cfg.record_stride > 0
                          ? cfg.record_stride
                          : std::max<long>(1, total_steps / 10000);
        run.record(trace);
        for (long step = 0; step < total_steps; ++step) {
            run.step();
            if (step % stride == stride - 1 || step == total_steps - 1) run.record(trace);
        }
        return trace;
    }

    /// Integrates until ||dX/dt||_inf stays below eq_tol for eq_sustain
    /// consecutive steps. Throws NoConvergenceError at t_max.
    EquilibriumResult find_equilibrium(const std::map<std::string, double>& bindings,
                                       const std::vector<double>& x0,
                                       const InputSchedule& inputs, const SimConfig& cfg) const {
        Run run(*this, bindings, x0, inputs, cfg);
        run.run_to_equilibrium();
        return run.result(*this);
    }

    EquilibriumResult find_equilibrium(const std::map<std::string, double>& bindings,
                                       const std::vector<double>& x0,
                                       const SimConfig& cfg) const {
        return find_equilibrium(bindings, x0, default_inputs(), cfg);
    }

    /// Equilibrate at `pre_value`, switch the input, integrate to the new
    /// equilibrium; reports each variable's peak and final deviation from the
    /// pre-switch equilibrium.
    ExperimentResult step_response(const std::map<std::string, double>& bindings,
                                   const std::string& input, double pre_value,
                                   double post_value, const SimConfig& cfg) const {
        if (!model_.is_input(input)) throw UnknownParameterError(input);
        std::vector<double> pre = input_defaults();
        set_input(pre, input, pre_value);
        std::vector<double> post = pre;
        set_input(post, input, post_value);
        return two_phase(bindings, bindings, pre, post, cfg);
    }

    /// Same protocol for a parameter (constant or exogenous) switch.
    ExperimentResult soft_intervention(const std::map<std::string, double>& bindings,
                                       const std::string& param, double pre_value,
                                       double post_value, const SimConfig& cfg) const {
        if (!model_.is_constant(param) && !model_.is_exogenous(param))
            throw UnknownParameterError(param);
        auto pre_bindings = bindings;
        pre_bindings[param] = pre_value;
        auto post_bindings = bindings;
        post_bindings[param] = post_value;
        std::vector<double> in = input_defaults();
        return two_phase(pre_bindings, post_bindings, in, in, cfg);
    }

    InputSchedule default_inputs() const {
        return InputSchedule::constant(input_names(), input_defaults());
    }
    std::vector<std::string> input_names() const {
        std::vector<std::string> n;
        for (const auto& [name, v] : model_.inputs) n.push_back(name);
        return n;
    }
    std::vector<double> input_defaults() const {
        std::vector<double> v;
        for (const auto& [name, val] : model_.inputs) v.push_back(val);
        return v;
    }

private:
    struct TermSet {
        std::vector<CompiledExpr> terms; // top-level additive terms, for scale
    };

    void build_static_plan() {
        const auto& m = model_;
        std::vector<int> free_vars; // variables with no dynamics entry
        std::vector<bool> is_dyn(m.variables.size(), false);
        for (int v : dyn_vars_) is_dyn[v] = true;
        for (size_t v = 0; v < m.variables.size(); ++v)
            if (!is_dyn[v]) free_vars.push_back(static_cast<int>(v));
        if (m.statics.size() != free_vars.size())
            throw InconsistentStaticsError(
                std::to_string(m.statics.size()) + " static equations for " +
                std::to_string(free_vars.size()) + " non-dynamic variables");
        if (free_vars.empty()) return;

        // Match statics to the variables they determine.
        BipartiteSystem sb;
        for (int v : free_vars) {
            sb.raw_var_names.push_back(m.variables[v]);
            sb.var_names.push_back(var_vertex_name(m.variables[v]));
        }
        sb.var_eqs.resize(free_vars.size());
        for (const auto& s : m.statics) {
            std::set<std::string> syms;
            collect_symbols(s.residual, syms);
            std::vector<int> inc;
            for (size_t i = 0; i < free_vars.size(); ++i)
                if (syms.count(m.variables[free_vars[i]])) inc.push_back(static_cast<int>(i));
            if (inc.empty())
                throw InconsistentStaticsError("static '" + s.label +
                                               "' constrains no non-dynamic variable");
            sb.eq_labels.push_back(s.label);
            sb.eq_vars.push_back(inc);
            sb.natural_var.push_back(-1);
            for (int v : inc) sb.var_eqs[v].push_back(sb.n_eqs() - 1);
        }
        MatchingAnalysis a = analyze_matching(sb);
        if (a.size != sb.n_eqs())
            throw InconsistentStaticsError("static equations are not matchable to variables");

        // Forward-substitution order: a static is ready once every other
        // non-dynamic variable it mentions has been solved.
        std::vector<bool> solved(free_vars.size(), false);
        std::vector<bool> emitted(m.statics.size(), false);
        for (size_t round = 0; round < m.statics.size(); ++round) {
            bool progress = false;
            for (size_t e = 0; e < m.statics.size(); ++e) {
                if (emitted[e]) continue;
                int target = a.matching.var_of_eq[static_cast<int>(e)];
                bool ready = true;
                for (int v : sb.eq_vars[e])
                    if (v != target && !solved[v]) ready = false;
                if (!ready) continue;
                StaticStep st;
                st.slot = slots_.at(m.variables[free_vars[target]]);
                st.residual = compile_expr(m.statics[e].residual, slots_);
                st.label = m.statics[e].label;
                static_plan_.push_back(std::move(st));
                solved[target] = true;
                emitted[e] = true;
                progress = true;
            }
            if (!progress) break;
        }
        for (bool e : emitted)
            if (!e)
                throw InconsistentStaticsError(
                    "static equations form a cycle; joint solving is unsupported");
    }

    /// Top-level additive terms of an override residual, used to judge
    /// whether a saturation approximation is still in its assumed regime.
    TermSet compile_terms(const Expr& e) const {
        TermSet ts;
        std::function<void(const Expr&)> walk = [&](const Expr& x) {
            if (x.kind == ExprKind::Add || x.kind == ExprKind::Sub) {
                walk(x.args[0]);
                walk(x.args[1]);
            } else if (x.kind == ExprKind::Neg) {
                walk(x.args[0]);
            } else {
                ts.terms.push_back(compile_expr(x, slots_));
            }
        };
        walk(e);
        return ts;
    }

    struct StaticStep {
        int slot;
        CompiledExpr residual;
        std::string label;
    };

    void set_input(std::vector<double>& inputs, const std::string& name, double v) const {
        for (size_t i = 0; i < model_.inputs.size(); ++i)
            if (model_.inputs[i].first == name) {
                inputs[i] = v;
                return;
            }
        throw UnknownParameterError(name);
    }

    Trace make_trace(const InputSchedule& inputs) const {
        Trace t;
        t.var_names = model_.variables;
        t.input_names = inputs.names;
        return t;
    }

    /// One integration run: owns the slot vector and the RK4 workspace.
    struct Run {
        const Simulator& sim;
        const SimConfig& cfg;
        const InputSchedule& inputs;
        std::vector<double> slots;
        std::vector<double> y, k1, k2, k3, k4, ytmp;
        double t = 0.0;
        int sustain = 0;
        double last_norm = 0.0;

        Run(const Simulator& sim_, const std::map<std::string, double>& bindings,
            const std::vector<double>& x0, const InputSchedule& inputs_, const SimConfig& cfg_)
            : sim(sim_), cfg(cfg_), inputs(inputs_), slots(sim_.slots_.names.size(), 0.0) {
            if (sim.dyn_vars_.empty())
                throw NotApplicableError("model '" + sim.model_.name +
                                         "' has no dynamic equations to integrate");
            for (const auto& [n, v] : bindings) {
                auto it = sim.slots_.index.find(n);
                if (it == sim.slots_.index.end()) throw UnknownParameterError(n);
                slots[it->second] = v;
            }
            for (const auto& e : sim.model_.exogenous)
                if (!bindings.count(e.name)) slots[sim.slots_.at(e.name)] = e.dist.midpoint();
            for (const auto& [n, v] : sim.model_.constants)
                if (!bindings.count(n)) slots[sim.slots_.at(n)] = v;
            if (x0.size() != sim.model_.variables.size())
                throw Error("initial state has wrong dimension");
            for (size_t v = 0; v < x0.size(); ++v)
                slots[sim.slots_.at(sim.model_.variables[v])] = x0[v];
            int nd = static_cast<int>(sim.dyn_vars_.size());
            y.resize(nd);
            k1.resize(nd);
            k2.resize(nd);
            k3.resize(nd);
            k4.resize(nd);
            ytmp.resize(nd);
            for (int i = 0; i < nd; ++i) y[i] = slots[sim.dyn_vars_[i]];
            apply_inputs();
            sim.solve_statics(slots);
        }

        void apply_inputs() {
            const auto& vals = inputs.at(t);
            for (size_t i = 0; i < inputs.names.size(); ++i)
                slots[sim.slots_.at(inputs.names[i])] = vals[i];
        }

        void deriv(const std::vector<double>& state, std::vector<double>& out) {
            for (size_t i = 0; i < state.size(); ++i) slots[sim.dyn_vars_[i]] = state[i];
            sim.solve_statics(slots);
            for (size_t i = 0; i < out.size(); ++i) out[i] = sim.dyn_rhs_[i].eval(slots);
        }

        void step() {
            apply_inputs();
            const double dt = cfg.dt;
            deriv(y, k1);
            double norm = 0.0;
            for (double d : k1) norm = std::max(norm, std::abs(d));
            last_norm = norm;
            sustain = norm < cfg.eq_tol ? sustain + 1 : 0;
            for (size_t i = 0; i < y.size(); ++i) ytmp[i] = y[i] + 0.5 * dt * k1[i];
            deriv(ytmp, k2);
            for (size_t i = 0; i < y.size(); ++i) ytmp[i] = y[i] + 0.5 * dt * k2[i];
            deriv(ytmp, k3);
            for (size_t i = 0; i < y.size(); ++i) ytmp[i] = y[i] + dt * k3[i];
            deriv(ytmp, k4);
            for (size_t i = 0; i < y.size(); ++i) {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if (!std::isfinite(y[i])) throw NonFiniteStateError(t);
            }
            t += dt;
        }

        bool converged() const { return sustain >= cfg.eq_sustain; }

        void run_to_equilibrium() {
            long total_steps = static_cast<long>(cfg.t_max / cfg.dt);
            for (long s = 0; s < total_steps; ++s) {
                step();
                if (converged()) return;
            }
            // one final derivative check at the terminal state
            deriv(y, k1);
            double norm = 0.0;
            for (double d : k1) norm = std::max(norm, std::abs(d));
            if (norm < cfg.eq_tol && sustain + 1 >= cfg.eq_sustain) return;
            throw NoConvergenceError(cfg.t_max, norm);
        }

        void sync_slots() {
            for (size_t i = 0; i < y.size(); ++i) slots[sim.dyn_vars_[i]] = y[i];
            sim.solve_statics(slots);
        }

        std::vector<double> full_state() {
            sync_slots();
            std::vector<double> out;
            for (const auto& v : sim.model_.variables) out.push_back(slots[sim.slots_.at(v)]);
            return out;
        }

        void record(Trace& trace) {
            if (!trace.times.empty() && trace.times.back() >= t) return;
            trace.times.push_back(t);
            trace.states.push_back(full_state());
            const auto& vals = inputs.at(t);
            trace.input_values.push_back(vals);
        }

        EquilibriumResult result(const Simulator& s) {
            EquilibriumResult r;
            r.state = full_state();
            r.t = t;
            r.residual_norm = last_norm;
            for (size_t e = 0; e < s.eq_residuals_.size(); ++e) {
                double res = s.eq_residuals_[e].eval(slots);
                r.equilibrium_residuals.push_back(res);
                if (!s.eq_overridden_[e]) continue;
                double scale = 0.0;
                for (const auto& term : s.eq_residual_terms_[e].terms)
                    scale = std::max(scale, std::abs(term.eval(slots)));
                if (scale > 0 && std::abs(res) > 0.1 * scale)
                    r.warnings.push_back("saturation approximation for '" + s.eq_labels_[e] +
                                         "' is off by " +
                                         std::to_string(std::abs(res) / scale) +
                                         " of its leading term");
            }
            return r;
        }
    };

    ExperimentResult two_phase(const std::map<std::string, double>& pre_bindings,
                               const std::map<std::string, double>& post_bindings,
                               const std::vector<double>& pre_inputs,
                               const std::vector<double>& post_inputs,
                               const SimConfig& cfg) const {
        InputSchedule pre_sched = InputSchedule::constant(input_names(), pre_inputs);
        EquilibriumResult pre =
            find_equilibrium(pre_bindings, initial_state(), pre_sched, cfg);

        InputSchedule post_sched = InputSchedule::constant(input_names(), post_inputs);
        Run run(*this, post_bindings, pre.state, post_sched, cfg);
        ExperimentResult res;
        res.pre_state = pre.state;
        res.trace = make_trace(post_sched);
        res.warnings = pre.warnings;

        size_t nv = model_.variables.size();
        std::vector<double> peak(nv, 0.0);
        long total_steps = static_cast<long>(cfg.t_max / cfg.dt);
        long stride = cfg.record_stride > 0 ? cfg.record_stride
                                            : std::max<long>(1, total_steps / 10000);
        run.record(res.trace);
        bool done = false;
        for (long s = 0; s < total_steps && !done; ++s) {
            run.step();
            std::vector<double> full = run.full_state();
            for (size_t v = 0; v < nv; ++v)
                peak[v] = std::max(peak[v], std::abs(full[v] - pre.state[v]));
            if (s % stride == stride - 1) run.record(res.trace);
            done = run.converged();
        }
        if (!done) throw NoConvergenceError(cfg.t_max, run.last_norm);
        run.record(res.trace);
        EquilibriumResult post = run.result(*this);
        for (const auto& w : post.warnings) res.warnings.push_back(w);
        for (size_t v = 0; v < nv; ++v) {
            VarDeviation d;
            d.var = model_.variables[v];
            d.pre_eq = pre.state[v];
            d.transient_peak = peak[v];
            d.final_value = post.state[v];
            d.signed_change = post.state[v] - pre.state[v];
            d.final_deviation = std::abs(d.signed_change);
            res.report.push_back(d);
        }
        return res;
    }

    void solve_statics(std::vector<double>& slots) const {
        for (const auto& st : static_plan_) {
            slots[st.slot] = 0.0;
            double r0 = st.residual.eval(slots);
            slots[st.slot] = 1.0;
            double r1 = st.residual.eval(slots);
            double a = r1 - r0;
            if (std::abs(a) < 1e-300)
                throw InconsistentStaticsError("static '" + st.label +
                                               "' has zero coefficient on its variable");
            slots[st.slot] = -r0 / a;
        }
    }

    ModelSpec model_;
    SlotMap slots_;
    std::vector<int> dyn_vars_; // slot index of each dynamic variable
    std::vector<CompiledExpr> dyn_rhs_;
    std::vector<StaticStep> static_plan_;
    std::vector<CompiledExpr> eq_residuals_;
    std::vector<std::string> eq_labels_;
    std::vector<TermSet> eq_residual_terms_;
    std::vector<bool> eq_overridden_;
};

} // namespace adaptscan
