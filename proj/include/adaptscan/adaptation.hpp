#pragma once

#include "adaptscan/separation.hpp"

namespace adaptscan {

/// Per-input adaptation report: variables reachable from the input in the
/// dynamic vs. equilibrium causal ordering graphs, and their difference (the
/// variables identified as perfectly adapting). Relies on the transient-
/// response assumption: a directed path in the dynamic graph is taken to
/// produce an actual transient response.
struct AdaptationReport {
    std::string input;
    std::vector<std::string> transient_reachable;   // raw variable names, declaration order
    std::vector<std::string> equilibrium_reachable;
    std::vector<std::string> adapting;
    bool natural_matching_ok = false;
};

struct DetectionVerdict {
    std::string target_equation;
    bool condition1 = false;
    bool condition2 = false;
    std::vector<std::string> witnesses; // non-descendants whose distribution shifts
    bool adaptation_detected() const { return condition1 || condition2; }
};

/// Perfect matching that fixes every (v_i, g_i) pair and completes over the
/// static equations and remaining variables.
inline Matching natural_matching(const BipartiteSystem& dyn) {
    if (dyn.n_vars() != dyn.n_eqs())
        throw MatchingError(MatchingError::Kind::SizeMismatch, dyn.n_vars(), dyn.n_eqs(), 0,
                            {});
    int n = dyn.n_eqs();
    Matching m;
    m.var_of_eq.assign(n, -1);
    m.eq_of_var.assign(n, -1);
    for (int e = 0; e < n; ++e) {
        int v = dyn.natural_var[e];
        if (v >= 0) {
            m.var_of_eq[e] = v;
            m.eq_of_var[v] = e;
        }
    }
    // Residual bipartite problem over static equations and unforced variables.
    BipartiteSystem residual;
    std::vector<int> eq_ids, var_ids;
    std::vector<int> var_pos(n, -1);
    for (int v = 0; v < n; ++v)
        if (m.eq_of_var[v] < 0) {
            var_pos[v] = static_cast<int>(var_ids.size());
            var_ids.push_back(v);
            residual.raw_var_names.push_back(dyn.raw_var_names[v]);
            residual.var_names.push_back(dyn.var_names[v]);
        }
    residual.var_eqs.resize(var_ids.size());
    for (int e = 0; e < n; ++e) {
        if (m.var_of_eq[e] >= 0) continue;
        eq_ids.push_back(e);
        std::vector<int> vars;
        for (int v : dyn.eq_vars[e])
            if (var_pos[v] >= 0) vars.push_back(var_pos[v]);
        residual.eq_labels.push_back(dyn.eq_labels[e]);
        residual.eq_vars.push_back(vars);
        residual.natural_var.push_back(-1);
        for (int v : vars) residual.var_eqs[v].push_back(residual.n_eqs() - 1);
    }
    if (!eq_ids.empty()) {
        for (const auto& ev : residual.eq_vars)
            if (ev.empty()) throw NoNaturalExtensionError();
        MatchingAnalysis a = analyze_matching(residual);
        if (a.size != residual.n_eqs()) throw NoNaturalExtensionError();
        for (size_t i = 0; i < eq_ids.size(); ++i) {
            int v = var_ids[a.matching.var_of_eq[static_cast<int>(i)]];
            m.var_of_eq[eq_ids[i]] = v;
            m.eq_of_var[v] = eq_ids[i];
        }
    }
    validate_matching(dyn, m);
    return m;
}

/// Variables with a directed path from the input's singleton cluster,
/// returned as vertex names.
inline std::vector<std::string> input_reachability(const CausalOrderingGraph& cog,
                                                   const std::string& input) {
    int a = cog.find_attachment(input);
    if (a < 0 || !cog.attachments[a].is_input) throw UnknownVertexError(input);
    return cluster_descendants(cog, input);
}

/// Set of equilibrium variables generically affected by a soft intervention
/// on `eq` (vertex names).
inline std::vector<std::string> soft_intervention_effects(const CausalOrderingGraph& cog,
                                                          const std::string& eq) {
    if (cog.find_eq(eq) < 0) throw UnknownVertexError(eq);
    return cluster_descendants(cog, eq);
}

namespace detail {

/// Vertex-name set -> raw variable names in declaration order.
inline std::vector<std::string> to_raw_vars(const CausalOrderingGraph& cog,
                                            const std::vector<std::string>& vertex_names) {
    std::vector<std::string> out;
    for (size_t v = 0; v < cog.var_names.size(); ++v)
        if (std::find(vertex_names.begin(), vertex_names.end(), cog.var_names[v]) !=
            vertex_names.end())
            out.push_back(cog.raw_var_names[v]);
    return out;
}

} // namespace detail

/// Graphical identification of perfect adaptation: variables reachable from
/// the input in the dynamic causal ordering graph but not in the equilibrium
/// one.
inline AdaptationReport adapting_variables(const ModelSpec& m, const std::string& input) {
    if (!m.is_input(input)) throw UnknownVertexError(input);
    if (m.dynamics.empty())
        throw NotApplicableError("model '" + m.name +
                                 "' has no dynamic equations; transient analysis undefined");

    BipartiteSystem eq_b = build_bipartite(m, equilibrium_system(m));
    MatchingAnalysis eq_a = analyze_matching(eq_b);
    if (eq_b.n_vars() != eq_b.n_eqs() || eq_a.size != eq_b.n_eqs()) {
        MatchingError err(eq_b.n_vars() != eq_b.n_eqs()
                              ? MatchingError::Kind::SizeMismatch
                              : MatchingError::Kind::NoPerfectMatching,
                          eq_b.n_vars(), eq_b.n_eqs(), eq_a.size, eq_a.witness);
        throw NotApplicableError(std::string("equilibrium system: ") + err.what());
    }

    BipartiteSystem dyn_b = build_bipartite(m, dynamic_system(m));
    Matching nat = natural_matching(dyn_b); // throws when no natural extension

    CausalOrderingGraph dyn_cog = causal_ordering_with(dyn_b, nat);
    CausalOrderingGraph eq_cog = causal_ordering_with(eq_b, eq_a.matching);

    AdaptationReport rep;
    rep.input = input;
    rep.natural_matching_ok = true;
    std::vector<std::string> trans = input_reachability(dyn_cog, input);
    std::vector<std::string> equil = input_reachability(eq_cog, input);
    rep.transient_reachable = detail::to_raw_vars(dyn_cog, trans);
    rep.equilibrium_reachable = detail::to_raw_vars(eq_cog, equil);
    for (const auto& v : rep.transient_reachable)
        if (std::find(rep.equilibrium_reachable.begin(), rep.equilibrium_reachable.end(), v) ==
            rep.equilibrium_reachable.end())
            rep.adapting.push_back(v);
    return rep;
}

/// Graph-side detection: condition 1 holds when the soft intervention on f_i
/// cannot reach v_i; condition 2 when it reaches some variable that is not a
/// descendant of v_i in the Markov ordering graph (those are the witnesses).
inline DetectionVerdict detect_adaptation_graphside(const CausalOrderingGraph& cog,
                                                    const MarkovOrderingGraph& mog,
                                                    const std::string& target_eq) {
    int e = cog.find_eq(target_eq);
    if (e < 0) throw UnknownVertexError(target_eq);
    int vi = cog.natural_var[e];
    if (vi < 0) throw NoNaturalCounterpartError(target_eq);

    std::vector<std::string> effects = soft_intervention_effects(cog, target_eq);
    const std::string& vname = cog.var_names[vi];

    DetectionVerdict verdict;
    verdict.target_equation = target_eq;
    verdict.condition1 =
        std::find(effects.begin(), effects.end(), vname) == effects.end();

    // Descendants of v_i in the Markov ordering graph (including v_i).
    int vi_mog = mog.index_of(vname);
    std::vector<bool> desc(mog.n(), false);
    std::deque<int> q{vi_mog};
    desc[vi_mog] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : mog.children[v])
            if (!desc[w]) {
                desc[w] = true;
                q.push_back(w);
            }
    }
    for (const auto& eff : effects) {
        int idx = mog.index_of(eff);
        if (idx >= 0 && !desc[idx]) verdict.witnesses.push_back(eff);
    }
    verdict.condition2 = !verdict.witnesses.empty();
    return verdict;
}

} // namespace adaptscan
