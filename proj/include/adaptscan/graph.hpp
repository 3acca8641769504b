#pragma once

#include "adaptscan/model.hpp"

#include <deque>

namespace adaptscan {

/// Undirected bipartite structure of an equation system: variable vertices,
/// equation vertices, incidence edges, and the exogenous/input symbols
/// attached to each equation.
struct BipartiteSystem {
    std::vector<std::string> raw_var_names; // declared names (X_I, ...)
    std::vector<std::string> var_names;     // vertex names (v_I, ...)
    std::vector<std::string> eq_labels;
    std::vector<std::vector<int>> eq_vars; // per equation, ascending variable indices
    std::vector<std::vector<int>> var_eqs; // derived adjacency
    std::vector<int> natural_var;          // per equation, -1 for statics

    struct Attachment {
        std::string name;
        bool is_input;
        std::vector<int> eqs;
    };
    std::vector<Attachment> attachments; // exogenous first, then inputs, declaration order

    int n_vars() const { return static_cast<int>(var_names.size()); }
    int n_eqs() const { return static_cast<int>(eq_labels.size()); }

    int var_index(const std::string& vertex) const {
        for (int i = 0; i < n_vars(); ++i)
            if (var_names[i] == vertex || raw_var_names[i] == vertex) return i;
        return -1;
    }
    int eq_index(const std::string& label) const {
        for (int i = 0; i < n_eqs(); ++i)
            if (eq_labels[i] == label) return i;
        return -1;
    }
    bool has_edge(int v, int e) const {
        return std::binary_search(eq_vars[e].begin(), eq_vars[e].end(), v);
    }
};

/// Builds the bipartite graph of a system. Rejects equations with no
/// endogenous incidence (they cannot take part in a matching).
inline BipartiteSystem build_bipartite(const ModelSpec& m, const EquationSystem& sys) {
    BipartiteSystem b;
    b.raw_var_names = m.variables;
    for (const auto& v : m.variables) b.var_names.push_back(var_vertex_name(v));
    b.var_eqs.resize(m.variables.size());
    for (const auto& eq : sys.equations) {
        if (eq.incidence.empty()) throw DegenerateEquationError(eq.label);
        int ei = b.n_eqs();
        b.eq_labels.push_back(eq.label);
        b.eq_vars.push_back(eq.incidence);
        b.natural_var.push_back(eq.natural_var);
        for (int v : eq.incidence) b.var_eqs[v].push_back(ei);
    }
    auto attach = [&](const std::string& name, bool is_input) {
        BipartiteSystem::Attachment a{name, is_input, {}};
        for (int e = 0; e < b.n_eqs(); ++e) {
            std::set<std::string> syms;
            collect_symbols(sys.equations[e].residual, syms);
            if (syms.count(name)) a.eqs.push_back(e);
        }
        b.attachments.push_back(std::move(a));
    };
    for (const auto& e : m.exogenous) attach(e.name, false);
    for (const auto& [n, v] : m.inputs) attach(n, true);
    return b;
}

/// Perfect matching between equations and variables, stored both ways.
struct Matching {
    std::vector<int> var_of_eq;
    std::vector<int> eq_of_var;
};

namespace detail {

/// Deterministic Hopcroft–Karp from the equation side; ties broken by lowest
/// vertex index. Returns the matching arrays (-1 for unmatched).
struct HopcroftKarp {
    const BipartiteSystem& b;
    std::vector<int> var_of_eq, eq_of_var, dist;

    explicit HopcroftKarp(const BipartiteSystem& b_)
        : b(b_), var_of_eq(b_.n_eqs(), -1), eq_of_var(b_.n_vars(), -1),
          dist(b_.n_eqs(), -1) {}

    bool bfs() {
        std::deque<int> q;
        bool found = false;
        for (int e = 0; e < b.n_eqs(); ++e) {
            dist[e] = var_of_eq[e] < 0 ? 0 : -1;
            if (dist[e] == 0) q.push_back(e);
        }
        while (!q.empty()) {
            int e = q.front();
            q.pop_front();
            for (int v : b.eq_vars[e]) {
                int e2 = eq_of_var[v];
                if (e2 < 0)
                    found = true;
                else if (dist[e2] < 0) {
                    dist[e2] = dist[e] + 1;
                    q.push_back(e2);
                }
            }
        }
        return found;
    }

    bool dfs(int e) {
        for (int v : b.eq_vars[e]) {
            int e2 = eq_of_var[v];
            if (e2 < 0 || (dist[e2] == dist[e] + 1 && dfs(e2))) {
                var_of_eq[e] = v;
                eq_of_var[v] = e;
                return true;
            }
        }
        dist[e] = -1;
        return false;
    }

    int run() {
        int size = 0;
        while (bfs())
            for (int e = 0; e < b.n_eqs(); ++e)
                if (var_of_eq[e] < 0 && dfs(e)) ++size;
        return size;
    }
};

/// König-style Hall violator on the equation side: equations alternating-
/// reachable from some unmatched equation. Empty when every equation is
/// matched (then only variables are uncovered and no equation-side
/// certificate exists).
inline std::vector<std::string> hall_witness(const BipartiteSystem& b,
                                             const std::vector<int>& var_of_eq,
                                             const std::vector<int>& eq_of_var) {
    std::vector<bool> eq_seen(b.n_eqs(), false), var_seen(b.n_vars(), false);
    std::deque<int> q;
    for (int e = 0; e < b.n_eqs(); ++e)
        if (var_of_eq[e] < 0) {
            eq_seen[e] = true;
            q.push_back(e);
        }
    if (q.empty()) return {};
    while (!q.empty()) {
        int e = q.front();
        q.pop_front();
        for (int v : b.eq_vars[e]) {
            if (var_seen[v]) continue;
            var_seen[v] = true;
            int e2 = eq_of_var[v];
            if (e2 >= 0 && !eq_seen[e2]) {
                eq_seen[e2] = true;
                q.push_back(e2);
            }
        }
    }
    std::vector<std::string> witness;
    for (int e = 0; e < b.n_eqs(); ++e)
        if (eq_seen[e]) witness.push_back(b.eq_labels[e]);
    return witness;
}

} // namespace detail

/// Maximum matching plus the Hall certificate; does not throw.
struct MatchingAnalysis {
    int size = 0;
    Matching matching; // partial when size < n
    std::vector<std::string> witness;
    bool perfect(const BipartiteSystem& b) const {
        return b.n_vars() == b.n_eqs() && size == b.n_eqs();
    }
};

inline MatchingAnalysis analyze_matching(const BipartiteSystem& b) {
    detail::HopcroftKarp hk(b);
    MatchingAnalysis r;
    r.size = hk.run();
    r.matching.var_of_eq = hk.var_of_eq;
    r.matching.eq_of_var = hk.eq_of_var;
    if (r.size < b.n_eqs()) r.witness = detail::hall_witness(b, hk.var_of_eq, hk.eq_of_var);
    return r;
}

/// Perfect matching via Hopcroft-Karp, deterministic given declaration order.
/// Throws MatchingError with a Hall-violator witness when none exists.
inline Matching perfect_matching(const BipartiteSystem& b) {
    MatchingAnalysis a = analyze_matching(b);
    if (b.n_vars() != b.n_eqs())
        throw MatchingError(MatchingError::Kind::SizeMismatch, b.n_vars(), b.n_eqs(), a.size,
                            a.witness);
    if (a.size != b.n_eqs())
        throw MatchingError(MatchingError::Kind::NoPerfectMatching, b.n_vars(), b.n_eqs(),
                            a.size, a.witness);
    return a.matching;
}

inline void validate_matching(const BipartiteSystem& b, const Matching& m) {
    if (static_cast<int>(m.var_of_eq.size()) != b.n_eqs() ||
        static_cast<int>(m.eq_of_var.size()) != b.n_vars())
        throw MatchingError("invalid matching: size mismatch");
    for (int e = 0; e < b.n_eqs(); ++e) {
        int v = m.var_of_eq[e];
        if (v < 0 || v >= b.n_vars() || m.eq_of_var[v] != e || !b.has_edge(v, e))
            throw MatchingError("invalid matching: pair (" + b.eq_labels[e] + ", " +
                                (v >= 0 && v < b.n_vars() ? b.var_names[v] : "?") +
                                ") is not a matched edge");
    }
    for (int v = 0; v < b.n_vars(); ++v)
        if (m.eq_of_var[v] < 0) throw MatchingError("invalid matching: unmatched variable");
}

/// All perfect matchings in deterministic order (equations matched in index
/// order, candidate variables ascending). Guarded against exponential blowup.
inline std::vector<Matching> enumerate_perfect_matchings(const BipartiteSystem& b,
                                                         int limit = 1 << 20) {
    if (b.n_vars() > 12)
        throw TooLargeError("enumerate_perfect_matchings: more than 12 variables");
    std::vector<Matching> out;
    if (b.n_vars() != b.n_eqs()) return out;
    int n = b.n_eqs();
    std::vector<int> var_of_eq(n, -1), eq_of_var(n, -1);
    auto rec = [&](auto&& self, int e) -> bool {
        if (static_cast<int>(out.size()) >= limit) return false;
        if (e == n) {
            out.push_back({var_of_eq, eq_of_var});
            return true;
        }
        for (int v : b.eq_vars[e]) {
            if (eq_of_var[v] >= 0) continue;
            var_of_eq[e] = v;
            eq_of_var[v] = e;
            self(self, e + 1);
            var_of_eq[e] = -1;
            eq_of_var[v] = -1;
            if (static_cast<int>(out.size()) >= limit) return false;
        }
        return true;
    };
    rec(rec, 0);
    return out;
}

} // namespace adaptscan
