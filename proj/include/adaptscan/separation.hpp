#pragma once

#include "adaptscan/ordering.hpp"

#include <deque>

namespace adaptscan {

/// Variable vertices reachable from `source` (a variable vertex, equation
/// label, or exogenous/input name) by a directed path in the cluster-graph
/// sense: cl(x) = cl(y) counts as a path, so the source's own cluster is
/// included.
inline std::vector<std::string> cluster_descendants(const CausalOrderingGraph& cog,
                                                    const std::string& source) {
    int start_cluster;
    if (int v = cog.find_var(source); v >= 0)
        start_cluster = cog.cluster_of_var[v];
    else if (int e = cog.find_eq(source); e >= 0)
        start_cluster = cog.cluster_of_eq[e];
    else if (int a = cog.find_attachment(source); a >= 0)
        start_cluster = cog.cluster_of_attachment[a];
    else
        throw UnknownVertexError(source);

    std::vector<bool> seen(cog.clusters.size(), false);
    std::deque<int> q{start_cluster};
    seen[start_cluster] = true;
    while (!q.empty()) {
        int c = q.front();
        q.pop_front();
        for (int t : cog.cluster_children[c])
            if (!seen[t]) {
                seen[t] = true;
                q.push_back(t);
            }
    }
    std::vector<std::string> out;
    for (size_t c = 0; c < cog.clusters.size(); ++c)
        if (seen[c])
            for (int v : cog.clusters[c].vars) out.push_back(cog.var_names[v]);
    std::sort(out.begin(), out.end());
    return out;
}

struct SeparationQuery {
    std::vector<std::string> a, b, z;
};

namespace detail {

inline std::vector<int> resolve_vertices(const MarkovOrderingGraph& mog,
                                         const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const auto& n : names) {
        int i = mog.index_of(n);
        if (i < 0) throw UnknownVertexError(n);
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

/// Exact d-separation on a DAG, decided by reachability in the moralized
/// ancestral subgraph of A u B u Z.
inline bool d_separated(const MarkovOrderingGraph& mog, const SeparationQuery& q) {
    std::vector<int> a = detail::resolve_vertices(mog, q.a);
    std::vector<int> b = detail::resolve_vertices(mog, q.b);
    std::vector<int> z = detail::resolve_vertices(mog, q.z);
    if (a.empty() || b.empty()) throw Error("query sets A and B must be nonempty");
    auto intersects = [](const std::vector<int>& x, const std::vector<int>& y) {
        for (int v : x)
            if (std::binary_search(y.begin(), y.end(), v)) return true;
        return false;
    };
    if (intersects(a, b) || intersects(a, z) || intersects(b, z))
        throw NonDisjointSetsError();

    int n = mog.n();
    std::vector<bool> ancestral(n, false);
    std::deque<int> q2;
    for (int v : a) q2.push_back(v);
    for (int v : b) q2.push_back(v);
    for (int v : z) q2.push_back(v);
    for (int v : q2) ancestral[v] = true;
    while (!q2.empty()) {
        int v = q2.front();
        q2.pop_front();
        for (int p : mog.parents[v])
            if (!ancestral[p]) {
                ancestral[p] = true;
                q2.push_back(p);
            }
    }

    // Moralize the ancestral subgraph, drop Z, test A-B connectivity.
    std::vector<std::vector<int>> undirected(n);
    auto link = [&](int x, int y) {
        undirected[x].push_back(y);
        undirected[y].push_back(x);
    };
    for (int v = 0; v < n; ++v) {
        if (!ancestral[v]) continue;
        const auto& ps = mog.parents[v];
        for (int p : ps)
            if (ancestral[p]) link(p, v);
        for (size_t i = 0; i < ps.size(); ++i)
            for (size_t j = i + 1; j < ps.size(); ++j)
                if (ancestral[ps[i]] && ancestral[ps[j]]) link(ps[i], ps[j]);
    }
    std::vector<bool> blocked(n, false), reached(n, false);
    for (int v : z) blocked[v] = true;
    std::deque<int> bfs;
    for (int v : a)
        if (!blocked[v]) {
            reached[v] = true;
            bfs.push_back(v);
        }
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (int w : undirected[v])
            if (!reached[w] && !blocked[w]) {
                reached[w] = true;
                bfs.push_back(w);
            }
    }
    for (int v : b)
        if (reached[v]) return false;
    return true;
}

struct IndependenceRow {
    std::string a, b;
    std::vector<std::string> z;
    bool separated;
};

/// All normalized pairs from `vars` with every conditioning subset of the
/// remaining listed vertices up to `max_cond`, each labelled by d-separation.
/// Rows are ordered by pair, then conditioning-set size, then lexicographic
/// subset position.
inline std::vector<IndependenceRow> implied_independences(const MarkovOrderingGraph& mog,
                                                          const std::vector<std::string>& vars,
                                                          int max_cond) {
    if (max_cond > static_cast<int>(vars.size()) - 2)
        throw Error("max_cond exceeds |vars| - 2");
    for (const auto& v : vars)
        if (mog.index_of(v) < 0) throw UnknownVertexError(v);

    std::vector<IndependenceRow> rows;
    int n = static_cast<int>(vars.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::vector<std::string> rest;
            for (int k = 0; k < n; ++k)
                if (k != i && k != j) rest.push_back(vars[k]);
            int r = static_cast<int>(rest.size());
            for (int size = 0; size <= std::min(max_cond, r); ++size) {
                // lexicographic combinations of `rest` of the given size
                std::vector<int> idx(size);
                for (int k = 0; k < size; ++k) idx[k] = k;
                for (;;) {
                    std::vector<std::string> z;
                    for (int k : idx) z.push_back(rest[k]);
                    SeparationQuery q{{vars[i]}, {vars[j]}, z};
                    rows.push_back({vars[i], vars[j], z, d_separated(mog, q)});
                    int k = size - 1;
                    while (k >= 0 && idx[k] == r - size + k) --k;
                    if (k < 0) break;
                    ++idx[k];
                    for (int l = k + 1; l < size; ++l) idx[l] = idx[l - 1] + 1;
                }
            }
        }
    return rows;
}

} // namespace adaptscan
