#pragma once

#include "adaptscan/graph.hpp"

namespace adaptscan {

/// Directed bipartite graph over combined vertex ids: variables are
/// 0..nv-1, equations nv..nv+ne-1. Matched edges point equation -> variable,
/// unmatched edges variable -> equation.
struct OrientedGraph {
    int n_vars = 0, n_eqs = 0;
    std::vector<std::vector<int>> out; // size n_vars + n_eqs

    int eq_vertex(int e) const { return n_vars + e; }
};

inline OrientedGraph orient(const BipartiteSystem& b, const Matching& m) {
    validate_matching(b, m);
    OrientedGraph g;
    g.n_vars = b.n_vars();
    g.n_eqs = b.n_eqs();
    g.out.assign(g.n_vars + g.n_eqs, {});
    for (int e = 0; e < b.n_eqs(); ++e)
        for (int v : b.eq_vars[e]) {
            if (m.var_of_eq[e] == v)
                g.out[g.eq_vertex(e)].push_back(v);
            else
                g.out[v].push_back(g.eq_vertex(e));
        }
    return g;
}

/// Iterative Tarjan. Components come out in reverse-topological discovery
/// order (a component is emitted only after everything it reaches),
/// deterministic for a fixed adjacency order.
inline std::vector<std::vector<int>> tarjan_scc(const std::vector<std::vector<int>>& adj) {
    int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    struct Frame {
        int v;
        size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.child < adj[f.v].size()) {
                int w = adj[f.v][f.child++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    std::vector<int> comp;
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    std::sort(comp.begin(), comp.end());
                    comps.push_back(std::move(comp));
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return comps;
}

/// Directed cluster graph produced by the causal ordering algorithm:
/// a partition of V u F into clusters S u M(S), plus singleton clusters for
/// exogenous variables and input signals, with edges from vertices to
/// clusters they feed into.
struct CausalOrderingGraph {
    enum class SourceKind { Var, Exogenous, Input };

    struct Cluster {
        std::vector<int> vars; // ascending variable indices; empty for singletons
        std::vector<int> eqs;  // ascending equation indices
        int attachment = -1;   // index into `attachments` for singleton clusters
    };
    struct Edge {
        SourceKind kind;
        int source;      // variable index, or attachment index
        int target;      // cluster index
        bool operator==(const Edge& o) const {
            return kind == o.kind && source == o.source && target == o.target;
        }
    };

    std::vector<std::string> raw_var_names, var_names, eq_labels;
    std::vector<BipartiteSystem::Attachment> attachments;
    std::vector<int> natural_var;

    std::vector<Cluster> clusters; // block clusters first, then exogenous/input singletons
    std::vector<int> cluster_of_var, cluster_of_eq, cluster_of_attachment;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> cluster_children; // quotient adjacency, deduplicated

    int n_block_clusters = 0;

    int find_var(const std::string& name) const {
        for (size_t i = 0; i < var_names.size(); ++i)
            if (var_names[i] == name || raw_var_names[i] == name) return static_cast<int>(i);
        return -1;
    }
    int find_eq(const std::string& label) const {
        for (size_t i = 0; i < eq_labels.size(); ++i)
            if (eq_labels[i] == label) return static_cast<int>(i);
        return -1;
    }
    int find_attachment(const std::string& name) const {
        for (size_t i = 0; i < attachments.size(); ++i)
            if (attachments[i].name == name) return static_cast<int>(i);
        return -1;
    }

    bool structurally_equal(const CausalOrderingGraph& o) const {
        if (var_names != o.var_names || eq_labels != o.eq_labels) return false;
        if (clusters.size() != o.clusters.size() || edges.size() != o.edges.size()) return false;
        for (size_t i = 0; i < clusters.size(); ++i)
            if (clusters[i].vars != o.clusters[i].vars || clusters[i].eqs != o.clusters[i].eqs ||
                clusters[i].attachment != o.clusters[i].attachment)
                return false;
        for (size_t i = 0; i < edges.size(); ++i)
            if (!(edges[i] == o.edges[i])) return false;
        return true;
    }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace detail

/// Causal ordering with an explicitly supplied perfect matching. The output
/// is independent of which perfect matching is chosen.
inline CausalOrderingGraph causal_ordering_with(const BipartiteSystem& b, const Matching& m) {
    OrientedGraph g = orient(b, m);
    auto sccs = tarjan_scc(g.out);

    // Clusters are S u M(S): merge each SCC and each matched pair.
    detail::UnionFind uf(g.n_vars + g.n_eqs);
    for (const auto& comp : sccs)
        for (size_t i = 1; i < comp.size(); ++i) uf.unite(comp[0], comp[i]);
    for (int e = 0; e < b.n_eqs(); ++e) uf.unite(m.var_of_eq[e], g.eq_vertex(e));

    CausalOrderingGraph cog;
    cog.raw_var_names = b.raw_var_names;
    cog.var_names = b.var_names;
    cog.eq_labels = b.eq_labels;
    cog.attachments = b.attachments;
    cog.natural_var = b.natural_var;
    cog.cluster_of_var.assign(b.n_vars(), -1);
    cog.cluster_of_eq.assign(b.n_eqs(), -1);

    // Deterministic cluster order: by smallest member variable index.
    std::vector<int> root_of_var(b.n_vars());
    std::map<int, int> cluster_of_root;
    for (int v = 0; v < b.n_vars(); ++v) {
        int r = uf.find(v);
        root_of_var[v] = r;
        if (!cluster_of_root.count(r)) {
            int id = static_cast<int>(cog.clusters.size());
            cluster_of_root[r] = id;
            cog.clusters.push_back({});
        }
    }
    // Roots are minima of their set, and every cluster contains a variable,
    // so iterating variables ascending assigns ids by smallest variable.
    for (int v = 0; v < b.n_vars(); ++v) {
        int c = cluster_of_root.at(root_of_var[v]);
        cog.clusters[c].vars.push_back(v);
        cog.cluster_of_var[v] = c;
    }
    for (int e = 0; e < b.n_eqs(); ++e) {
        int c = cluster_of_root.at(uf.find(g.eq_vertex(e)));
        cog.clusters[c].eqs.push_back(e);
        cog.cluster_of_eq[e] = c;
    }
    cog.n_block_clusters = static_cast<int>(cog.clusters.size());

    // Cluster balance invariant: |vars| == |eqs| within every block cluster.
    for (const auto& c : cog.clusters)
        if (c.vars.size() != c.eqs.size())
            throw Error("internal: unbalanced cluster in causal ordering");

    // Inter-cluster edges from unmatched (v -> f) arcs with v outside cl(f).
    for (int v = 0; v < b.n_vars(); ++v)
        for (int ei : b.var_eqs[v]) {
            if (m.var_of_eq[ei] == v) continue;
            int target = cog.cluster_of_eq[ei];
            if (target == cog.cluster_of_var[v]) continue;
            CausalOrderingGraph::Edge edge{CausalOrderingGraph::SourceKind::Var, v, target};
            if (std::find(cog.edges.begin(), cog.edges.end(), edge) == cog.edges.end())
                cog.edges.push_back(edge);
        }

    // Exogenous and input symbols become singleton clusters with edges
    // toward the clusters of the equations they appear in.
    cog.cluster_of_attachment.assign(b.attachments.size(), -1);
    for (size_t a = 0; a < b.attachments.size(); ++a) {
        int id = static_cast<int>(cog.clusters.size());
        CausalOrderingGraph::Cluster c;
        c.attachment = static_cast<int>(a);
        cog.clusters.push_back(c);
        cog.cluster_of_attachment[a] = id;
        auto kind = b.attachments[a].is_input ? CausalOrderingGraph::SourceKind::Input
                                              : CausalOrderingGraph::SourceKind::Exogenous;
        for (int ei : b.attachments[a].eqs) {
            CausalOrderingGraph::Edge edge{kind, static_cast<int>(a), cog.cluster_of_eq[ei]};
            if (std::find(cog.edges.begin(), cog.edges.end(), edge) == cog.edges.end())
                cog.edges.push_back(edge);
        }
    }

    // Deterministic edge order: variable sources by index, then attachments,
    // then by target cluster.
    std::sort(cog.edges.begin(), cog.edges.end(),
              [](const CausalOrderingGraph::Edge& a, const CausalOrderingGraph::Edge& b2) {
                  bool av = a.kind == CausalOrderingGraph::SourceKind::Var;
                  bool bv = b2.kind == CausalOrderingGraph::SourceKind::Var;
                  if (av != bv) return av;
                  if (a.source != b2.source) return a.source < b2.source;
                  return a.target < b2.target;
              });

    // Quotient adjacency (for reachability) and the acyclicity invariant.
    cog.cluster_children.assign(cog.clusters.size(), {});
    for (const auto& e : cog.edges) {
        int src_cluster = e.kind == CausalOrderingGraph::SourceKind::Var
                              ? cog.cluster_of_var[e.source]
                              : cog.cluster_of_attachment[e.source];
        auto& ch = cog.cluster_children[src_cluster];
        if (std::find(ch.begin(), ch.end(), e.target) == ch.end()) ch.push_back(e.target);
    }
    std::vector<int> indeg(cog.clusters.size(), 0);
    for (const auto& ch : cog.cluster_children)
        for (int t : ch) ++indeg[t];
    std::deque<int> q;
    for (size_t i = 0; i < indeg.size(); ++i)
        if (indeg[i] == 0) q.push_back(static_cast<int>(i));
    size_t seen = 0;
    while (!q.empty()) {
        int c = q.front();
        q.pop_front();
        ++seen;
        for (int t : cog.cluster_children[c])
            if (--indeg[t] == 0) q.push_back(t);
    }
    if (seen != cog.clusters.size())
        throw Error("internal: causal ordering quotient graph is cyclic");

    return cog;
}

/// Steps 1-5: find a perfect matching, orient, cluster by strongly connected
/// components, add exogenous/input singletons, output the cluster graph.
inline CausalOrderingGraph causal_ordering(const BipartiteSystem& b) {
    return causal_ordering_with(b, perfect_matching(b));
}

/// DAG over endogenous + exogenous + input vertices with v -> w whenever the
/// causal ordering graph has an edge from v to the cluster of w.
struct MarkovOrderingGraph {
    enum class Kind { Endogenous, Exogenous, Input };
    std::vector<std::string> names;     // vertex names: v_*, then exo/input names
    std::vector<std::string> raw_names; // declared variable names for endogenous
    std::vector<Kind> kinds;
    std::vector<std::vector<int>> children, parents;

    int n() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const {
        for (int i = 0; i < n(); ++i)
            if (names[i] == name || (kinds[i] == Kind::Endogenous && raw_names[i] == name))
                return i;
        return -1;
    }
    bool has_edge(int a, int b) const {
        return std::find(children[a].begin(), children[a].end(), b) != children[a].end();
    }
};

inline MarkovOrderingGraph markov_ordering(const CausalOrderingGraph& cog) {
    MarkovOrderingGraph mog;
    int nv = static_cast<int>(cog.var_names.size());
    for (int v = 0; v < nv; ++v) {
        mog.names.push_back(cog.var_names[v]);
        mog.raw_names.push_back(cog.raw_var_names[v]);
        mog.kinds.push_back(MarkovOrderingGraph::Kind::Endogenous);
    }
    for (const auto& a : cog.attachments) {
        mog.names.push_back(a.name);
        mog.raw_names.push_back(a.name);
        mog.kinds.push_back(a.is_input ? MarkovOrderingGraph::Kind::Input
                                       : MarkovOrderingGraph::Kind::Exogenous);
    }
    mog.children.assign(mog.n(), {});
    mog.parents.assign(mog.n(), {});
    for (const auto& e : cog.edges) {
        int src = e.kind == CausalOrderingGraph::SourceKind::Var ? e.source : nv + e.source;
        for (int w : cog.clusters[e.target].vars) {
            if (!mog.has_edge(src, w)) {
                mog.children[src].push_back(w);
                mog.parents[w].push_back(src);
            }
        }
    }
    for (auto& c : mog.children) std::sort(c.begin(), c.end());
    for (auto& p : mog.parents) std::sort(p.begin(), p.end());

    // Acyclicity follows from quotient acyclicity; verify anyway.
    std::vector<int> indeg(mog.n(), 0);
    for (const auto& ch : mog.children)
        for (int t : ch) ++indeg[t];
    std::deque<int> q;
    for (int i = 0; i < mog.n(); ++i)
        if (indeg[i] == 0) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (int t : mog.children[v])
            if (--indeg[t] == 0) q.push_back(t);
    }
    if (seen != mog.n()) throw Error("internal: Markov ordering graph is cyclic");
    return mog;
}

} // namespace adaptscan
