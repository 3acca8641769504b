#pragma once

#include "adaptscan/ordering.hpp"

#include <sstream>

namespace adaptscan {

/// DOT for the matching-oriented bipartite graph. Node and edge order follow
/// declaration order so output is diffable.
inline std::string to_dot(const BipartiteSystem& b, const OrientedGraph& g,
                          const std::string& title = "oriented") {
    std::ostringstream out;
    out << "digraph \"" << title << "\" {\n";
    out << "  rankdir=TB;\n";
    for (int v = 0; v < b.n_vars(); ++v) out << "  \"" << b.var_names[v] << "\";\n";
    for (int e = 0; e < b.n_eqs(); ++e)
        out << "  \"" << b.eq_labels[e] << "\" [shape=box];\n";
    for (int v = 0; v < b.n_vars(); ++v)
        for (int w : g.out[v])
            out << "  \"" << b.var_names[v] << "\" -> \"" << b.eq_labels[w - g.n_vars]
                << "\";\n";
    for (int e = 0; e < b.n_eqs(); ++e)
        for (int w : g.out[g.eq_vertex(e)])
            out << "  \"" << b.eq_labels[e] << "\" -> \"" << b.var_names[w] << "\";\n";
    out << "}\n";
    return out.str();
}

namespace detail {

/// Representative node used as the concrete endpoint of a cluster-targeted
/// edge (DOT edges must end at nodes; lhead draws them at the cluster box).
inline std::string cluster_anchor(const CausalOrderingGraph& cog, int cluster) {
    const auto& c = cog.clusters[cluster];
    if (c.attachment >= 0) return cog.attachments[c.attachment].name;
    if (!c.vars.empty()) return cog.var_names[c.vars.front()];
    return cog.eq_labels[c.eqs.front()];
}

} // namespace detail

/// DOT for a causal ordering graph: clusters as subgraph boxes, exogenous
/// singletons dashed, input singletons bold.
inline std::string to_dot(const CausalOrderingGraph& cog,
                          const std::string& title = "causal_ordering") {
    std::ostringstream out;
    out << "digraph \"" << title << "\" {\n";
    out << "  compound=true;\n";
    out << "  node [shape=circle];\n";
    for (size_t i = 0; i < cog.clusters.size(); ++i) {
        const auto& c = cog.clusters[i];
        out << "  subgraph cluster_" << i << " {\n";
        if (c.attachment >= 0)
            out << "    style=" << (cog.attachments[c.attachment].is_input ? "bold" : "dashed")
                << ";\n";
        for (int v : c.vars) out << "    \"" << cog.var_names[v] << "\";\n";
        for (int e : c.eqs) out << "    \"" << cog.eq_labels[e] << "\" [shape=box];\n";
        if (c.attachment >= 0) out << "    \"" << cog.attachments[c.attachment].name << "\";\n";
        out << "  }\n";
    }
    for (const auto& e : cog.edges) {
        std::string src = e.kind == CausalOrderingGraph::SourceKind::Var
                              ? cog.var_names[e.source]
                              : cog.attachments[e.source].name;
        out << "  \"" << src << "\" -> \"" << detail::cluster_anchor(cog, e.target)
            << "\" [lhead=cluster_" << e.target << "];\n";
    }
    out << "}\n";
    return out.str();
}

/// DOT for a Markov ordering graph.
inline std::string to_dot(const MarkovOrderingGraph& mog,
                          const std::string& title = "markov_ordering") {
    std::ostringstream out;
    out << "digraph \"" << title << "\" {\n";
    for (int i = 0; i < mog.n(); ++i) {
        out << "  \"" << mog.names[i] << "\"";
        if (mog.kinds[i] == MarkovOrderingGraph::Kind::Exogenous) out << " [style=dashed]";
        if (mog.kinds[i] == MarkovOrderingGraph::Kind::Input) out << " [style=bold]";
        out << ";\n";
    }
    for (int i = 0; i < mog.n(); ++i)
        for (int j : mog.children[i])
            out << "  \"" << mog.names[i] << "\" -> \"" << mog.names[j] << "\";\n";
    out << "}\n";
    return out.str();
}

} // namespace adaptscan
