#pragma once

// Expected cluster partitions, inter-cluster edges, exogenous/input
// attachments and Markov ordering edges for every corpus model, worked out
// by hand from the published cluster graphs. Shared by the unit tests and
// the acceptance suite.

#include "test_util.hpp"

namespace expectations {

using testutil::NameSet;
using namespace adaptscan;

struct GraphExpectation {
    std::string model;
    std::string mode; // "equilibrium" or "dynamic"
    std::set<NameSet> clusters;
    std::set<std::pair<std::string, NameSet>> edges;
    std::set<std::pair<std::string, std::string>> markov; // empty when unchecked
};

inline std::vector<GraphExpectation> all() {
    std::vector<GraphExpectation> v;

    v.push_back({"example1",
                 "equilibrium",
                 {{"v_1", "f_1"}, {"v_2", "f_2"}},
                 {{"v_1", {"v_2", "f_2"}},
                  {"U_w1", {"v_1", "f_1"}},
                  {"U_w2", {"v_2", "f_2"}}},
                 {{"v_1", "v_2"}, {"U_w1", "v_1"}, {"U_w2", "v_2"}}});

    v.push_back({"bathtub",
                 "equilibrium",
                 {{"v_I", "f_I"}, {"v_D", "f_P"}, {"v_P", "f_O"}, {"v_O", "f_D"}},
                 {{"v_I", {"v_O", "f_D"}},
                  {"v_O", {"v_P", "f_O"}},
                  {"v_P", {"v_D", "f_P"}},
                  {"I_K", {"v_P", "f_O"}},
                  {"U_I", {"v_I", "f_I"}},
                  {"U_1", {"v_O", "f_D"}},
                  {"U_2", {"v_D", "f_P"}},
                  {"U_3", {"v_D", "f_P"}},
                  {"U_4", {"v_P", "f_O"}},
                  {"U_5", {"v_P", "f_O"}}},
                 {{"v_I", "v_O"},
                  {"v_O", "v_P"},
                  {"v_P", "v_D"},
                  {"I_K", "v_P"},
                  {"U_I", "v_I"},
                  {"U_1", "v_O"},
                  {"U_2", "v_D"},
                  {"U_3", "v_D"},
                  {"U_4", "v_P"},
                  {"U_5", "v_P"}}});

    NameSet bathtub_dyn_block{"v_D", "v_P", "v_O", "g_D", "g_P", "g_O"};
    v.push_back({"bathtub",
                 "dynamic",
                 {{"v_I", "f_I"}, bathtub_dyn_block},
                 {{"v_I", bathtub_dyn_block},
                  {"I_K", bathtub_dyn_block},
                  {"U_I", {"v_I", "f_I"}},
                  {"U_1", bathtub_dyn_block},
                  {"U_2", bathtub_dyn_block},
                  {"U_3", bathtub_dyn_block},
                  {"U_4", bathtub_dyn_block},
                  {"U_5", bathtub_dyn_block}},
                 {}});

    v.push_back({"viral",
                 "equilibrium",
                 {{"v_T", "f_T"}, {"v_I", "f_E"}, {"v_E", "f_I"}},
                 {{"v_I", {"v_T", "f_T"}},
                  {"v_T", {"v_E", "f_I"}},
                  {"I_sigma", {"v_T", "f_T"}},
                  {"d_T", {"v_T", "f_T"}},
                  {"beta", {"v_T", "f_T"}},
                  {"beta", {"v_E", "f_I"}},
                  {"d_I", {"v_E", "f_I"}},
                  {"d_E", {"v_I", "f_E"}}},
                 {{"v_I", "v_T"},
                  {"v_T", "v_E"},
                  {"I_sigma", "v_T"},
                  {"d_T", "v_T"},
                  {"beta", "v_T"},
                  {"beta", "v_E"},
                  {"d_I", "v_E"},
                  {"d_E", "v_I"}}});

    NameSet viral_dyn_block{"v_T", "v_I", "v_E", "g_T", "g_I", "g_E"};
    v.push_back({"viral",
                 "dynamic",
                 {viral_dyn_block},
                 {{"I_sigma", viral_dyn_block},
                  {"d_T", viral_dyn_block},
                  {"beta", viral_dyn_block},
                  {"d_I", viral_dyn_block},
                  {"d_E", viral_dyn_block}},
                 {}});

    v.push_back({"nfbn",
                 "equilibrium",
                 {{"v_A", "f_A"}, {"v_B", "f_C"}, {"v_C", "f_B"}},
                 {{"v_A", {"v_B", "f_C"}},
                  {"v_C", {"v_B", "f_C"}},
                  {"I", {"v_A", "f_A"}},
                  {"k_IA", {"v_A", "f_A"}},
                  {"k_CB", {"v_C", "f_B"}},
                  {"k_AC", {"v_B", "f_C"}}},
                 {{"v_A", "v_B"},
                  {"v_C", "v_B"},
                  {"I", "v_A"},
                  {"k_IA", "v_A"},
                  {"k_CB", "v_C"},
                  {"k_AC", "v_B"}}});

    NameSet nfbn_dyn_block{"v_B", "v_C", "g_B", "g_C"};
    v.push_back({"nfbn",
                 "dynamic",
                 {{"v_A", "g_A"}, nfbn_dyn_block},
                 {{"v_A", nfbn_dyn_block},
                  {"I", {"v_A", "g_A"}},
                  {"k_IA", {"v_A", "g_A"}},
                  {"k_CB", nfbn_dyn_block},
                  {"k_AC", nfbn_dyn_block}},
                 {}});

    v.push_back({"protein",
                 "equilibrium",
                 {{"v_s", "f_r"}, {"v_r", "f_m"}, {"v_m", "f_e"}, {"v_e", "f_s"}},
                 {{"v_s", {"v_e", "f_s"}},
                  {"v_r", {"v_s", "f_r"}},
                  {"v_m", {"v_r", "f_m"}},
                  {"I", {"v_e", "f_s"}},
                  {"F_s", {"v_e", "f_s"}},
                  {"F_r", {"v_s", "f_r"}},
                  {"F_m", {"v_r", "f_m"}},
                  {"F_e", {"v_m", "f_e"}}},
                 {{"v_s", "v_e"},
                  {"v_r", "v_s"},
                  {"v_m", "v_r"},
                  {"I", "v_e"},
                  {"F_s", "v_e"},
                  {"F_r", "v_s"},
                  {"F_m", "v_r"},
                  {"F_e", "v_m"}}});

    NameSet protein_dyn_block{"v_s", "v_r", "v_m", "v_e", "g_s", "g_r", "g_m", "g_e"};
    v.push_back({"protein",
                 "dynamic",
                 {protein_dyn_block},
                 {{"I", protein_dyn_block},
                  {"F_s", protein_dyn_block},
                  {"F_r", protein_dyn_block},
                  {"F_m", protein_dyn_block},
                  {"F_e", protein_dyn_block}},
                 {}});

    v.push_back({"ifflp",
                 "equilibrium",
                 {{"v_A", "f_A"}, {"v_B", "f_B"}, {"v_C", "f_C"}},
                 {{"v_A", {"v_B", "f_B"}},
                  {"v_A", {"v_C", "f_C"}},
                  {"v_B", {"v_C", "f_C"}},
                  {"I", {"v_A", "f_A"}},
                  {"k_IA", {"v_A", "f_A"}},
                  {"k_AB", {"v_B", "f_B"}},
                  {"k_AC", {"v_C", "f_C"}}},
                 {}});

    v.push_back({"ifflp_rewritten",
                 "equilibrium",
                 {{"v_A", "f_A"}, {"v_R", "f_R"}, {"v_C", "f_C"}},
                 {{"v_R", {"v_C", "f_C"}},
                  {"I", {"v_A", "f_A"}},
                  {"k_IA", {"v_A", "f_A"}},
                  {"k_AB", {"v_R", "f_R"}},
                  {"k_AC", {"v_C", "f_C"}}},
                 {{"v_R", "v_C"},
                  {"I", "v_A"},
                  {"k_IA", "v_A"},
                  {"k_AB", "v_R"},
                  {"k_AC", "v_C"}}});

    v.push_back({"enzyme_rewritten",
                 "equilibrium",
                 {{"v_S", "f_S"}, {"v_C", "f_C"}, {"v_E", "f_E"}, {"v_P", "f_P"}},
                 {{"v_C", {"v_S", "f_S"}},
                  {"v_C", {"v_E", "f_E"}},
                  {"v_C", {"v_P", "f_P"}},
                  {"v_E", {"v_S", "f_S"}},
                  {"k_1", {"v_S", "f_S"}},
                  {"k_0", {"v_S", "f_S"}},
                  {"k_0", {"v_C", "f_C"}},
                  {"k_m1", {"v_S", "f_S"}},
                  {"k_2", {"v_C", "f_C"}},
                  {"k_2", {"v_P", "f_P"}},
                  {"k_3", {"v_P", "f_P"}},
                  {"C_0", {"v_E", "f_E"}},
                  {"E_0", {"v_E", "f_E"}}},
                 {}});

    NameSet enzyme_dyn_block{"v_S", "v_C", "v_E", "g_S", "g_C", "g_E"};
    v.push_back({"enzyme",
                 "dynamic",
                 {enzyme_dyn_block, {"v_P", "g_P"}},
                 {{"v_C", {"v_P", "g_P"}},
                  {"k_1", enzyme_dyn_block},
                  {"k_0", enzyme_dyn_block},
                  {"k_m1", enzyme_dyn_block},
                  {"k_2", enzyme_dyn_block},
                  {"k_2", {"v_P", "g_P"}},
                  {"k_3", {"v_P", "g_P"}}},
                 {}});

    return v;
}

/// Checks one expectation against the computed graphs; throws on mismatch.
inline void check(const GraphExpectation& exp) {
    ModelSpec m = testutil::load_corpus(exp.model);
    EquationSystem sys =
        exp.mode == "dynamic" ? dynamic_system(m) : equilibrium_system(m);
    BipartiteSystem b = build_bipartite(m, sys);
    CausalOrderingGraph cog = causal_ordering(b);
    if (testutil::block_clusters(cog) != exp.clusters)
        throw std::runtime_error(exp.model + " " + exp.mode + ": cluster partition mismatch");
    if (testutil::cog_edges(cog) != exp.edges)
        throw std::runtime_error(exp.model + " " + exp.mode + ": edge set mismatch");
    if (!exp.markov.empty()) {
        MarkovOrderingGraph mog = markov_ordering(cog);
        if (testutil::mog_edges(mog) != exp.markov)
            throw std::runtime_error(exp.model + " " + exp.mode +
                                     ": Markov ordering edge mismatch");
    }
}

} // namespace expectations
