#pragma once

// Published decision table for the protein pathway at equilibrium: every
// pair over {I, v_s, v_r, v_m, v_e} with conditioning sets of size 0 or 1,
// labelled by whether the pair is d-separated (independent). 13 yes rows,
// 27 no rows.

namespace protein_table {

struct Row {
    const char* a;
    const char* b;
    const char* z; // nullptr = marginal
    bool separated;
};

inline const Row* rows(int& count) {
    static const Row kRows[] = {
        {"I", "v_s", nullptr, true},    {"I", "v_r", nullptr, true},
        {"I", "v_m", nullptr, true},    {"I", "v_e", nullptr, false},
        {"v_s", "v_r", nullptr, false}, {"v_s", "v_m", nullptr, false},
        {"v_s", "v_e", nullptr, false}, {"v_r", "v_m", nullptr, false},
        {"v_r", "v_e", nullptr, false}, {"v_m", "v_e", nullptr, false},
        {"I", "v_s", "v_r", true},      {"I", "v_s", "v_m", true},
        {"I", "v_r", "v_s", true},      {"I", "v_r", "v_m", true},
        {"I", "v_m", "v_s", true},      {"I", "v_m", "v_r", true},
        {"v_e", "v_r", "v_s", true},    {"v_e", "v_m", "v_s", true},
        {"v_e", "v_m", "v_r", true},    {"v_s", "v_m", "v_r", true},
        {"I", "v_e", "v_s", false},     {"I", "v_e", "v_r", false},
        {"I", "v_e", "v_m", false},     {"I", "v_s", "v_e", false},
        {"I", "v_r", "v_e", false},     {"I", "v_m", "v_e", false},
        {"v_e", "v_s", "v_r", false},   {"v_e", "v_s", "v_m", false},
        {"v_e", "v_s", "I", false},     {"v_e", "v_r", "v_m", false},
        {"v_e", "v_r", "I", false},     {"v_e", "v_m", "I", false},
        {"v_s", "v_r", "I", false},     {"v_s", "v_r", "v_e", false},
        {"v_s", "v_r", "v_m", false},   {"v_s", "v_m", "I", false},
        {"v_s", "v_m", "v_e", false},   {"v_r", "v_m", "I", false},
        {"v_r", "v_m", "v_e", false},   {"v_r", "v_m", "v_s", false},
    };
    count = static_cast<int>(sizeof(kRows) / sizeof(kRows[0]));
    return kRows;
}

} // namespace protein_table
