#pragma once

#include "adaptscan/rng.hpp"
#include "adaptscan/sim.hpp"

#include <fstream>

namespace adaptscan {

/// Named-column sample matrix. Columns hold endogenous equilibria (vertex
/// names), exogenous draws and overridden parameters (symbol or supplied
/// column names).
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // column-major
    uint64_t seed = 0;
    int n = 0;

    int column_index(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
    const std::vector<double>& column(const std::string& name) const {
        int i = column_index(name);
        if (i < 0) throw ColumnMismatchError("no column '" + name + "'");
        return data[i];
    }
};

inline void write_csv(const Dataset& ds, std::ostream& out) {
    for (size_t c = 0; c < ds.columns.size(); ++c) out << (c ? "," : "") << ds.columns[c];
    out << "\n";
    char buf[40];
    for (int r = 0; r < ds.n; ++r) {
        for (size_t c = 0; c < ds.columns.size(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.data[c][r]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

inline void write_csv(const Trace& tr, std::ostream& out) {
    out << "t";
    for (const auto& v : tr.var_names) out << "," << v;
    for (const auto& i : tr.input_names) out << "," << i;
    out << "\n";
    char buf[40];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << "," << buf;
    };
    for (size_t r = 0; r < tr.times.size(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.17g", tr.times[r]);
        out << buf;
        for (double v : tr.states[r]) emit(v);
        for (double v : tr.input_values[r]) emit(v);
        out << "\n";
    }
}

inline Dataset read_csv(std::istream& in) {
    Dataset ds;
    std::string line;
    if (!std::getline(in, line)) throw ColumnMismatchError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) ds.columns.push_back(detail::strip(cell));
    ds.data.resize(ds.columns.size());
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::strip(line).empty()) continue;
        std::istringstream row(line);
        size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= ds.columns.size())
                throw ColumnMismatchError("row has more cells than the header");
            ds.data[c++].push_back(std::stod(cell));
        }
        if (c != ds.columns.size()) throw ColumnMismatchError("short row in CSV input");
        ++ds.n;
    }
    return ds;
}

inline Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ColumnMismatchError("cannot open '" + path + "'");
    return read_csv(in);
}

/// Distribution override applied during sampling; `column` names the output
/// column (defaults to the target symbol).
struct SampleOverride {
    std::string column;
    std::string target; // exogenous, constant, or input symbol
    Distribution dist;
};

/// Draws n independent exogenous samples (one PRNG substream per sample),
/// integrates each to equilibrium, and collects the equilibrium values.
/// Draw order within a sample: model exogenous in declaration order, then
/// overrides of constants/inputs in the given order.
inline Dataset sample_equilibria(const ModelSpec& m, int n, uint64_t seed,
                                 const SimConfig& cfg,
                                 const std::vector<SampleOverride>& overrides = {}) {
    if (n < 1) throw Error("sample count must be >= 1");
    for (const auto& ov : overrides)
        if (!m.is_exogenous(ov.target) && !m.is_constant(ov.target) && !m.is_input(ov.target))
            throw UnknownParameterError(ov.target);

    Simulator sim(m);
    Dataset ds;
    ds.seed = seed;
    ds.n = n;
    for (const auto& v : m.variables) ds.columns.push_back(var_vertex_name(v));
    for (const auto& e : m.exogenous) {
        bool overridden = false;
        for (const auto& ov : overrides)
            if (ov.target == e.name) overridden = true;
        if (!overridden) ds.columns.push_back(e.name);
    }
    for (const auto& ov : overrides)
        ds.columns.push_back(ov.column.empty() ? ov.target : ov.column);
    ds.data.assign(ds.columns.size(), std::vector<double>(n, 0.0));

    std::vector<double> x0 = sim.initial_state();
    std::vector<int> failed;
    double worst_residual = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, static_cast<uint64_t>(i));
        std::map<std::string, double> bindings = default_bindings(m);
        std::vector<double> inputs = sim.input_defaults();

        auto draw = [&](const Distribution& d) {
            return d.kind == Distribution::Kind::Constant ? d.a : rng.uniform(d.a, d.b);
        };
        std::vector<double> override_vals(overrides.size(), 0.0);
        for (const auto& e : m.exogenous) {
            const Distribution* dist = &e.dist;
            int ov_idx = -1;
            for (size_t k = 0; k < overrides.size(); ++k)
                if (overrides[k].target == e.name) {
                    dist = &overrides[k].dist;
                    ov_idx = static_cast<int>(k);
                }
            double v = draw(*dist);
            bindings[e.name] = v;
            if (ov_idx >= 0) override_vals[ov_idx] = v;
        }
        for (size_t k = 0; k < overrides.size(); ++k) {
            const auto& ov = overrides[k];
            if (m.is_exogenous(ov.target)) continue; // drawn above
            double v = draw(ov.dist);
            override_vals[k] = v;
            if (m.is_constant(ov.target)) bindings[ov.target] = v;
            for (size_t j = 0; j < m.inputs.size(); ++j)
                if (m.inputs[j].first == ov.target) inputs[j] = v;
        }

        try {
            InputSchedule sched = InputSchedule::constant(sim.input_names(), inputs);
            EquilibriumResult eq = sim.find_equilibrium(bindings, x0, sched, cfg);
            size_t col = 0;
            for (size_t v = 0; v < m.variables.size(); ++v) ds.data[col++][i] = eq.state[v];
            for (const auto& e : m.exogenous) {
                bool overridden = false;
                for (const auto& ov : overrides)
                    if (ov.target == e.name) overridden = true;
                if (!overridden) ds.data[col++][i] = bindings[e.name];
            }
            for (size_t k = 0; k < overrides.size(); ++k) ds.data[col++][i] = override_vals[k];
        } catch (const NoConvergenceError& e) {
            failed.push_back(i);
            worst_residual = std::max(worst_residual, e.residual);
        }
    }
    if (!failed.empty()) {
        std::string idx = "indices ";
        for (size_t k = 0; k < failed.size() && k < 8; ++k)
            idx += (k ? ", " : "") + std::to_string(failed[k]);
        if (failed.size() > 8) idx += ", ...";
        idx += "; worst residual " + std::to_string(worst_residual);
        throw SamplingError(failed, idx);
    }
    return ds;
}

} // namespace adaptscan
