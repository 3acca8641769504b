#pragma once

#include "adaptscan/expr.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace adaptscan {

struct Distribution {
    enum class Kind { Constant, Uniform };
    Kind kind = Kind::Constant;
    double a = 0.0, b = 0.0; // constant value in a; uniform bounds in (a, b)

    static Distribution constant(double c) { return {Kind::Constant, c, c}; }
    static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    double midpoint() const { return kind == Kind::Constant ? a : 0.5 * (a + b); }
    bool operator==(const Distribution& o) const {
        return kind == o.kind && a == o.a && b == o.b;
    }
};

struct ExogVar {
    std::string name;
    Distribution dist;
    bool operator==(const ExogVar& o) const { return name == o.name && dist == o.dist; }
};

struct DynEntry {
    std::string var;
    Expr rhs; // dX/dt = rhs
    int seq = 0;
    bool operator==(const DynEntry& o) const { return var == o.var && rhs == o.rhs; }
};

struct StaticEntry {
    std::string label;
    Expr residual; // residual = 0
    int seq = 0;
    bool operator==(const StaticEntry& o) const {
        return label == o.label && residual == o.residual;
    }
};

struct OverrideEntry {
    std::string var;
    Expr residual;
    bool operator==(const OverrideEntry& o) const {
        return var == o.var && residual == o.residual;
    }
};

/// Parsed declarative system: endogenous variables, input signals, exogenous
/// variables with distributions, constants, dynamic and static equations,
/// optional equilibrium overrides and equilibrium-only equations.
struct ModelSpec {
    std::string name;
    std::vector<std::string> variables;
    std::vector<std::pair<std::string, double>> inputs; // name, default value
    std::vector<ExogVar> exogenous;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<DynEntry> dynamics;
    std::vector<StaticEntry> statics;           // part of both systems
    std::vector<StaticEntry> equilibrium_only;  // equilibrium system only
    std::vector<OverrideEntry> equilibrium_overrides;
    std::vector<std::pair<std::string, double>> inits;

    int var_index(const std::string& n) const {
        for (size_t i = 0; i < variables.size(); ++i)
            if (variables[i] == n) return static_cast<int>(i);
        return -1;
    }
    const DynEntry* dyn_of(const std::string& var) const {
        for (const auto& d : dynamics)
            if (d.var == var) return &d;
        return nullptr;
    }
    const Expr* override_of(const std::string& var) const {
        for (const auto& o : equilibrium_overrides)
            if (o.var == var) return &o.residual;
        return nullptr;
    }
    bool label_is_overridden(const std::string& label) const;
    bool is_input(const std::string& n) const {
        for (const auto& [in, v] : inputs)
            if (in == n) return true;
        return false;
    }
    bool is_exogenous(const std::string& n) const {
        for (const auto& e : exogenous)
            if (e.name == n) return true;
        return false;
    }
    bool is_constant(const std::string& n) const {
        for (const auto& [c, v] : constants)
            if (c == n) return true;
        return false;
    }
    double init_of(const std::string& var, double fallback = 0.5) const {
        for (const auto& [n, v] : inits)
            if (n == var) return v;
        return fallback;
    }

    bool operator==(const ModelSpec& o) const {
        return name == o.name && variables == o.variables && inputs == o.inputs &&
               exogenous == o.exogenous && constants == o.constants &&
               dynamics == o.dynamics && statics == o.statics &&
               equilibrium_only == o.equilibrium_only &&
               equilibrium_overrides == o.equilibrium_overrides && inits == o.inits;
    }
};

/// Graph vertex name for an endogenous variable: X_I -> v_I, X_1 -> v_1,
/// plain names get a v_ prefix.
inline std::string var_vertex_name(const std::string& var) {
    if (var.size() > 2 && var.rfind("X_", 0) == 0) return "v_" + var.substr(2);
    return "v_" + var;
}

/// Suffix used for derived equation labels: dyn X_D yields g_D / f_D.
inline std::string var_suffix(const std::string& var) {
    if (var.size() > 2 && var.rfind("X_", 0) == 0) return var.substr(2);
    return var;
}

inline bool ModelSpec::label_is_overridden(const std::string& label) const {
    for (const auto& o : equilibrium_overrides)
        if ("f_" + var_suffix(o.var) == label) return true;
    return false;
}

// ---- DSL parser ----------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool valid_ident(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

inline double parse_number(const std::string& s, int line) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SyntaxError(line, 0, "number");
    }
}

/// Strips a required trailing "= 0" from an equation body.
inline std::string strip_eq_zero(const std::string& body, int line) {
    std::string s = strip(body);
    size_t eq = s.rfind('=');
    if (eq == std::string::npos || strip(s.substr(eq + 1)) != "0")
        throw SyntaxError(line, static_cast<int>(s.size()), "'= 0' terminator");
    return strip(s.substr(0, eq));
}

inline Distribution parse_distribution(const std::string& text, int line) {
    std::string s = strip(text);
    auto args_of = [&](const std::string& head) -> std::optional<std::vector<double>> {
        if (s.rfind(head + "(", 0) != 0 || s.back() != ')') return std::nullopt;
        std::string inner = s.substr(head.size() + 1, s.size() - head.size() - 2);
        std::vector<double> vals;
        std::string item;
        std::istringstream is(inner);
        while (std::getline(is, item, ',')) vals.push_back(parse_number(strip(item), line));
        return vals;
    };
    if (auto c = args_of("constant")) {
        if (c->size() != 1) throw SyntaxError(line, 0, "constant(value)");
        return Distribution::constant((*c)[0]);
    }
    if (auto u = args_of("uniform")) {
        if (u->size() != 2 || (*u)[0] > (*u)[1]) throw SyntaxError(line, 0, "uniform(lo, hi)");
        return Distribution::uniform((*u)[0], (*u)[1]);
    }
    throw SyntaxError(line, 0, "constant(c) or uniform(lo, hi)");
}

} // namespace detail

/// Parses the model DSL. Line-oriented with sections:
///   model <name>
///   input <name> [= <default>] ...
///   exog <name> ~ constant(c) | uniform(lo, hi)
///   const <name> = <value>
///   var <name> [<name> ...]
///   init <var> = <value>
///   static <label>: <expr> = 0
///   dyn <var>: <expr>
///   eq <var>: <expr> = 0          (equilibrium override for a dynamic variable)
///   eqonly <label>: <expr> = 0    (equation present only in the equilibrium system)
/// '#' starts a comment.
inline ModelSpec parse_model(const std::string& text) {
    using detail::strip;
    ModelSpec m;
    std::set<std::string> names; // global uniqueness
    std::vector<std::pair<std::string, int>> pending_overrides; // validated at end
    auto declare = [&](const std::string& n, int line) {
        if (!detail::valid_ident(n)) throw SyntaxError(line, 0, "identifier");
        if (!names.insert(n).second) throw DuplicateNameError(n);
    };

    int seq = 0;
    int line_no = 0;
    std::istringstream is(text);
    std::string raw;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;

        size_t sp = line.find_first_of(" \t");
        std::string keyword = sp == std::string::npos ? line : line.substr(0, sp);
        std::string rest = sp == std::string::npos ? "" : strip(line.substr(sp + 1));

        if (keyword == "model") {
            if (!detail::valid_ident(rest)) throw SyntaxError(line_no, 0, "model name");
            m.name = rest;
        } else if (keyword == "input") {
            size_t eq = rest.find('=');
            if (eq != std::string::npos) {
                std::string n = strip(rest.substr(0, eq));
                declare(n, line_no);
                m.inputs.emplace_back(n, detail::parse_number(strip(rest.substr(eq + 1)), line_no));
            } else {
                for (const std::string& n : detail::split_ws(rest)) {
                    declare(n, line_no);
                    m.inputs.emplace_back(n, 1.0);
                }
            }
        } else if (keyword == "exog") {
            size_t tilde = rest.find('~');
            if (tilde == std::string::npos) throw SyntaxError(line_no, 0, "'~' distribution");
            std::string n = strip(rest.substr(0, tilde));
            declare(n, line_no);
            m.exogenous.push_back({n, detail::parse_distribution(rest.substr(tilde + 1), line_no)});
        } else if (keyword == "const") {
            size_t eq = rest.find('=');
            if (eq == std::string::npos) throw SyntaxError(line_no, 0, "'=' value");
            std::string n = strip(rest.substr(0, eq));
            declare(n, line_no);
            m.constants.emplace_back(n, detail::parse_number(strip(rest.substr(eq + 1)), line_no));
        } else if (keyword == "var") {
            for (const std::string& n : detail::split_ws(rest)) {
                declare(n, line_no);
                m.variables.push_back(n);
            }
        } else if (keyword == "init") {
            size_t eq = rest.find('=');
            if (eq == std::string::npos) throw SyntaxError(line_no, 0, "'=' value");
            std::string n = strip(rest.substr(0, eq));
            if (m.var_index(n) < 0) throw UnknownSymbolError(n, line_no);
            for (const auto& [v, x] : m.inits)
                if (v == n) throw DuplicateNameError("init " + n);
            m.inits.emplace_back(n, detail::parse_number(strip(rest.substr(eq + 1)), line_no));
        } else if (keyword == "static" || keyword == "eqonly" || keyword == "dyn" ||
                   keyword == "eq") {
            size_t colon = rest.find(':');
            if (colon == std::string::npos) throw SyntaxError(line_no, 0, "':' equation body");
            std::string head = strip(rest.substr(0, colon));
            std::string body = strip(rest.substr(colon + 1));
            if (keyword == "dyn") {
                if (m.var_index(head) < 0) throw UnknownSymbolError(head, line_no);
                if (m.dyn_of(head)) throw DuplicateNameError("dyn " + head);
                m.dynamics.push_back({head, parse_expression(body, line_no), seq++});
            } else if (keyword == "eq") {
                std::string residual = detail::strip_eq_zero(body, line_no);
                for (const auto& o : m.equilibrium_overrides)
                    if (o.var == head) throw DuplicateNameError("eq " + head);
                m.equilibrium_overrides.push_back({head, parse_expression(residual, line_no)});
                pending_overrides.emplace_back(head, line_no);
            } else {
                declare(head, line_no);
                std::string residual = detail::strip_eq_zero(body, line_no);
                StaticEntry entry{head, parse_expression(residual, line_no), seq++};
                if (keyword == "static")
                    m.statics.push_back(std::move(entry));
                else
                    m.equilibrium_only.push_back(std::move(entry));
            }
        } else {
            throw SyntaxError(line_no, 0, "section keyword");
        }
    }

    // Derived equation labels must not collide with declared ones.
    for (const auto& d : m.dynamics) {
        for (const std::string& lbl : {"g_" + var_suffix(d.var), "f_" + var_suffix(d.var)})
            if (!names.insert(lbl).second) throw DuplicateNameError(lbl);
    }

    for (const auto& [var, line] : pending_overrides) {
        if (m.var_index(var) < 0) throw UnknownSymbolError(var, line);
        if (!m.dyn_of(var)) throw OverrideWithoutDynamicsError(var);
    }

    // Every symbol reference must resolve to a declared name.
    auto check_expr = [&](const Expr& e) {
        std::set<std::string> syms;
        collect_symbols(e, syms);
        for (const std::string& s : syms)
            if (m.var_index(s) < 0 && !m.is_input(s) && !m.is_exogenous(s) && !m.is_constant(s))
                throw UnknownSymbolError(s);
    };
    for (const auto& d : m.dynamics) check_expr(d.rhs);
    for (const auto& s : m.statics) check_expr(s.residual);
    for (const auto& s : m.equilibrium_only) check_expr(s.residual);
    for (const auto& o : m.equilibrium_overrides) check_expr(o.residual);

    return m;
}

/// Canonical DSL rendering; parse(to_string(m)) is structurally identical to m.
inline std::string to_string(const ModelSpec& m) {
    std::ostringstream out;
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "model " << m.name << "\n";
    for (const auto& [n, v] : m.inputs) out << "input " << n << " = " << num(v) << "\n";
    for (const auto& e : m.exogenous) {
        out << "exog " << e.name << " ~ ";
        if (e.dist.kind == Distribution::Kind::Constant)
            out << "constant(" << num(e.dist.a) << ")\n";
        else
            out << "uniform(" << num(e.dist.a) << ", " << num(e.dist.b) << ")\n";
    }
    for (const auto& [n, v] : m.constants) out << "const " << n << " = " << num(v) << "\n";
    if (!m.variables.empty()) {
        out << "var";
        for (const auto& v : m.variables) out << " " << v;
        out << "\n";
    }
    for (const auto& [n, v] : m.inits) out << "init " << n << " = " << num(v) << "\n";

    // Equations in declaration order, overrides after their dyn entry.
    struct Line { int seq; std::string text; };
    std::vector<Line> lines;
    for (const auto& s : m.statics)
        lines.push_back({s.seq, "static " + s.label + ": " + to_string(s.residual) + " = 0"});
    for (const auto& d : m.dynamics)
        lines.push_back({d.seq, "dyn " + d.var + ": " + to_string(d.rhs)});
    for (const auto& s : m.equilibrium_only)
        lines.push_back({s.seq, "eqonly " + s.label + ": " + to_string(s.residual) + " = 0"});
    std::stable_sort(lines.begin(), lines.end(),
                     [](const Line& a, const Line& b) { return a.seq < b.seq; });
    for (const auto& l : lines) out << l.text << "\n";
    for (const auto& o : m.equilibrium_overrides)
        out << "eq " << o.var << ": " << to_string(o.residual) << " = 0\n";
    return out.str();
}

// ---- equation systems --------------------------------------------------------

enum class SystemKind { Dynamic, Equilibrium };

struct Equation {
    std::string label;
    Expr residual;
    std::vector<int> incidence; // endogenous variable indices, ascending
    int natural_var = -1;       // variable index under the natural labelling
};

struct EquationSystem {
    SystemKind kind;
    std::vector<Equation> equations;

    const Equation* find(const std::string& label) const {
        for (const auto& e : equations)
            if (e.label == label) return &e;
        return nullptr;
    }
};

namespace detail {

inline std::vector<int> syntactic_incidence(const ModelSpec& m, const Expr& e) {
    std::set<std::string> syms;
    collect_symbols(e, syms);
    std::vector<int> out;
    for (size_t i = 0; i < m.variables.size(); ++i)
        if (syms.count(m.variables[i])) out.push_back(static_cast<int>(i));
    return out;
}

} // namespace detail

/// Static equations plus one g_i per dynamics entry; incidence is the
/// syntactic occurrence set plus the forced (v_i, g_i) membership from the
/// time derivative.
inline EquationSystem dynamic_system(const ModelSpec& m) {
    struct Item { int seq; Equation eq; };
    std::vector<Item> items;
    for (const auto& s : m.statics)
        items.push_back({s.seq, {s.label, s.residual, detail::syntactic_incidence(m, s.residual), -1}});
    for (const auto& d : m.dynamics) {
        Equation eq;
        eq.label = "g_" + var_suffix(d.var);
        eq.residual = d.rhs;
        eq.incidence = detail::syntactic_incidence(m, d.rhs);
        int vi = m.var_index(d.var);
        if (!std::binary_search(eq.incidence.begin(), eq.incidence.end(), vi)) {
            eq.incidence.push_back(vi);
            std::sort(eq.incidence.begin(), eq.incidence.end());
        }
        eq.natural_var = vi;
        items.push_back({d.seq, std::move(eq)});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.seq < b.seq; });
    EquationSystem sys{SystemKind::Dynamic, {}};
    for (auto& it : items) sys.equations.push_back(std::move(it.eq));
    return sys;
}

/// Static equations, one f_i per dynamics entry (override residual when
/// present, otherwise h_i), plus any equilibrium-only equations. Incidence is
/// purely syntactic.
inline EquationSystem equilibrium_system(const ModelSpec& m) {
    struct Item { int seq; Equation eq; };
    std::vector<Item> items;
    for (const auto& s : m.statics)
        items.push_back({s.seq, {s.label, s.residual, detail::syntactic_incidence(m, s.residual), -1}});
    for (const auto& d : m.dynamics) {
        const Expr* ov = m.override_of(d.var);
        Equation eq;
        eq.label = "f_" + var_suffix(d.var);
        eq.residual = ov ? *ov : d.rhs;
        eq.incidence = detail::syntactic_incidence(m, eq.residual);
        eq.natural_var = m.var_index(d.var);
        items.push_back({d.seq, std::move(eq)});
    }
    for (const auto& s : m.equilibrium_only)
        items.push_back({s.seq, {s.label, s.residual, detail::syntactic_incidence(m, s.residual), -1}});
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.seq < b.seq; });
    EquationSystem sys{SystemKind::Equilibrium, {}};
    for (auto& it : items) sys.equations.push_back(std::move(it.eq));
    return sys;
}

} // namespace adaptscan
