#pragma once

#include "adaptscan/errors.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adaptscan {

enum class ExprKind { Number, Symbol, Neg, Add, Sub, Mul, Div, Pow };

/// Expression tree over numeric literals, symbol references, unary negation,
/// the four arithmetic operators and power (both `a^b` and `pow(a,b)`).
struct Expr {
    ExprKind kind = ExprKind::Number;
    double number = 0.0;
    std::string symbol;
    std::vector<Expr> args;

    static Expr num(double v) {
        Expr e;
        e.kind = ExprKind::Number;
        e.number = v;
        return e;
    }
    static Expr sym(std::string name) {
        Expr e;
        e.kind = ExprKind::Symbol;
        e.symbol = std::move(name);
        return e;
    }
    static Expr neg(Expr a) {
        Expr e;
        e.kind = ExprKind::Neg;
        e.args.push_back(std::move(a));
        return e;
    }
    static Expr binary(ExprKind k, Expr a, Expr b) {
        Expr e;
        e.kind = k;
        e.args.push_back(std::move(a));
        e.args.push_back(std::move(b));
        return e;
    }

    bool operator==(const Expr& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
        case ExprKind::Number: return number == o.number;
        case ExprKind::Symbol: return symbol == o.symbol;
        default: break;
        }
        if (args.size() != o.args.size()) return false;
        for (size_t i = 0; i < args.size(); ++i)
            if (!(args[i] == o.args[i])) return false;
        return true;
    }
    bool operator!=(const Expr& o) const { return !(*this == o); }
};

inline void collect_symbols(const Expr& e, std::set<std::string>& out) {
    if (e.kind == ExprKind::Symbol) out.insert(e.symbol);
    for (const Expr& a : e.args) collect_symbols(a, out);
}

/// IEEE double evaluation with full binding of every symbol. Throws
/// UnboundSymbolError / NonFiniteResultError.
inline double eval_expr(const Expr& e, const std::map<std::string, double>& bindings) {
    double r = 0.0;
    switch (e.kind) {
    case ExprKind::Number: r = e.number; break;
    case ExprKind::Symbol: {
        auto it = bindings.find(e.symbol);
        if (it == bindings.end()) throw UnboundSymbolError(e.symbol);
        r = it->second;
        break;
    }
    case ExprKind::Neg: r = -eval_expr(e.args[0], bindings); break;
    case ExprKind::Add: r = eval_expr(e.args[0], bindings) + eval_expr(e.args[1], bindings); break;
    case ExprKind::Sub: r = eval_expr(e.args[0], bindings) - eval_expr(e.args[1], bindings); break;
    case ExprKind::Mul: r = eval_expr(e.args[0], bindings) * eval_expr(e.args[1], bindings); break;
    case ExprKind::Div: r = eval_expr(e.args[0], bindings) / eval_expr(e.args[1], bindings); break;
    case ExprKind::Pow:
        r = std::pow(eval_expr(e.args[0], bindings), eval_expr(e.args[1], bindings));
        break;
    }
    if (!std::isfinite(r)) throw NonFiniteResultError();
    return r;
}

// ---- pretty printing ------------------------------------------------------

namespace detail {

inline int precedence(ExprKind k) {
    switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
    }
}

inline void print_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

inline void print_expr(std::string& out, const Expr& e, int parent_prec, bool rhs) {
    int prec = precedence(e.kind);
    // - and / are left associative, ^ is right associative: the side that
    // would re-parse differently gets parentheses at equal precedence.
    bool need_paren = prec < parent_prec ||
                      (prec == parent_prec && rhs && parent_prec != 4) ||
                      (prec == parent_prec && !rhs && parent_prec == 4);
    if (need_paren) out += '(';
    switch (e.kind) {
    case ExprKind::Number:
        if (e.number < 0 || std::signbit(e.number)) {
            out += '(';
            print_number(out, e.number);
            out += ')';
        } else {
            print_number(out, e.number);
        }
        break;
    case ExprKind::Symbol: out += e.symbol; break;
    case ExprKind::Neg:
        out += '-';
        print_expr(out, e.args[0], 3, true);
        break;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
    case ExprKind::Pow: {
        const char* op = e.kind == ExprKind::Add   ? " + "
                         : e.kind == ExprKind::Sub ? " - "
                         : e.kind == ExprKind::Mul ? " * "
                         : e.kind == ExprKind::Div ? " / "
                                                   : "^";
        print_expr(out, e.args[0], prec, false);
        out += op;
        print_expr(out, e.args[1], prec, true);
        break;
    }
    }
    if (need_paren) out += ')';
}

} // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print_expr(out, e, 0, false);
    return out;
}

// ---- expression parser ------------------------------------------------------

namespace detail {

struct ExprParser {
    const std::string& src;
    size_t pos = 0;
    int line;
    int col_base;

    ExprParser(const std::string& s, int line_, int col_base_)
        : src(s), line(line_), col_base(col_base_) {}

    [[noreturn]] void fail(const std::string& expected) {
        throw SyntaxError(line, col_base + static_cast<int>(pos), expected);
    }
    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    Expr parse() {
        Expr e = additive();
        skip_ws();
        if (pos != src.size()) fail("end of expression");
        return e;
    }

    Expr additive() {
        Expr e = multiplicative();
        for (;;) {
            if (eat('+'))
                e = Expr::binary(ExprKind::Add, std::move(e), multiplicative());
            else if (eat('-'))
                e = Expr::binary(ExprKind::Sub, std::move(e), multiplicative());
            else
                return e;
        }
    }

    Expr multiplicative() {
        Expr e = unary();
        for (;;) {
            if (eat('*'))
                e = Expr::binary(ExprKind::Mul, std::move(e), unary());
            else if (eat('/'))
                e = Expr::binary(ExprKind::Div, std::move(e), unary());
            else
                return e;
        }
    }

    Expr unary() {
        if (eat('-')) return Expr::neg(unary());
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (eat('^')) return Expr::binary(ExprKind::Pow, std::move(base), unary());
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos >= src.size()) fail("operand");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            Expr e = additive();
            if (!eat(')')) fail("')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number_lit();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return symbol_or_call();
        fail("operand");
    }

    Expr number_lit() {
        size_t start = pos;
        while (pos < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
            ++pos;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            size_t mark = pos++;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            } else {
                pos = mark;
            }
        }
        try {
            return Expr::num(std::stod(src.substr(start, pos - start)));
        } catch (const std::exception&) {
            pos = start;
            fail("number");
        }
    }

    Expr symbol_or_call() {
        size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                    src[pos] == '_'))
            ++pos;
        std::string name = src.substr(start, pos - start);
        if (peek() == '(') {
            if (name != "pow") fail("'pow' (the only supported function)");
            eat('(');
            Expr a = additive();
            if (!eat(',')) fail("','");
            Expr b = additive();
            if (!eat(')')) fail("')'");
            return Expr::binary(ExprKind::Pow, std::move(a), std::move(b));
        }
        return Expr::sym(std::move(name));
    }
};

} // namespace detail

inline Expr parse_expression(const std::string& text, int line = 0, int col_base = 0) {
    detail::ExprParser p(text, line, col_base);
    return p.parse();
}

// ---- compiled form ------------------------------------------------------------
//
// The simulator evaluates right-hand sides millions of times; a flat postfix
// program over a slot vector avoids tree walks and map lookups.

enum class OpCode : uint8_t { PushNum, PushSlot, Neg, Add, Sub, Mul, Div, Pow };

struct CompiledExpr {
    struct Op {
        OpCode code;
        int slot = 0;
        double value = 0.0;
    };
    std::vector<Op> ops;
    int stack_need = 0;

    double eval(const std::vector<double>& slots) const {
        double stack[64];
        int sp = 0;
        for (const Op& op : ops) {
            switch (op.code) {
            case OpCode::PushNum: stack[sp++] = op.value; break;
            case OpCode::PushSlot: stack[sp++] = slots[op.slot]; break;
            case OpCode::Neg: stack[sp - 1] = -stack[sp - 1]; break;
            case OpCode::Add: --sp; stack[sp - 1] += stack[sp]; break;
            case OpCode::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
            case OpCode::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
            case OpCode::Div: --sp; stack[sp - 1] /= stack[sp]; break;
            case OpCode::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
            }
        }
        return stack[0];
    }
};

/// Maps symbol names to slot indices in a flat binding vector.
struct SlotMap {
    std::vector<std::string> names;
    std::map<std::string, int> index;

    int intern(const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(names.size());
        names.push_back(name);
        index.emplace(name, id);
        return id;
    }
    int at(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) throw UnboundSymbolError(name);
        return it->second;
    }
};

namespace detail {

inline int emit(const Expr& e, const SlotMap& slots, std::vector<CompiledExpr::Op>& out) {
    switch (e.kind) {
    case ExprKind::Number:
        out.push_back({OpCode::PushNum, 0, e.number});
        return 1;
    case ExprKind::Symbol:
        out.push_back({OpCode::PushSlot, slots.at(e.symbol), 0.0});
        return 1;
    case ExprKind::Neg: {
        int d = emit(e.args[0], slots, out);
        out.push_back({OpCode::Neg, 0, 0.0});
        return d;
    }
    default: {
        int d0 = emit(e.args[0], slots, out);
        int d1 = emit(e.args[1], slots, out);
        OpCode c = e.kind == ExprKind::Add   ? OpCode::Add
                   : e.kind == ExprKind::Sub ? OpCode::Sub
                   : e.kind == ExprKind::Mul ? OpCode::Mul
                   : e.kind == ExprKind::Div ? OpCode::Div
                                             : OpCode::Pow;
        out.push_back({c, 0, 0.0});
        return std::max(d0, 1 + d1);
    }
    }
}

} // namespace detail

inline CompiledExpr compile_expr(const Expr& e, const SlotMap& slots) {
    CompiledExpr c;
    c.stack_need = detail::emit(e, slots, c.ops);
    if (c.stack_need > 63) throw Error("expression too deep to compile");
    return c;
}

} // namespace adaptscan
