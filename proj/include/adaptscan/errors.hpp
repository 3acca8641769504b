#include <cstdio>
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace adaptscan {

/// Base class for all toolkit errors. Subclasses carry structured fields so
/// callers (and the CLI) can report more than a message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- model / DSL errors -------------------------------------------------

class SyntaxError : public Error {
public:
    int line, col;
    std::string expected;
    SyntaxError(int line_, int col_, const std::string& expected_)
        : Error("syntax error at line " + std::to_string(line_) + ", col " +
                std::to_string(col_) + ": expected " + expected_),
          line(line_), col(col_), expected(expected_) {}
};

class UnknownSymbolError : public Error {
public:
    std::string name;
    int line;
    UnknownSymbolError(const std::string& name_, int line_ = 0)
        : Error("unknown symbol '" + name_ + "'" +
                (line_ ? " at line " + std::to_string(line_) : "")),
          name(name_), line(line_) {}
};

class DuplicateNameError : public Error {
public:
    std::string name;
    explicit DuplicateNameError(const std::string& name_)
        : Error("duplicate name '" + name_ + "'"), name(name_) {}
};

class OverrideWithoutDynamicsError : public Error {
public:
    std::string name;
    explicit OverrideWithoutDynamicsError(const std::string& name_)
        : Error("equilibrium override for '" + name_ + "', which has no dynamics entry"),
          name(name_) {}
};

// ---- expression evaluation ----------------------------------------------

class UnboundSymbolError : public Error {
public:
    std::string name;
    explicit UnboundSymbolError(const std::string& name_)
        : Error("unbound symbol '" + name_ + "'"), name(name_) {}
};

class NonFiniteResultError : public Error {
public:
    NonFiniteResultError() : Error("expression evaluated to a non-finite value") {}
};

// ---- graph construction -------------------------------------------------

class DegenerateEquationError : public Error {
public:
    std::string label;
    explicit DegenerateEquationError(const std::string& label_)
        : Error("equation '" + label_ + "' mentions no endogenous variable"),
          label(label_) {}
};

/// No perfect matching between equations and variables. `witness` is a
/// Hall-violator set of equation labels whose joint neighbourhood has fewer
/// variables than equations (empty when no such certificate exists, e.g.
/// when variables outnumber equations).
class MatchingError : public Error {
public:
    enum class Kind { SizeMismatch, NoPerfectMatching, InvalidMatching };
    Kind kind;
    int n_vars = 0, n_eqs = 0, max_matching = 0;
    std::vector<std::string> witness;

    MatchingError(Kind kind_, int nv, int ne, int max_m, std::vector<std::string> w)
        : Error(describe(kind_, nv, ne, max_m, w)),
          kind(kind_), n_vars(nv), n_eqs(ne), max_matching(max_m), witness(std::move(w)) {}
    explicit MatchingError(const std::string& msg) : Error(msg), kind(Kind::InvalidMatching) {}

private:
    static std::string describe(Kind k, int nv, int ne, int max_m,
                                const std::vector<std::string>& w) {
        std::string s = k == Kind::SizeMismatch
                            ? "no perfect matching: " + std::to_string(nv) + " variables vs " +
                                  std::to_string(ne) + " equations"
                            : "no perfect matching (maximum matching covers " +
                                  std::to_string(max_m) + " of " + std::to_string(ne) +
                                  " equations)";
        if (!w.empty()) {
            s += "; Hall violator {";
            for (size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + w[i];
            s += "}";
        }
        return s;
    }
};

class TooLargeError : public Error {
public:
    explicit TooLargeError(const std::string& msg) : Error(msg) {}
};

class UnknownVertexError : public Error {
public:
    std::string name;
    explicit UnknownVertexError(const std::string& name_)
        : Error("unknown vertex '" + name_ + "'"), name(name_) {}
};

class NonDisjointSetsError : public Error {
public:
    NonDisjointSetsError() : Error("query sets are not disjoint") {}
};

// ---- adaptation ----------------------------------------------------------

class NoNaturalExtensionError : public Error {
public:
    NoNaturalExtensionError()
        : Error("no perfect matching extends the natural labelling "
                "(static residual subgraph is unmatchable)") {}
};

class NotApplicableError : public Error {
public:
    explicit NotApplicableError(const std::string& why)
        : Error("analysis not applicable: " + why) {}
};

class NoNaturalCounterpartError : public Error {
public:
    std::string label;
    explicit NoNaturalCounterpartError(const std::string& label_)
        : Error("equation '" + label_ + "' has no natural variable counterpart"),
          label(label_) {}
};

// ---- simulation -----------------------------------------------------------

class NonFiniteStateError : public Error {
public:
    double t;
    explicit NonFiniteStateError(double t_)
        : Error("state became non-finite at t = " + std::to_string(t_)), t(t_) {}
};

class InconsistentStaticsError : public Error {
public:
    explicit InconsistentStaticsError(const std::string& why)
        : Error("static equations not solvable by forward substitution: " + why) {}
};

class NoConvergenceError : public Error {
public:
    double t_max, residual;
    NoConvergenceError(double t_max_, double residual_)
        : Error(format(t_max_, residual_)), t_max(t_max_), residual(residual_) {}

private:
    static std::string format(double t_max, double residual) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "no equilibrium within t_max = %g (residual %.3g)",
                      t_max, residual);
        return buf;
    }
};

class SamplingError : public Error {
public:
    std::vector<int> failed_indices;
    SamplingError(std::vector<int> idx, const std::string& detail)
        : Error("equilibrium sampling failed for " + std::to_string(idx.size()) +
                " sample(s) [" + detail + "]"),
          failed_indices(std::move(idx)) {}
};

class UnknownParameterError : public Error {
public:
    std::string name;
    explicit UnknownParameterError(const std::string& name_)
        : Error("unknown parameter '" + name_ + "'"), name(name_) {}
};

// ---- statistics ------------------------------------------------------------

class StatError : public Error {
public:
    explicit StatError(const std::string& msg) : Error(msg) {}
};

class LengthMismatchError : public StatError {
public:
    LengthMismatchError() : StatError("input vectors have different lengths") {}
};

class ConstantInputError : public StatError {
public:
    ConstantInputError() : StatError("input vector is constant") {}
};

class TooFewSamplesError : public StatError {
public:
    TooFewSamplesError() : StatError("too few samples") {}
};

class SingularConditioningError : public StatError {
public:
    SingularConditioningError() : StatError("conditioning is numerically singular") {}
};

class ColumnMismatchError : public StatError {
public:
    explicit ColumnMismatchError(const std::string& msg) : StatError(msg) {}
};

} // namespace adaptscan
