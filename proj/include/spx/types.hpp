#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spx {

enum class Mode : uint8_t { ComplexPrincipal, RealPrincipal, RealBranch };

inline bool mode_real(Mode m) { return m != Mode::ComplexPrincipal; }

enum class Rel : uint8_t { LE, LT, GE, GT, EQ, NE };

inline const char* rel_str(Rel r) {
    switch (r) {
        case Rel::LE: return "<=";
        case Rel::LT: return "<";
        case Rel::GE: return ">=";
        case Rel::GT: return ">";
        case Rel::EQ: return "=";
        case Rel::NE: return "!=";
    }
    return "?";
}

// rel applied to (lhs - rhs) sign; tie_closed: value for sign == 0.
inline bool rel_apply(Rel r, int sgn) {
    switch (r) {
        case Rel::LE: return sgn <= 0;
        case Rel::LT: return sgn < 0;
        case Rel::GE: return sgn >= 0;
        case Rel::GT: return sgn > 0;
        case Rel::EQ: return sgn == 0;
        case Rel::NE: return sgn != 0;
    }
    return false;
}

// Input outside the supported fragment (too-deep logs, symbolic data the
// closed constant grammar cannot carry, ...).
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally singular request: ln/arctanh at a branch point, exp of a
// negative-degree series, division by the zero series.
struct SingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& what, size_t off) : std::runtime_error(what), offset(off) {}
};

// Collected while evaluating conditions near case boundaries.
struct EvalDiagnostics {
    std::vector<std::string> notes;
    void note(std::string s) { notes.push_back(std::move(s)); }
};

}  // namespace spx
