#pragma once

#include <optional>
#include <variant>

#include "spx/condition.hpp"

namespace spx {

// Which construction produced an additive correction; checked by the
// property suites (omega-role values lie in {-2*pi*i, 0, 2*pi*i} and vanish
// at z = 0).
enum class Role : uint8_t {
    Upsilon,       // tie case inside ln of the dominant coefficient
    Omega,         // unsplit ln(c z^alpha) correction
    OmegaReal,
    OmegaPiZero,   // alpha = 0, arg c = pi
    Phi,           // coefficient-split correction
    Psi,           // fully split correction
    Xi,            // power extraction
    InverseAdd,    // inverse-function additive terms
    None,
};

// scale * floor(1/2 - A/(2*pi)) where A is an arg-linear combination.
struct FloorAtom {
    ConstantExpr scale;
    ArgLin arg;
};

// First-true-wins cases; `pm` marks a value the source defines only up to
// sign (legal at isolated points like z = 0).
struct CaseBranch {
    CondPtr cond;
    ConstantExpr value;
    bool pm = false;
};

struct CaseAtom {
    std::vector<CaseBranch> cases;
    ConstantExpr otherwise;
    bool otherwise_pm = false;
};

using CorrAtom = std::variant<ConstantExpr, FloorAtom, CaseAtom>;

// Additive piecewise-constant part of a coefficient; the sum of its atoms.
struct Correction {
    std::vector<CorrAtom> atoms;
    Role role = Role::None;

    bool trivially_zero() const {
        if (!atoms.empty()) return false;
        return true;
    }
    static Correction constant(ConstantExpr c, Role role) {
        Correction k;
        if (!c.is_zero()) k.atoms.push_back(std::move(c));
        k.role = role;
        return k;
    }
    Correction& append(CorrAtom a) {
        atoms.push_back(std::move(a));
        return *this;
    }
};

// Rational-valued exponent of (-1): constant + floors + cases, reduced
// mod 2 at evaluation.
struct ExpFloor {
    Rational coef;
    ArgLin arg;  // coef * floor(1/2 - arg/(2*pi))
};
struct ExpCaseBranch {
    CondPtr cond;
    Rational value;
};
struct ExpCase {
    Rational coef;
    std::vector<ExpCaseBranch> cases;
    Rational otherwise;
};
using ExpAtom = std::variant<Rational, ExpFloor, ExpCase>;

struct CorrectionExponent {
    std::vector<ExpAtom> atoms;

    static CorrectionExponent constant(Rational q) {
        CorrectionExponent e;
        if (!q.is_zero()) e.atoms.push_back(std::move(q));
        return e;
    }
};

// Multiplicative unit-magnitude factor: a product of (-1)^exponent atoms
// and resolved piecewise unit values.
struct UnitCases {
    std::vector<CaseBranch> cases;
    ConstantExpr otherwise;
};
using UnitAtom = std::variant<CorrectionExponent, UnitCases>;

struct UnitFactor {
    std::vector<UnitAtom> atoms;

    bool trivially_one() const { return atoms.empty(); }
    static UnitFactor one() { return {}; }
    static UnitFactor neg_one_to(CorrectionExponent e) {
        UnitFactor u;
        if (!e.atoms.empty()) u.atoms.push_back(std::move(e));
        return u;
    }
    static UnitFactor piecewise(UnitCases c) {
        UnitFactor u;
        u.atoms.push_back(std::move(c));
        return u;
    }
    UnitFactor& operator*=(const UnitFactor& o) {
        for (const UnitAtom& a : o.atoms) atoms.push_back(a);
        return *this;
    }
};

}  // namespace spx
