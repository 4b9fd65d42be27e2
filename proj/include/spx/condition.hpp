#pragma once

#include <memory>
#include <vector>

#include "spx/constant.hpp"
#include "spx/types.hpp"

namespace spx {

struct Series;
using SeriesPtr = std::shared_ptr<const Series>;

// Rational linear combination of principal arguments plus a rational
// multiple of pi:  sum_k coef_k * arg(P_k(z)) + offset*pi.  A null P means
// arg(var) itself.
struct ArgLin {
    struct Piece {
        Rational coef;
        SeriesPtr arg_of;  // null: the expansion variable
    };
    std::vector<Piece> pieces;
    Rational offset_pi;

    static ArgLin of_var(Rational coef) {
        ArgLin a;
        a.pieces.push_back({std::move(coef), nullptr});
        return a;
    }
    static ArgLin of(Rational coef, SeriesPtr p) {
        ArgLin a;
        a.pieces.push_back({std::move(coef), std::move(p)});
        return a;
    }
    ArgLin& add(Rational coef, SeriesPtr p) {
        pieces.push_back({std::move(coef), std::move(p)});
        return *this;
    }
    ArgLin& shift_pi(const Rational& q) {
        offset_pi += q;
        return *this;
    }
};

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;

struct Condition {
    enum class Kind : uint8_t { True, ArgCmp, SignCmp, VarSign, IsZeroVar, And, Or, Not };

    Kind kind = Kind::True;

    // ArgCmp: lhs rel bound*pi, optionally after mods(lhs, 2pi)
    ArgLin lhs;
    Rel rel = Rel::LE;
    Rational bound_pi;
    bool reduce_mods = false;

    // SignCmp: (re_part ? Re : Im)(P(z)) rel 0
    bool re_part = false;
    SeriesPtr sign_of;

    // VarSign reuses rel (vs 0, real modes); IsZeroVar: z = 0 exactly.

    std::vector<CondPtr> kids;  // And / Or / Not

    static CondPtr make_true() {
        return std::make_shared<Condition>();
    }
    static CondPtr arg_cmp(ArgLin lhs, Rel rel, Rational bound_pi, bool reduce = false) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::ArgCmp;
        c->lhs = std::move(lhs);
        c->rel = rel;
        c->bound_pi = std::move(bound_pi);
        c->reduce_mods = reduce;
        return c;
    }
    static CondPtr sign_cmp(bool re_part, SeriesPtr p, Rel rel) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::SignCmp;
        c->re_part = re_part;
        c->sign_of = std::move(p);
        c->rel = rel;
        return c;
    }
    static CondPtr var_sign(Rel rel) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::VarSign;
        c->rel = rel;
        return c;
    }
    static CondPtr var_zero() {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::IsZeroVar;
        return c;
    }
    static CondPtr conj(std::vector<CondPtr> kids) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::And;
        c->kids = std::move(kids);
        return c;
    }
    static CondPtr disj(std::vector<CondPtr> kids) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::Or;
        c->kids = std::move(kids);
        return c;
    }
    static CondPtr negate(CondPtr k) {
        auto c = std::make_shared<Condition>();
        c->kind = Kind::Not;
        c->kids = {std::move(k)};
        return c;
    }
};

// Assumptions on the expansion variable: realness (and sign) or an
// arg-range (lo, hi] in units of pi.
struct Constraint {
    bool real = false;
    int real_sign = 0;       // 0: unrestricted real; +1: x>0; -1: x<0
    Rational arg_lo_pi = Rational(-1);  // range (lo, hi], subset of (-pi, pi]
    Rational arg_hi_pi = Rational(1);

    static Constraint none() { return {}; }
    static Constraint real_var(int sign = 0) {
        Constraint c;
        c.real = true;
        c.real_sign = sign;
        if (sign > 0) {
            c.arg_lo_pi = Rational(0);  // arg = 0 only; lo is open so use (-0..0]? keep [0,0]
            c.arg_hi_pi = Rational(0);
        } else if (sign < 0) {
            c.arg_lo_pi = Rational(1);
            c.arg_hi_pi = Rational(1);
        }
        return c;
    }
    static Constraint arg_range(Rational lo, Rational hi) {
        Constraint c;
        c.arg_lo_pi = std::move(lo);
        c.arg_hi_pi = std::move(hi);
        return c;
    }

    // Possible args of the variable, as closed pi-multiples [lo, hi].
    // Real unrestricted: {0, pi} which we bound as [0, pi].
    std::pair<Rational, Rational> arg_interval() const {
        if (real) {
            if (real_sign > 0) return {Rational(0), Rational(0)};
            if (real_sign < 0) return {Rational(1), Rational(1)};
            return {Rational(0), Rational(1)};
        }
        return {arg_lo_pi, arg_hi_pi};
    }
};

}  // namespace spx
