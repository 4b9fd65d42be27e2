#pragma once

#include "spx/branchlog.hpp"

namespace spx {

// Powers u^beta = L * c^beta * z^(alpha*beta) * (1+ratio)^beta where the
// unit factor L = (-1)^Lambda, Lambda = beta*Psi/pi mod 2, repairs the
// naive split of the principal power across the branch cut.  Lambda is
// assembled from the same ladder branchlog uses for ln: the wrap of
// arg(1+ratio) against the dominant term, the power-split cases on
// arg(c) + arg(z^alpha), and the floor cells of alpha*arg(z).

// How arg(x^e) rewrites on the real branch: x^e keeps the sign of x when
// the reduced numerator is odd, is nonnegative when it is even, and does
// not exist for x < 0 when the reduced denominator is even.
enum class ArgRewrite : uint8_t { Zero, ArgOfBase, Untouched };

inline ArgRewrite arg_real_branch(const Rational& e) {
    if (!e.has_odd_denominator()) return ArgRewrite::Untouched;
    return e.numerator_odd() ? ArgRewrite::ArgOfBase : ArgRewrite::Zero;
}

struct PowContext {
    Rational beta;
    Correction psi;             // additive ladder correction the exponent reduces
    CorrectionExponent lambda;  // beta * Psi / pi, atoms reduced mod 2
    UnitFactor l1;              // floor contribution
    UnitFactor l2;              // wrap + power-split contribution
    UnitFactor l;               // the full unit factor
    // Set when l only separates z = 0 from everything else: l = ell0 at
    // z = 0 and ellstar elsewhere.  Lets callers fold the factor into
    // coefficients instead of keeping a piecewise unit.
    std::optional<ConstantExpr> ell0, ellstar;
};

namespace detail {

// q such that v = q * pi * i, when v is on that lattice
inline std::optional<Rational> pi_i_multiple(const ConstantExpr& v) {
    if (v.is_zero()) return Rational(0);
    const auto& ts = v.terms();
    if (ts.size() != 1 || ts[0].factors.size() != 1) return std::nullopt;
    const auto& f = ts[0].factors[0];
    if (f.kind != ConstantExpr::FactorKind::Pi || f.e != Rational(1)) return std::nullopt;
    if (!ts[0].coeff.re.is_zero()) return std::nullopt;
    return ts[0].coeff.im;
}

// Branches of one atom are mutually exclusive, so any branch equal to the
// fallback can go; a caseless atom collapses to its constant.
inline void push_exp_case(CorrectionExponent& out, ExpCase c) {
    std::erase_if(c.cases, [&](const ExpCaseBranch& b) { return b.value == c.otherwise; });
    if (c.cases.empty()) {
        if (!c.otherwise.is_zero()) out.atoms.push_back(c.otherwise);
        return;
    }
    out.atoms.push_back(std::move(c));
}

// Truth value of a sign-based condition on the ray x < 0, x = 0 or x > 0;
// nullopt when the condition also depends on something else.
inline std::optional<bool> side_cond(const CondPtr& c, int side) {
    if (!c) return std::nullopt;
    switch (c->kind) {
        case Condition::Kind::True:
            return true;
        case Condition::Kind::IsZeroVar:
            return side == 0;
        case Condition::Kind::VarSign:
            switch (c->rel) {
                case Rel::LT: return side < 0;
                case Rel::LE: return side <= 0;
                case Rel::GT: return side > 0;
                case Rel::GE: return side >= 0;
                case Rel::EQ: return side == 0;
                case Rel::NE: return side != 0;
            }
            return std::nullopt;
        case Condition::Kind::Not: {
            auto k = side_cond(c->kids.at(0), side);
            if (!k) return std::nullopt;
            return !*k;
        }
        case Condition::Kind::And: {
            for (const CondPtr& k : c->kids) {
                auto v = side_cond(k, side);
                if (!v) return std::nullopt;
                if (!*v) return false;
            }
            return true;
        }
        case Condition::Kind::Or: {
            for (const CondPtr& k : c->kids) {
                auto v = side_cond(k, side);
                if (!v) return std::nullopt;
                if (*v) return true;
            }
            return false;
        }
        default:
            return std::nullopt;
    }
}

// Value of an additive correction on one real ray, in units of pi*i
inline std::optional<Rational> fold_side(const Correction& corr, int side) {
    Rational acc(0);
    for (const CorrAtom& a : corr.atoms) {
        if (std::holds_alternative<ConstantExpr>(a)) {
            auto q = pi_i_multiple(std::get<ConstantExpr>(a));
            if (!q) return std::nullopt;
            acc += *q;
        } else if (std::holds_alternative<CaseAtom>(a)) {
            const CaseAtom& at = std::get<CaseAtom>(a);
            if (at.otherwise_pm) return std::nullopt;
            std::optional<Rational> v = pi_i_multiple(at.otherwise);
            for (const CaseBranch& b : at.cases) {
                auto hit = side_cond(b.cond, side);
                if (!hit || b.pm) return std::nullopt;
                if (*hit) {
                    v = pi_i_multiple(b.value);
                    break;
                }
            }
            if (!v) return std::nullopt;
            acc += *v;
        } else {
            return std::nullopt;  // floor atoms never appear on the real rays
        }
    }
    return acc;
}

// A correction whose only distinction is the z = 0 sample: value q0 there,
// qs everywhere else.  Constants qualify; so does a single case atom whose
// conditions all test z = 0.
inline std::optional<std::pair<Rational, Rational>> omega_zero_split(const Correction& corr) {
    Rational q0(0), qs(0);
    for (const CorrAtom& a : corr.atoms) {
        if (std::holds_alternative<ConstantExpr>(a)) {
            auto q = pi_i_multiple(std::get<ConstantExpr>(a));
            if (!q) return std::nullopt;
            q0 += *q;
            qs += *q;
        } else if (std::holds_alternative<CaseAtom>(a)) {
            const CaseAtom& at = std::get<CaseAtom>(a);
            if (at.otherwise_pm) return std::nullopt;
            for (const CaseBranch& b : at.cases)
                if (b.pm || !b.cond || b.cond->kind != Condition::Kind::IsZeroVar)
                    return std::nullopt;
            auto vs = pi_i_multiple(at.otherwise);
            if (!vs) return std::nullopt;
            auto v0 = at.cases.empty() ? vs : pi_i_multiple(at.cases.front().value);
            if (!v0) return std::nullopt;
            q0 += *v0;
            qs += *vs;
        } else {
            return std::nullopt;
        }
    }
    return std::make_pair(q0, qs);
}

// value of the power-split cases at a known arg sum, in units of pi
inline Rational power_split_q(const Rational& sum_pi) {
    if (sum_pi <= Rational(-1)) return Rational(2);
    if (sum_pi > Rational(1)) return Rational(-2);
    return Rational(0);
}

// Minimal exponent atom taking value en for x < 0, e0 at x = 0, ep for
// x > 0, restricted to the constrained sides.  Inputs already mod 2.
inline void real_sides_exponent(CorrectionExponent& out, const Rational& en, const Rational& e0,
                                const Rational& ep, int real_sign) {
    if (real_sign < 0) {
        if (!en.is_zero()) out.atoms.push_back(en);
        return;
    }
    ExpCase c;
    c.coef = Rational(1);
    c.otherwise = ep;
    if (real_sign == 0) c.cases.push_back({Condition::var_sign(Rel::LT), en});
    c.cases.push_back({Condition::var_zero(), e0});
    push_exp_case(out, std::move(c));
}

// beta * (floor part of Psi) / pi mod 2: the cells of
// 2*floor(1/2 - alpha*arg(z)/(2 pi)) under the constraint
inline CorrectionExponent l1_exponent(const Rational& alpha, const Rational& beta,
                                      const Constraint& cc) {
    CorrectionExponent out;
    Rational tb = mods(Rational(2) * beta, Rational(2));
    if (tb.is_zero() || alpha.is_zero()) return out;
    if (cc.real) {
        Rational nneg = ((Rational(1) - alpha) / Rational(2)).floor();
        real_sides_exponent(out, mods(tb * nneg, Rational(2)), Rational(0), Rational(0),
                            cc.real_sign);
        return out;
    }
    PiInterval t = theta_interval(cc).scaled(alpha);
    if (auto n = floor_fold(t)) {
        Rational v = mods(tb * *n, Rational(2));
        if (!v.is_zero()) out.atoms.push_back(v);
        return out;
    }
    auto [nlo, nhi] = floor_cells(t);
    if (nlo == nhi + Rational(1)) {
        ExpCase c;
        c.coef = Rational(1);
        c.cases.push_back({Condition::arg_cmp(ArgLin::of_var(alpha), Rel::LE,
                                              Rational(1) - Rational(2) * nlo),
                           mods(tb * nlo, Rational(2))});
        c.otherwise = mods(tb * nhi, Rational(2));
        push_exp_case(out, std::move(c));
        return out;
    }
    ExpFloor fl;
    fl.coef = tb;
    fl.arg = ArgLin::of_var(alpha);
    out.atoms.push_back(std::move(fl));
    return out;
}

// beta * (Omega + power-split part of Psi) / pi mod 2.  When omega only
// separates z = 0 the wrap and the split stay independent cases; otherwise
// a single case on arg(c) + arg(z^alpha) + arg(1+ratio) covers both (that
// sum lies in (-3 pi, 3 pi], so one wrap in each direction suffices, and
// arg(0) = 0 keeps the z = 0 sample on the fallback).
inline CorrectionExponent l2_exponent(const PreparedBase& p, const Rational& beta,
                                      const Constraint& cc, const Correction& omega) {
    CorrectionExponent out;
    const Rational two(2);
    Rational vpos = mods(two * beta, two), vneg = mods(-two * beta, two);
    auto q = p.c.arg_over_pi_sym();
    const std::string& var = p.dom.var;
    Mode mode = p.dom.mode;

    if (cc.real && q) {
        auto wn = fold_side(omega, -1), w0 = fold_side(omega, 0), wp = fold_side(omega, 1);
        if (wn && w0 && wp) {
            Rational en = mods(beta * (*wn + power_split_q(*q + mods(p.alpha, two))), two);
            Rational e0 = mods(beta * *w0, two);  // arg(0) = 0: no split at the origin
            Rational ep = mods(beta * (*wp + power_split_q(*q)), two);
            real_sides_exponent(out, en, e0, ep, cc.real_sign);
            return out;
        }
    }

    if (auto zs = omega_zero_split(omega)) {
        auto [q0, qs] = *zs;
        ExpCase wrap;
        wrap.coef = Rational(1);
        wrap.cases.push_back({Condition::var_zero(), mods(beta * q0, two)});
        wrap.otherwise = mods(beta * qs, two);
        push_exp_case(out, std::move(wrap));
        if (p.alpha.is_zero()) return out;  // arg(c) alone never wraps

        ArgLin lhs;
        bool omit_pos = false, omit_neg = false;
        if (q) {
            lhs.offset_pi = *q;
            PiInterval sum = upsilon_interval(p.alpha, cc).shifted(*q);
            omit_pos = sum.above(Rational(-1));
            omit_neg = sum.at_most(Rational(1));
        } else {
            lhs.add(Rational(1), sptr(Series::constant(var, mode, p.c)));
        }
        lhs.add(Rational(1), sptr(Series::monomial(var, mode, Coefficient::one(), p.alpha)));
        ExpCase split;
        split.coef = Rational(1);
        split.otherwise = Rational(0);
        if (!omit_pos) split.cases.push_back({Condition::arg_cmp(lhs, Rel::LE, Rational(-1)), vpos});
        if (!omit_neg) split.cases.push_back({Condition::arg_cmp(lhs, Rel::GT, Rational(1)), vneg});
        if (!split.cases.empty()) push_exp_case(out, std::move(split));
        return out;
    }

    ArgLin lhs;
    bool omit_pos = false, omit_neg = false;
    if (q) {
        lhs.offset_pi = *q;
        PiInterval ubase = p.alpha.is_zero() ? PiInterval::point(Rational(0))
                                             : upsilon_interval(p.alpha, cc);
        PiInterval sum = ubase.shifted(*q) + PiInterval{Rational(-1), Rational(1), true, false};
        omit_pos = sum.above(Rational(-1));
        omit_neg = sum.at_most(Rational(1));
    } else {
        lhs.add(Rational(1), sptr(Series::constant(var, mode, p.c)));
    }
    if (!p.alpha.is_zero())
        lhs.add(Rational(1), sptr(Series::monomial(var, mode, Coefficient::one(), p.alpha)));
    lhs.add(Rational(1), sptr(one_plus(p.ratio)));
    ExpCase merged;
    merged.coef = Rational(1);
    merged.otherwise = Rational(0);
    if (!omit_pos) merged.cases.push_back({Condition::arg_cmp(lhs, Rel::LE, Rational(-1)), vpos});
    if (!omit_neg) merged.cases.push_back({Condition::arg_cmp(lhs, Rel::GT, Rational(1)), vneg});
    if (!merged.cases.empty()) push_exp_case(out, std::move(merged));
    return out;
}

// Value of one exponent atom on a real ray, nullopt when it is not ray-constant
inline std::optional<Rational> exp_atom_side(const ExpAtom& a, int side) {
    if (std::holds_alternative<Rational>(a)) return std::get<Rational>(a);
    if (std::holds_alternative<ExpFloor>(a)) return std::nullopt;
    const ExpCase& c = std::get<ExpCase>(a);
    Rational v = c.otherwise;
    for (const ExpCaseBranch& b : c.cases) {
        auto hit = side_cond(b.cond, side);
        if (!hit) return std::nullopt;
        if (*hit) {
            v = b.value;
            break;
        }
    }
    return c.coef * v;
}

// Merge several sign-based exponent atoms into one minimal per-side atom
inline void fold_real_lambda(CorrectionExponent& e, const Constraint& cc) {
    if (!cc.real || e.atoms.size() < 2) return;
    Rational s[3];
    for (int k = 0; k < 3; ++k) {
        Rational acc(0);
        for (const ExpAtom& a : e.atoms) {
            auto v = exp_atom_side(a, k - 1);
            if (!v) return;
            acc += *v;
        }
        s[k] = mods(acc, Rational(2));
    }
    CorrectionExponent folded;
    real_sides_exponent(folded, s[0], s[1], s[2], cc.real_sign);
    e = std::move(folded);
}

// (-1)^exponent as a unit factor, resolving case atoms to their values so
// piecewise factors read as +-1 or +-i.  Branches sharing one value merge
// into a disjunction.
inline UnitFactor unit_from_exponent(const CorrectionExponent& e) {
    Rational csum(0);
    CorrectionExponent rest;
    std::vector<UnitCases> resolved;
    for (const ExpAtom& a : e.atoms) {
        if (std::holds_alternative<Rational>(a)) {
            csum += std::get<Rational>(a);
        } else if (std::holds_alternative<ExpFloor>(a)) {
            rest.atoms.push_back(a);
        } else {
            const ExpCase& c = std::get<ExpCase>(a);
            UnitCases uc;
            uc.otherwise = ConstantExpr::neg_one_pow(c.coef * c.otherwise);
            bool uniform = true;
            for (const ExpCaseBranch& b : c.cases) {
                uc.cases.push_back({b.cond, ConstantExpr::neg_one_pow(c.coef * b.value), false});
                if (b.value != c.cases.front().value) uniform = false;
            }
            if (uniform && uc.cases.size() > 1) {
                std::vector<CondPtr> kids;
                for (const CaseBranch& b : uc.cases) kids.push_back(b.cond);
                ConstantExpr v = uc.cases.front().value;
                uc.cases = {{Condition::disj(std::move(kids)), std::move(v), false}};
            }
            resolved.push_back(std::move(uc));
        }
    }
    csum = mods(csum, Rational(2));
    if (!csum.is_zero()) rest.atoms.insert(rest.atoms.begin(), csum);
    UnitFactor u;
    if (!rest.atoms.empty()) u.atoms.push_back(std::move(rest));
    for (UnitCases& uc : resolved) u.atoms.push_back(std::move(uc));
    return u;
}

// Constant value of a unit factor, when it has no piecewise part
inline std::optional<ConstantExpr> constant_unit_value(const UnitFactor& u) {
    ConstantExpr v = ConstantExpr::one();
    for (const UnitAtom& a : u.atoms) {
        if (!std::holds_alternative<CorrectionExponent>(a)) return std::nullopt;
        for (const ExpAtom& x : std::get<CorrectionExponent>(a).atoms) {
            if (!std::holds_alternative<Rational>(x)) return std::nullopt;
            v *= ConstantExpr::neg_one_pow(std::get<Rational>(x));
        }
    }
    return v;
}

// Integer power of a unit factor: exponent atoms scale by m (mod 2), case
// values are powered in place.  Atoms that collapse to 1 drop out.
inline UnitFactor unit_pow(const UnitFactor& u, const Rational& m) {
    UnitFactor out;
    for (const UnitAtom& a : u.atoms) {
        if (std::holds_alternative<CorrectionExponent>(a)) {
            CorrectionExponent e;
            for (const ExpAtom& x : std::get<CorrectionExponent>(a).atoms) {
                if (std::holds_alternative<Rational>(x)) {
                    Rational q = mods(m * std::get<Rational>(x), Rational(2));
                    if (!q.is_zero()) e.atoms.push_back(std::move(q));
                } else if (std::holds_alternative<ExpFloor>(x)) {
                    ExpFloor f = std::get<ExpFloor>(x);
                    f.coef = mods(m * f.coef, Rational(2));
                    if (!f.coef.is_zero()) e.atoms.push_back(std::move(f));
                } else {
                    ExpCase c = std::get<ExpCase>(x);
                    c.coef = m * c.coef;
                    bool dead = (c.coef * c.otherwise).is_integer() &&
                                mods(c.coef * c.otherwise, Rational(2)).is_zero();
                    for (const ExpCaseBranch& b : c.cases)
                        dead = dead && (c.coef * b.value).is_integer() &&
                               mods(c.coef * b.value, Rational(2)).is_zero();
                    if (!dead) e.atoms.push_back(std::move(c));
                }
            }
            if (!e.atoms.empty()) out.atoms.push_back(std::move(e));
        } else {
            UnitCases c = std::get<UnitCases>(a);
            bool dead = true;
            c.otherwise = c.otherwise.pow_rational(m);
            dead = dead && compare(c.otherwise, ConstantExpr::one()) == 0;
            for (CaseBranch& b : c.cases) {
                b.value = b.value.pow_rational(m);
                b.pm = b.pm && !mods(m, Rational(2)).is_zero();
                dead = dead && compare(b.value, ConstantExpr::one()) == 0;
            }
            if (!dead) out.atoms.push_back(std::move(c));
        }
    }
    return out;
}

// Detect a factor whose only distinction is z = 0 and record both values
inline void zero_separate(PowContext& ctx) {
    ConstantExpr v0 = ConstantExpr::one(), vs = ConstantExpr::one();
    bool piecewise = false;
    for (const UnitAtom& a : ctx.l.atoms) {
        if (std::holds_alternative<CorrectionExponent>(a)) {
            for (const ExpAtom& x : std::get<CorrectionExponent>(a).atoms) {
                if (!std::holds_alternative<Rational>(x)) return;
                ConstantExpr c = ConstantExpr::neg_one_pow(std::get<Rational>(x));
                v0 *= c;
                vs *= c;
            }
        } else {
            const UnitCases& c = std::get<UnitCases>(a);
            if (c.cases.empty()) return;
            for (const CaseBranch& b : c.cases)
                if (b.pm || !b.cond || b.cond->kind != Condition::Kind::IsZeroVar) return;
            v0 *= c.cases.front().value;
            vs *= c.otherwise;
            piecewise = true;
        }
    }
    if (!piecewise || compare(v0, vs) == 0) return;
    ctx.ell0 = std::move(v0);
    ctx.ellstar = std::move(vs);
}

}  // namespace detail

// Unit factor analysis for u^beta about 0.  RealBranch powers carry no
// principal-branch ladder; their factor comes from comparing the real
// sign of u^beta against the sign of the split representation.
inline PowContext pow_context(const PreparedBase& p, const Rational& beta, Mode mode,
                              const Constraint& cc_in) {
    PowContext ctx;
    ctx.beta = beta;
    ctx.psi.role = Role::Psi;
    ctx.l1 = UnitFactor::one();
    ctx.l2 = UnitFactor::one();
    ctx.l = UnitFactor::one();
    if (beta.is_integer()) return ctx;

    Constraint cc = effective_constraint(mode, cc_in);

    if (mode == Mode::RealBranch) {
        auto sc = p.c.sign_sym();
        if (!sc || *sc == 0)
            throw UnsupportedError("real branch power of a sign-ambiguous coefficient");
        if (!p.ldeg.is_zero())
            throw UnsupportedError("real branch power with a logarithmic leading coefficient");
        if (!all_coeffs_real_scalar(p.ratio))
            throw UnsupportedError("real branch power of a series with nonreal terms");
        bool even_root = !beta.has_odd_denominator();
        Rational lead_e = p.alpha * beta;
        // x < 0 exists for the representation only if every power of x in
        // it survives the real branch
        ArgRewrite ra = arg_real_branch(p.alpha);
        ArgRewrite rl = arg_real_branch(lead_e);
        bool neg_ok = ra != ArgRewrite::Untouched && rl != ArgRewrite::Untouched;
        for (const auto& [e, c] : p.ratio.terms)
            if (!(e + p.alpha).has_odd_denominator()) neg_ok = false;
        int su_neg = 0;
        if (neg_ok) su_neg = *sc * (ra == ArgRewrite::ArgOfBase ? -1 : 1);
        bool pos_alive = !even_root || *sc > 0;
        bool neg_alive = neg_ok && (!even_root || su_neg > 0);
        bool want_pos = cc.real_sign >= 0, want_neg = cc.real_sign <= 0;
        if (!(want_pos && pos_alive) && !(want_neg && neg_alive))
            throw UnsupportedError("power is not real on the requested side of 0");
        if (neg_alive) {
            int par = beta.numerator_odd() ? -1 : 1;      // sign(t^beta) for t < 0
            int true_neg = even_root ? 1 : (su_neg < 0 ? par : 1);
            int cb_sign = *sc > 0 ? 1 : par;              // sign of the c^beta the split uses
            int rep_neg = cb_sign * (rl == ArgRewrite::ArgOfBase ? -1 : 1);
            if (true_neg != rep_neg) {
                if (cc.real_sign < 0) {
                    ctx.l = UnitFactor::neg_one_to(CorrectionExponent::constant(Rational(1)));
                } else {
                    UnitCases uc;
                    uc.cases.push_back(
                        {Condition::var_sign(Rel::LT), ConstantExpr::from(-1), false});
                    uc.otherwise = ConstantExpr::one();
                    ctx.l = UnitFactor::piecewise(std::move(uc));
                }
                ctx.l2 = ctx.l;
            }
        }
        return ctx;
    }

    if (!p.ldeg.is_zero()) {
        // (c l^d z^alpha)^beta splits cleanly only as (c ln z)^beta =
        // c^beta ln(z)^beta with c > 0; then just the wrap of the ratio
        // against the dominant term can correct the split.
        auto sc = p.c.sign_sym();
        if (!p.alpha.is_zero() || p.ldeg != Rational(1) || !sc || *sc <= 0)
            throw UnsupportedError("fractional power with a logarithmic leading coefficient");
        ArgLin lhs;
        lhs.add(Rational(1), sptr(one_plus(p.ratio)));
        lhs.add(Rational(1), sptr(p.dom));
        ExpCase wrap;
        wrap.coef = Rational(1);
        wrap.otherwise = Rational(0);
        wrap.cases.push_back({Condition::arg_cmp(lhs, Rel::LE, Rational(-1)),
                              mods(Rational(2) * beta, Rational(2))});
        wrap.cases.push_back({Condition::arg_cmp(lhs, Rel::GT, Rational(1)),
                              mods(Rational(-2) * beta, Rational(2))});
        CaseAtom at;
        at.cases.push_back({wrap.cases[0].cond, ConstantExpr::pi_i_times(Rational(2))});
        at.cases.push_back({wrap.cases[1].cond, ConstantExpr::pi_i_times(Rational(-2))});
        ctx.psi = case_correction(std::move(at), Role::Psi);
        detail::push_exp_case(ctx.lambda, std::move(wrap));
        ctx.l2 = detail::unit_from_exponent(ctx.lambda);
        ctx.l = ctx.l2;
        return ctx;
    }

    Correction omega = omega_correction(p, mode, cc_in);
    ctx.psi = psi_correction(p, mode, cc_in);
    CorrectionExponent e1 = detail::l1_exponent(p.alpha, beta, cc);
    CorrectionExponent e2 = detail::l2_exponent(p, beta, cc, omega);
    ctx.l1 = detail::unit_from_exponent(e1);
    ctx.l2 = detail::unit_from_exponent(e2);
    ctx.lambda = std::move(e1);
    for (ExpAtom& a : e2.atoms) ctx.lambda.atoms.push_back(std::move(a));
    detail::fold_real_lambda(ctx.lambda, cc);
    ctx.l = detail::unit_from_exponent(ctx.lambda);
    detail::zero_separate(ctx);
    return ctx;
}

inline UnitFactor unit_factor(const SplitSeries& sp, const Rational& beta, Mode mode,
                              const Constraint& cc = {}) {
    if (beta.is_integer()) return UnitFactor::one();
    return pow_context(prepare_base(sp, sp.g.var, mode), beta, mode, cc).l;
}

// Unit factor and exponent of (w^alpha)^beta = factor * w^(alpha*beta):
// factor = (-1)^(2 beta floor(1/2 - alpha arg(w) / (2 pi))).
struct PowerOfPower {
    UnitFactor factor;
    Rational exponent;
};

inline PowerOfPower power_of_power(const Series& w, const Rational& alpha, const Rational& beta,
                                   const Constraint& cc = {}) {
    PowerOfPower out{UnitFactor::one(), alpha * beta};
    Rational tb = mods(Rational(2) * beta, Rational(2));
    if (tb.is_zero() || alpha.is_zero()) return out;
    bool bare_var = !w.global && w.order == std::nullopt && w.terms.size() == 1 &&
                    w.terms.begin()->first == Rational(1);
    if (bare_var) {
        auto s = w.terms.begin()->second.pure_scalar();
        bare_var = s && s->is_one();
    }
    CorrectionExponent e;
    if (bare_var) {
        e = detail::l1_exponent(alpha, beta, effective_constraint(w.mode, cc));
    } else {
        ExpFloor fl;
        fl.coef = tb;
        fl.arg = ArgLin::of(alpha, sptr(w));
        e.atoms.push_back(std::move(fl));
    }
    out.factor = detail::unit_from_exponent(e);
    return out;
}

namespace detail {

inline Series capped(Series s, const Rational& n) {
    if (s.order && *s.order <= n) return s;
    if (!s.order && (s.terms.empty() || std::prev(s.terms.end())->first <= n)) return s;
    return s.truncated(n);
}

}  // namespace detail

// Truncated power of a series about 0, correct across the cut: terms up to
// and including z^n.  Integer powers multiply out; fractional powers split
// off the dominant monomial, expand the binomial tail, and attach the unit
// factor (folded into the coefficients when it only separates z = 0).
inline Series pow_series(const Series& src_in, const Rational& beta, const Rational& n,
                         const Constraint& cc = {}) {
    if (beta.is_integer() && !src_in.is_zero() && src_in.global &&
        !src_in.global->trivially_one()) {
        // integer powers act on the factor directly; distributing it would
        // tie every coefficient to the same piecewise unit
        Series bare = src_in;
        bare.global.reset();
        Series out = pow_series(bare, beta, n, cc);
        UnitFactor g = detail::unit_pow(*src_in.global, beta);
        if (out.global) g *= *out.global;
        if (!g.trivially_one())
            out.global = std::move(g);
        else
            out.global.reset();
        return out;
    }
    Series src = src_in.distributed();
    const Mode mode = src.mode;
    if (src.is_zero()) {
        if (beta.sign() <= 0) throw SingularError("zero series to a non-positive power");
        if (src.is_exact()) return src;
        return Series::zero_to(src.var, mode, *src.order * beta);
    }
    if (beta.is_zero()) return Series::constant(src.var, mode, ConstantExpr::one());
    if (beta.is_integer() && beta.sign() > 0) {
        Series acc = Series::constant(src.var, mode, ConstantExpr::one());
        Series base = std::move(src);
        Rational e = beta;
        while (!e.is_zero()) {
            if (!mods(e, Rational(2)).is_zero()) {
                acc = detail::capped(acc * base, n);
                e -= Rational(1);
            }
            e = e / Rational(2);
            if (!e.is_zero()) base = detail::capped(base * base, n);
        }
        return acc;
    }

    PreparedBase p = prepare_base(src);
    Rational lead_e = p.alpha * beta;
    if (n < lead_e) return Series::zero_to(src.var, mode, n);
    Rational n_rel = n - lead_e;

    // The case conditions must not see terms the truncation order cannot
    // support, so cap the ratio first (keeping exactness when nothing goes).
    Series rat = p.ratio.truncated(n_rel);
    if (p.ratio.is_exact() && rat.terms.size() == p.ratio.terms.size()) rat = p.ratio;
    p.ratio = std::move(rat);

    PowContext px = pow_context(p, beta, mode, cc);

    ConstantExpr cb;
    try {
        if (mode == Mode::RealBranch && !beta.is_integer() && *p.c.sign_sym() < 0) {
            cb = (-p.c).pow_rational(beta);
            if (beta.numerator_odd()) cb = cb * ConstantExpr::from(-1);
        } else {
            cb = p.c.pow_rational(beta);
        }
    } catch (const std::domain_error& e) {
        throw UnsupportedError(e.what());
    }

    Coefficient lead = Coefficient::lpow(cb, p.ldeg * beta);
    Series head = Series::monomial(src.var, mode, lead, lead_e);
    Series res;
    if (p.ratio.is_zero() && p.ratio.is_exact())
        res = std::move(head);
    else
        res = head * analytic_compose(Kernel::Binom, p.ratio, n_rel, beta);
    res = detail::capped(std::move(res), n);

    if (px.l.trivially_one()) return res;
    if (auto cv = detail::constant_unit_value(px.l)) {
        if (!cv->is_one()) res = res.scaled(*cv);
        return res;
    }
    if (px.ellstar) {
        if (!res.terms.empty() && res.terms.begin()->first.sign() > 0)
            return res.scaled(*px.ellstar);
        Series out = Series::zero_exact(res.var, mode);
        out.order = res.order;
        bool folded = true;
        for (const auto& [e, c] : res.terms) {
            if (e.sign() > 0) {
                out.insert_term(e, c.scaled(*px.ellstar));
            } else if (auto s = c.pure_scalar(); s && e.is_zero()) {
                CaseAtom at;
                at.cases.push_back({Condition::var_zero(), *s * *px.ell0, false});
                at.otherwise = *s * *px.ellstar;
                Coefficient pc;
                pc.corr = case_correction(std::move(at), Role::Xi);
                out.insert_term(e, pc);
            } else {
                folded = false;
                break;
            }
        }
        if (folded) return out;
    }
    res.global = px.l;
    return res;
}

}  // namespace spx
