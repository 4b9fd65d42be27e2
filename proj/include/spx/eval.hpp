#pragma once

#include "spx/series.hpp"

namespace spx {

// r e^(i pi t) with points on the four half-axes built exactly
inline ComplexFloat polar_pi(const BigFloat& mag, const Rational& t_in, long prec) {
    Rational t = mods(t_in, Rational(2));
    long p = std::max(prec, mag.prec());
    if (t.is_zero()) return ComplexFloat::real(mag);
    if (t == Rational(1)) return ComplexFloat::real(-mag);
    if (t == Rational(1, 2)) return {BigFloat(p), mag};
    if (t == Rational(-1, 2)) return {BigFloat(p), -mag};
    return ComplexFloat::polar(mag, BigFloat::pi(p) * BigFloat::from(t, p));
}

// A sample location that can be re-materialized at any precision (needed
// for escalation near case boundaries).  Exact Gaussian-rational points
// additionally enable exact condition decisions.
struct PointValue {
    enum class Kind : uint8_t { Exact, Polar, Float } kind = Kind::Exact;
    GaussianRational exact;   // Kind::Exact
    Rational r, theta_pi;     // Kind::Polar: z = r * e^(i pi theta_pi)
    ComplexFloat num;         // Kind::Float

    static PointValue from_exact(GaussianRational g) {
        PointValue p;
        p.kind = Kind::Exact;
        p.exact = std::move(g);
        return p;
    }
    static PointValue polar(Rational r, Rational theta_pi) {
        PointValue p;
        p.kind = Kind::Polar;
        p.r = std::move(r);
        p.theta_pi = std::move(theta_pi);
        return p;
    }
    static PointValue from_float(ComplexFloat z) {
        PointValue p;
        p.kind = Kind::Float;
        p.num = std::move(z);
        return p;
    }

    bool is_zero() const {
        switch (kind) {
            case Kind::Exact: return exact.is_zero();
            case Kind::Polar: return r.is_zero();
            case Kind::Float: return num.is_zero();
        }
        return false;
    }
    // the point as an exact Gaussian rational; covers polar samples lying
    // on one of the four half-axes
    std::optional<GaussianRational> exact_point() const {
        switch (kind) {
            case Kind::Exact:
                return exact;
            case Kind::Polar: {
                Rational t = mods(theta_pi, Rational(2));
                if (t.is_zero()) return GaussianRational(r);
                if (t == Rational(1)) return GaussianRational(-r);
                if (t == Rational(1, 2)) return GaussianRational(Rational(0), r);
                if (t == Rational(-1, 2)) return GaussianRational(Rational(0), -r);
                return std::nullopt;
            }
            case Kind::Float:
                return std::nullopt;
        }
        return std::nullopt;
    }
    bool can_escalate() const { return kind != Kind::Float; }

    // sign of z when z lies on the real axis, nullopt otherwise
    std::optional<int> real_sign() const {
        switch (kind) {
            case Kind::Exact:
                if (!exact.im.is_zero()) return std::nullopt;
                return exact.re.sign();
            case Kind::Polar: {
                if (r.is_zero()) return 0;
                Rational t = mods(theta_pi, Rational(2));
                if (t.is_zero()) return r.sign();
                if (t == Rational(1)) return -r.sign();
                return std::nullopt;
            }
            case Kind::Float:
                if (!num.im.is_zero()) return std::nullopt;
                return num.re.sign();
        }
        return std::nullopt;
    }

    // z as a real float when it lies exactly on the real axis
    std::optional<BigFloat> real_value(long prec) const {
        std::optional<int> s = real_sign();
        if (!s) return std::nullopt;
        switch (kind) {
            case Kind::Exact:
                return BigFloat::from(exact.re, prec);
            case Kind::Polar: {
                BigFloat m = BigFloat::from(r, prec);
                return mods(theta_pi, Rational(2)).is_zero() ? m : -m;
            }
            case Kind::Float:
                return num.re;
        }
        return std::nullopt;
    }

    ComplexFloat value(long prec) const {
        switch (kind) {
            case Kind::Exact:
                return ComplexFloat::from(exact, prec);
            case Kind::Polar:
                return polar_pi(BigFloat::from(r, prec), theta_pi, prec);
            case Kind::Float:
                return num;
        }
        return ComplexFloat::nan(prec);
    }
};

struct EvalCtx {
    long prec = kDefaultPrec;
    Mode mode = Mode::ComplexPrincipal;
    EvalDiagnostics* diag = nullptr;

    void note(const std::string& s) const {
        if (diag) diag->note(s);
    }
};

bool cond_eval(const CondPtr& c, const PointValue& z, const EvalCtx& ctx);
ComplexFloat series_eval(const Series& s, const PointValue& z, const EvalCtx& ctx);
std::optional<GaussianRational> series_eval_exact(const Series& s, const GaussianRational& z0,
                                                  const EvalCtx& ctx);
ConstantExpr correction_eval(const Correction& k, const PointValue& z, const EvalCtx& ctx);
ConstantExpr unit_eval(const UnitFactor& u, const PointValue& z, const EvalCtx& ctx);

// --- exact paths ---

// arg(P(z))/pi for the linear combination, when every piece admits an exact
// Gaussian value on one of the eight exact rays.
inline std::optional<Rational> arglin_exact_pi(const ArgLin& a, const GaussianRational& z0,
                                               const EvalCtx& ctx) {
    Rational acc = a.offset_pi;
    for (const ArgLin::Piece& p : a.pieces) {
        std::optional<Rational> q;
        if (!p.arg_of) {
            q = z0.arg_over_pi();
        } else {
            auto v = series_eval_exact(*p.arg_of, z0, ctx);
            if (!v) return std::nullopt;
            q = v->arg_over_pi();
        }
        if (!q) return std::nullopt;
        acc += p.coef * *q;
    }
    return acc;
}

// --- numeric paths ---

inline BigFloat arglin_value(const ArgLin& a, const PointValue& z, long prec, const EvalCtx& ctx) {
    EvalCtx sub = ctx;
    sub.prec = prec;
    BigFloat acc = BigFloat::pi(prec) * BigFloat::from(a.offset_pi, prec);
    for (const ArgLin::Piece& p : a.pieces) {
        ComplexFloat v = p.arg_of ? series_eval(*p.arg_of, z, sub) : z.value(prec);
        if (v.is_nan()) return BigFloat::nan(prec);
        acc = acc + BigFloat::from(p.coef, prec) * v.arg();
    }
    return acc;
}

// Decide sign(value - bound) where value is computed by `f(prec)` and bound
// by `g(prec)`; escalates while the difference is below the noise floor.
// Returns 0 when undecidable at kMaxPrec (caller applies the closed side).
template <typename F, typename G>
int escalating_sign(F&& f, G&& g, const PointValue& z, const EvalCtx& ctx, bool* decided) {
    long p = std::max<long>(ctx.prec, 64);
    while (true) {
        BigFloat v = f(p), b = g(p);
        if (v.is_nan() || b.is_nan()) {
            *decided = false;
            return 0;
        }
        BigFloat d = v - b;
        BigFloat scale = BigFloat::from(1L, p);
        if (v.abs() > scale) scale = v.abs();
        if (b.abs() > scale) scale = b.abs();
        if (d.abs() > scale.mul_2exp(-(p - 40))) {
            *decided = true;
            return d.sign();
        }
        if (p >= kMaxPrec || !z.can_escalate()) {
            *decided = false;
            return 0;
        }
        p *= 2;
        if (p > kMaxPrec) p = kMaxPrec;
    }
}

inline BigFloat mods_float(const BigFloat& u, const BigFloat& v) {
    BigFloat k = (u / v - BigFloat::from(Rational(1, 2), u.prec())).ceil_f();
    return u - v * k;
}

inline bool cond_eval(const CondPtr& c, const PointValue& z, const EvalCtx& ctx) {
    if (!c) return true;
    switch (c->kind) {
        case Condition::Kind::True:
            return true;
        case Condition::Kind::And:
            for (const CondPtr& k : c->kids)
                if (!cond_eval(k, z, ctx)) return false;
            return true;
        case Condition::Kind::Or:
            for (const CondPtr& k : c->kids)
                if (cond_eval(k, z, ctx)) return true;
            return false;
        case Condition::Kind::Not:
            return !cond_eval(c->kids.at(0), z, ctx);
        case Condition::Kind::IsZeroVar:
            return z.is_zero();
        case Condition::Kind::VarSign: {
            // ray comparisons ("z < 0") hold only on the real axis
            std::optional<int> s = z.real_sign();
            if (!s) return false;
            return rel_apply(c->rel, *s);
        }
        case Condition::Kind::SignCmp: {
            if (auto g = z.exact_point()) {
                if (auto v = series_eval_exact(*c->sign_of, *g, ctx))
                    return rel_apply(c->rel, c->re_part ? v->re.sign() : v->im.sign());
            }
            bool decided = false;
            int sgn = escalating_sign(
                [&](long p) {
                    EvalCtx sub = ctx;
                    sub.prec = p;
                    ComplexFloat v = series_eval(*c->sign_of, z, sub);
                    return c->re_part ? v.re : v.im;
                },
                [&](long p) { return BigFloat(p); }, z, ctx, &decided);
            if (!decided) {
                ctx.note("boundary-undecidable sign comparison; treating as zero");
                sgn = 0;
            }
            return rel_apply(c->rel, sgn);
        }
        case Condition::Kind::ArgCmp: {
            if (auto g = z.exact_point()) {
                if (auto q = arglin_exact_pi(c->lhs, *g, ctx)) {
                    Rational v = c->reduce_mods ? mods(*q, Rational(2)) : *q;
                    Rational d = v - c->bound_pi;
                    return rel_apply(c->rel, d.sign());
                }
            }
            bool decided = false;
            int sgn = escalating_sign(
                [&](long p) {
                    BigFloat v = arglin_value(c->lhs, z, p, ctx);
                    if (c->reduce_mods && !v.is_nan()) {
                        BigFloat twopi = BigFloat::pi(p) * BigFloat::from(2L, p);
                        v = mods_float(v, twopi);
                    }
                    return v;
                },
                [&](long p) { return BigFloat::pi(p) * BigFloat::from(c->bound_pi, p); }, z, ctx,
                &decided);
            if (!decided) {
                ctx.note("boundary-undecidable arg comparison; using closed side");
                sgn = 0;
            }
            return rel_apply(c->rel, sgn);
        }
    }
    return false;
}

// floor(1/2 - A/(2 pi)) as an exact integer-valued rational.
inline Rational floor_arg_value(const ArgLin& a, const PointValue& z, const EvalCtx& ctx,
                                bool* ok) {
    *ok = true;
    if (auto g = z.exact_point()) {
        if (auto q = arglin_exact_pi(a, *g, ctx))
            return (Rational(1, 2) - *q / Rational(2)).floor();
    }
    long p = std::max<long>(ctx.prec, 64);
    while (true) {
        BigFloat av = arglin_value(a, z, p, ctx);
        if (av.is_nan()) {
            *ok = false;
            return Rational(0);
        }
        BigFloat t = BigFloat::from(Rational(1, 2), p) - av / (BigFloat::pi(p) * BigFloat::from(2L, p));
        BigFloat fl = t.floor_f();
        BigFloat frac = t - fl;
        BigFloat tol = BigFloat::from(1L, p).mul_2exp(-(p - 40));
        // frac in [0,1): undecidable when within tol of 0 or 1
        if (frac > tol && (BigFloat::from(1L, p) - frac) > tol)
            return Rational(fl.to_long_exact());
        if (p >= kMaxPrec || !z.can_escalate()) {
            ctx.note("boundary-undecidable floor; snapping to the jump");
            // treat t as the exact integer it is adjacent to
            if ((BigFloat::from(1L, p) - frac) <= tol) fl = fl + BigFloat::from(1L, p);
            return Rational(fl.to_long_exact());
        }
        p *= 2;
        if (p > kMaxPrec) p = kMaxPrec;
    }
}

inline ConstantExpr case_eval(const CaseAtom& a, const PointValue& z, const EvalCtx& ctx) {
    for (const CaseBranch& b : a.cases) {
        if (cond_eval(b.cond, z, ctx)) {
            if (b.pm) ctx.note("sign-ambiguous case selected; reporting the + value");
            return b.value;
        }
    }
    if (a.otherwise_pm) ctx.note("sign-ambiguous case selected; reporting the + value");
    return a.otherwise;
}

inline ConstantExpr correction_eval(const Correction& k, const PointValue& z, const EvalCtx& ctx) {
    ConstantExpr acc;
    for (const CorrAtom& a : k.atoms) {
        if (std::holds_alternative<ConstantExpr>(a)) {
            acc += std::get<ConstantExpr>(a);
        } else if (std::holds_alternative<FloorAtom>(a)) {
            const FloorAtom& f = std::get<FloorAtom>(a);
            bool ok = false;
            Rational fl = floor_arg_value(f.arg, z, ctx, &ok);
            if (!ok) throw SingularError("floor atom undefined at sample point");
            acc += f.scale * ConstantExpr::from(fl);
        } else {
            acc += case_eval(std::get<CaseAtom>(a), z, ctx);
        }
    }
    return acc;
}

inline Rational exponent_eval(const CorrectionExponent& e, const PointValue& z, const EvalCtx& ctx,
                              bool* ok) {
    *ok = true;
    Rational acc(0);
    for (const ExpAtom& a : e.atoms) {
        if (std::holds_alternative<Rational>(a)) {
            acc += std::get<Rational>(a);
        } else if (std::holds_alternative<ExpFloor>(a)) {
            const ExpFloor& f = std::get<ExpFloor>(a);
            bool fok = false;
            Rational fl = floor_arg_value(f.arg, z, ctx, &fok);
            if (!fok) {
                *ok = false;
                return Rational(0);
            }
            acc += f.coef * fl;
        } else {
            const ExpCase& c = std::get<ExpCase>(a);
            Rational v = c.otherwise;
            for (const ExpCaseBranch& b : c.cases)
                if (cond_eval(b.cond, z, ctx)) {
                    v = b.value;
                    break;
                }
            acc += c.coef * v;
        }
    }
    return acc;
}

inline ConstantExpr unit_eval(const UnitFactor& u, const PointValue& z, const EvalCtx& ctx) {
    ConstantExpr acc = ConstantExpr::one();
    for (const UnitAtom& a : u.atoms) {
        if (std::holds_alternative<CorrectionExponent>(a)) {
            bool ok = false;
            Rational e = exponent_eval(std::get<CorrectionExponent>(a), z, ctx, &ok);
            if (!ok) throw SingularError("unit factor undefined at sample point");
            acc = acc * ConstantExpr::neg_one_pow(e);
        } else {
            const UnitCases& c = std::get<UnitCases>(a);
            ConstantExpr v = c.otherwise;
            for (const CaseBranch& b : c.cases)
                if (cond_eval(b.cond, z, ctx)) {
                    if (b.pm) ctx.note("sign-ambiguous unit selected; reporting the + value");
                    v = b.value;
                    break;
                }
            acc = acc * v;
        }
    }
    return acc;
}

// ln(var) at the sample, honoring the mode.  Real-branch logs of negative
// reals are undefined.
inline ComplexFloat log_of_var(const PointValue& z, long prec, Mode mode) {
    if (z.is_zero()) return ComplexFloat::nan(prec);
    if (mode == Mode::RealBranch) {
        std::optional<BigFloat> x = z.real_value(prec);
        if (!x || x->sign() <= 0) return ComplexFloat::nan(prec);
        return ComplexFloat::real(x->log());
    }
    return z.value(prec).log();
}

inline ComplexFloat var_pow(const PointValue& z, const Rational& e, long prec, Mode mode) {
    if (mode == Mode::RealBranch) {
        std::optional<BigFloat> x = z.real_value(prec);
        if (!x) return ComplexFloat::nan(prec);
        return ComplexFloat::pow_real_branch(*x, e);
    }
    if (z.kind == PointValue::Kind::Polar && !z.r.is_zero()) {
        // exact polar data: |z|^e e^(i e theta pi), keeps axis samples exact
        BigFloat mag = BigFloat::from(z.r, prec).log();
        mag = (mag * BigFloat::from(e, prec)).exp();
        return polar_pi(mag, e * z.theta_pi, prec);
    }
    return z.value(prec).pow(e, prec);
}

inline ComplexFloat coefficient_eval(const Coefficient& c, const PointValue& z, const EvalCtx& ctx,
                                     const ComplexFloat& lnz) {
    long wp = ctx.prec;
    ComplexFloat acc(wp);
    for (const auto& [deg, cst] : c.lpoly) {
        ComplexFloat term = cst.eval(wp);
        if (!deg.is_zero()) {
            if (lnz.is_nan()) return ComplexFloat::nan(wp);
            ComplexFloat lp = deg.is_integer() ? lnz.pow(deg, wp) : (lnz.log() * ComplexFloat::from(deg, wp)).exp();
            term = term * lp;
        }
        acc = acc + term;
    }
    for (const auto& [coef, at] : c.lnatoms) {
        ComplexFloat inner = ComplexFloat::from(GaussianRational(1), wp);
        if (!at.c.is_one()) inner = at.c.eval(wp);
        if (!at.alpha.is_zero()) {
            if (z.is_zero()) return ComplexFloat::nan(wp);
            inner = inner * var_pow(z, at.alpha, wp, ctx.mode);
        }
        ComplexFloat lv(wp);
        if (ctx.mode == Mode::RealBranch) {
            if (inner.re.sign() <= 0 || !inner.im.is_zero()) return ComplexFloat::nan(wp);
            lv = ComplexFloat::real(inner.re.log());
        } else {
            lv = inner.log();
        }
        acc = acc + coef.eval(wp) * lv;
    }
    if (c.has_corr()) acc = acc + correction_eval(*c.corr, z, ctx).eval(wp);
    if (c.has_unit()) acc = acc * unit_eval(*c.unit, z, ctx).eval(wp);
    return acc;
}

inline ComplexFloat series_eval(const Series& s, const PointValue& z, const EvalCtx& ctx) {
    long wp = ctx.prec;
    ComplexFloat lnz = log_of_var(z, wp, s.mode);
    ComplexFloat acc(wp);
    if (z.is_zero()) {
        for (const auto& [e, c] : s.terms) {
            if (e.sign() < 0) return ComplexFloat::nan(wp);
            if (e.sign() > 0) continue;  // z^e -> 0, and log factors cannot save it
            bool has_log = false;
            for (const auto& [deg, cst] : c.lpoly)
                if (!deg.is_zero()) has_log = true;
            if (has_log) return ComplexFloat::nan(wp);
            ComplexFloat cf = coefficient_eval(c, z, ctx, lnz);
            if (cf.is_nan()) return ComplexFloat::nan(wp);
            acc = acc + cf;
        }
        if (s.global) acc = acc * unit_eval(*s.global, z, ctx).eval(wp);
        return acc;
    }
    for (const auto& [e, c] : s.terms) {
        ComplexFloat cf = coefficient_eval(c, z, ctx, lnz);
        if (cf.is_nan()) return ComplexFloat::nan(wp);
        acc = acc + cf * var_pow(z, e, wp, s.mode);
    }
    if (s.global) acc = acc * unit_eval(*s.global, z, ctx).eval(wp);
    return acc;
}

inline std::optional<GaussianRational> const_as_gaussian(const ConstantExpr& c) {
    return c.as_gaussian();
}

inline std::optional<GaussianRational> series_eval_exact(const Series& s,
                                                         const GaussianRational& z0,
                                                         const EvalCtx& ctx) {
    GaussianRational acc(0);
    PointValue zp = PointValue::from_exact(z0);
    for (const auto& [e, c] : s.terms) {
        if (z0.is_zero()) {
            if (e.sign() < 0) return std::nullopt;
            if (e.sign() > 0) continue;
        }
        if (!c.lnatoms.empty()) return std::nullopt;
        GaussianRational coeff(0);
        for (const auto& [deg, cst] : c.lpoly) {
            if (!deg.is_zero()) return std::nullopt;  // ln(z0) is never exact
            auto g = cst.as_gaussian();
            if (!g) return std::nullopt;
            coeff = coeff + *g;
        }
        if (c.has_corr()) {
            auto g = correction_eval(*c.corr, zp, ctx).as_gaussian();
            if (!g) return std::nullopt;
            coeff = coeff + *g;
        }
        if (c.has_unit()) {
            auto g = unit_eval(*c.unit, zp, ctx).as_gaussian();
            if (!g) return std::nullopt;
            coeff = coeff * *g;
        }
        if (z0.is_zero()) {
            acc = acc + coeff;
            continue;
        }
        if (!e.is_integer() || !e.fits_long()) {
            // fractional powers of exact points: only 0^e handled above
            if (coeff.is_zero()) continue;
            return std::nullopt;
        }
        acc = acc + coeff * z0.pow(e.to_long());
    }
    if (s.global) {
        auto g = unit_eval(*s.global, zp, ctx).as_gaussian();
        if (!g) return std::nullopt;
        acc = acc * *g;
    }
    return acc;
}

}  // namespace spx
