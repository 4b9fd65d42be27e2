#pragma once

#include <map>
#include <optional>

#include "spx/correction.hpp"

namespace spx {

constexpr long kMaxLogDegree = 8;

// Scale every atom of an additive correction by a constant.
inline Correction scale_correction(const Correction& k, const ConstantExpr& s) {
    Correction out;
    out.role = k.role;
    for (const CorrAtom& a : k.atoms) {
        if (std::holds_alternative<ConstantExpr>(a)) {
            ConstantExpr v = std::get<ConstantExpr>(a) * s;
            if (!v.is_zero()) out.atoms.push_back(std::move(v));
        } else if (std::holds_alternative<FloorAtom>(a)) {
            FloorAtom f = std::get<FloorAtom>(a);
            f.scale = f.scale * s;
            out.atoms.push_back(std::move(f));
        } else {
            CaseAtom c = std::get<CaseAtom>(a);
            for (CaseBranch& b : c.cases) b.value = b.value * s;
            c.otherwise = c.otherwise * s;
            out.atoms.push_back(std::move(c));
        }
    }
    return out;
}

// Unsplit logarithm of a constant times a power of the variable,
// ln(c * var^alpha), evaluated as one principal log (its branch structure
// differs from ln(c) + alpha*ln(var), which is the whole point).
struct LnAtom {
    ConstantExpr c;
    Rational alpha;

    friend bool operator==(const LnAtom& x, const LnAtom& y) {
        return x.alpha == y.alpha && x.c == y.c;
    }
};

// Polynomial in l = ln(var) with exact constant coefficients, optional
// unsplit log atoms, an optional additive piecewise correction, and an
// optional unit-magnitude factor:
//   unit * (sum_k lpoly[k] * l^k + sum_j lncoef_j * ln(c_j var^a_j) + corr).
struct Coefficient {
    std::map<Rational, ConstantExpr> lpoly;
    std::vector<std::pair<ConstantExpr, LnAtom>> lnatoms;
    std::optional<Correction> corr;
    std::optional<UnitFactor> unit;

    Coefficient() = default;

    static Coefficient scalar(ConstantExpr c) {
        Coefficient r;
        if (!c.is_zero()) r.lpoly.emplace(Rational(0), std::move(c));
        return r;
    }
    static Coefficient lpow(ConstantExpr c, Rational deg) {
        check_ldeg(deg);
        Coefficient r;
        if (!c.is_zero()) r.lpoly.emplace(std::move(deg), std::move(c));
        return r;
    }
    static Coefficient one() { return scalar(ConstantExpr::one()); }
    static Coefficient unsplit_ln(ConstantExpr c, Rational alpha,
                                  ConstantExpr coef = ConstantExpr::one()) {
        Coefficient r;
        if (!coef.is_zero()) r.lnatoms.push_back({std::move(coef), {std::move(c), std::move(alpha)}});
        return r;
    }

    bool is_zero() const { return lpoly.empty() && lnatoms.empty() && !has_corr(); }
    bool has_corr() const { return corr && !corr->atoms.empty(); }
    bool has_unit() const { return unit && !unit->trivially_one(); }

    // Pure exact scalar (degree 0, no piecewise parts)?
    const ConstantExpr* pure_scalar() const {
        static const ConstantExpr zero{};
        if (has_corr() || has_unit() || !lnatoms.empty()) return nullptr;
        if (lpoly.empty()) return &zero;
        if (lpoly.size() == 1 && lpoly.begin()->first.is_zero()) return &lpoly.begin()->second;
        return nullptr;
    }
    // Scalar times a single power of l, no piecewise parts?
    std::optional<std::pair<ConstantExpr, Rational>> monomial() const {
        if (has_corr() || has_unit() || !lnatoms.empty() || lpoly.size() != 1)
            return std::nullopt;
        return std::make_pair(lpoly.begin()->second, lpoly.begin()->first);
    }

    static void check_ldeg(const Rational& d) {
        if (d.abs() > Rational(kMaxLogDegree))
            throw UnsupportedError("log degree exceeds cap of 8");
    }

    friend Coefficient operator-(const Coefficient& a) {
        Coefficient r = a;
        for (auto& [d, c] : r.lpoly) c = -c;
        for (auto& [c, at] : r.lnatoms) c = -c;
        if (r.has_corr()) r.corr = scale_correction(*r.corr, ConstantExpr::from(-1));
        return r;
    }

    friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
        if (a.is_zero() && !a.has_unit()) return b;
        if (b.is_zero() && !b.has_unit()) return a;
        if (a.has_unit() || b.has_unit()) return add_with_units(a, b);
        Coefficient r = a;
        for (const auto& [d, c] : b.lpoly) {
            auto it = r.lpoly.find(d);
            if (it == r.lpoly.end()) {
                r.lpoly.emplace(d, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) r.lpoly.erase(it);
            }
        }
        for (const auto& [c, at] : b.lnatoms) r.add_lnatom(c, at);
        if (b.has_corr()) {
            if (!r.has_corr()) {
                r.corr = b.corr;
            } else {
                Correction merged = *r.corr;
                for (const CorrAtom& at : b.corr->atoms) merged.atoms.push_back(at);
                merged.role = Role::None;
                r.corr = std::move(merged);
            }
        }
        return r;
    }

    friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
        if (a.has_corr() && b.has_corr())
            throw UnsupportedError("product of two piecewise coefficients");
        if (b.has_corr() || (!b.lnatoms.empty() && a.lnatoms.empty() && !a.has_corr()))
            return b * a;
        // now only a may carry a correction; b must then be a pure scalar
        Coefficient r;
        for (const auto& [da, ca] : a.lpoly)
            for (const auto& [db, cb] : b.lpoly) {
                Rational d = da + db;
                check_ldeg(d);
                ConstantExpr v = ca * cb;
                if (v.is_zero()) continue;
                auto it = r.lpoly.find(d);
                if (it == r.lpoly.end()) r.lpoly.emplace(d, std::move(v));
                else {
                    it->second += v;
                    if (it->second.is_zero()) r.lpoly.erase(it);
                }
            }
        if (a.has_corr() || !a.lnatoms.empty()) {
            const ConstantExpr* s = b.pure_scalar();
            if (!s) throw UnsupportedError("piecewise coefficient times log polynomial");
            if (!s->is_zero()) {
                if (a.has_corr()) r.corr = scale_correction(*a.corr, *s);
                for (const auto& [c, at] : a.lnatoms) r.add_lnatom(c * *s, at);
            }
        }
        if (a.has_unit() || b.has_unit()) {
            UnitFactor u;
            if (a.has_unit()) u *= *a.unit;
            if (b.has_unit()) u *= *b.unit;
            r.unit = std::move(u);
        }
        return r;
    }

    Coefficient scaled(const ConstantExpr& s) const { return *this * scalar(s); }

private:
    void add_lnatom(const ConstantExpr& c, const LnAtom& at) {
        for (auto it = lnatoms.begin(); it != lnatoms.end(); ++it)
            if (it->second == at) {
                it->first += c;
                if (it->first.is_zero()) lnatoms.erase(it);
                return;
            }
        lnatoms.push_back({c, at});
    }

    // Adding differently-factored coefficients: resolve a piecewise unit on
    // a pure scalar into an additive case atom, then retry.
    static Coefficient add_with_units(const Coefficient& a, const Coefficient& b) {
        auto resolve = [](const Coefficient& x) -> std::optional<Coefficient> {
            if (!x.has_unit()) return x;
            if (x.unit->atoms.size() != 1 ||
                !std::holds_alternative<UnitCases>(x.unit->atoms[0]))
                return std::nullopt;
            Coefficient bare = x;
            bare.unit.reset();
            const ConstantExpr* s = bare.pure_scalar();
            if (!s) return std::nullopt;
            const UnitCases& uc = std::get<UnitCases>(x.unit->atoms[0]);
            CaseAtom ca;
            for (const CaseBranch& br : uc.cases)
                ca.cases.push_back({br.cond, br.value * *s, br.pm});
            ca.otherwise = uc.otherwise * *s;
            Coefficient r;
            Correction k;
            k.atoms.push_back(std::move(ca));
            r.corr = std::move(k);
            return r;
        };
        auto ra = resolve(a), rb = resolve(b);
        if (!ra || !rb)
            throw UnsupportedError("sum of coefficients with incompatible unit factors");
        if (ra->has_unit() && rb->has_unit())
            throw UnsupportedError("sum of coefficients with incompatible unit factors");
        return *ra + *rb;
    }
};

// Truncated generalized Puiseux series about 0: exact rational exponents,
// Coefficient values, and an order marker o(var^order).  No order means the
// series is exact.  The optional global factor multiplies every term.
struct Series {
    std::string var = "z";
    Mode mode = Mode::ComplexPrincipal;
    std::map<Rational, Coefficient> terms;
    std::optional<Rational> order;
    std::optional<UnitFactor> global;

    static Series zero_exact(std::string var, Mode m) {
        Series s;
        s.var = std::move(var);
        s.mode = m;
        return s;
    }
    static Series zero_to(std::string var, Mode m, Rational n) {
        Series s = zero_exact(std::move(var), m);
        s.order = std::move(n);
        return s;
    }
    static Series monomial(std::string var, Mode m, Coefficient c, Rational e) {
        Series s = zero_exact(std::move(var), m);
        if (!c.is_zero()) s.terms.emplace(std::move(e), std::move(c));
        return s;
    }
    static Series variable(std::string var, Mode m) {
        return monomial(std::move(var), m, Coefficient::one(), Rational(1));
    }
    static Series constant(std::string var, Mode m, ConstantExpr c) {
        return monomial(std::move(var), m, Coefficient::scalar(std::move(c)), Rational(0));
    }

    bool is_zero() const { return terms.empty(); }
    bool is_exact() const { return !order.has_value(); }

    // Smallest exponent carrying a term; for a term-free series the order
    // (the o() term dominates); nullopt only for the exact zero series.
    std::optional<Rational> dominant_exp() const {
        if (!terms.empty()) return terms.begin()->first;
        return order;
    }

    void insert_term(const Rational& e, const Coefficient& c) {
        if (c.is_zero()) return;
        if (order && e > *order) return;
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    Series truncated(const Rational& n) const {
        Series r = *this;
        r.order = r.order ? std::min(*r.order, n) : n;
        r.terms.erase(r.terms.upper_bound(*r.order), r.terms.end());
        return r;
    }

    // Fold the global factor into every coefficient.
    Series distributed() const {
        if (!global || global->trivially_one()) {
            Series r = *this;
            r.global.reset();
            return r;
        }
        Series r = *this;
        for (auto& [e, c] : r.terms) {
            UnitFactor u = *r.global;
            if (c.unit) u *= *c.unit;
            c.unit = std::move(u);
        }
        r.global.reset();
        return r;
    }

    Series shifted(const Rational& q) const {
        Series r = zero_exact(var, mode);
        r.global = global;
        if (order) r.order = *order + q;
        for (const auto& [e, c] : terms) r.terms.emplace(e + q, c);
        return r;
    }

    Series scaled(const ConstantExpr& s) const {
        Series r = zero_exact(var, mode);
        r.global = global;
        r.order = order;
        if (s.is_zero()) return r;
        for (const auto& [e, c] : terms) {
            Coefficient sc = c.scaled(s);
            if (!sc.is_zero()) r.terms.emplace(e, std::move(sc));
        }
        return r;
    }

    friend Series operator-(const Series& s) {
        Series r = s;
        for (auto& [e, c] : r.terms) c = -c;
        return r;
    }

    friend Series operator+(const Series& a, const Series& b) {
        require_compatible(a, b);
        if (a.global || b.global) return a.distributed() + b.distributed();
        Series r = Series::zero_exact(a.var, a.mode);
        if (a.order && b.order) r.order = std::min(*a.order, *b.order);
        else if (a.order) r.order = a.order;
        else if (b.order) r.order = b.order;
        for (const auto& [e, c] : a.terms) r.insert_term(e, c);
        for (const auto& [e, c] : b.terms) r.insert_term(e, c);
        return r;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator*(const Series& a, const Series& b) {
        require_compatible(a, b);
        if (a.global || b.global) return a.distributed() * b.distributed();
        Series r = Series::zero_exact(a.var, a.mode);
        // order: min(n_a + dom_b, n_b + dom_a); an exact operand drops its side
        std::optional<Rational> n;
        if (a.order) {
            auto db = b.dominant_exp();
            if (db) n = *a.order + *db;
            else n = a.order;  // b is exact zero: result is zero anyway
        }
        if (b.order) {
            auto da = a.dominant_exp();
            Rational cand = da ? *b.order + *da : *b.order;
            n = n ? std::min(*n, cand) : cand;
        }
        r.order = n;
        for (const auto& [ea, ca] : a.terms)
            for (const auto& [eb, cb] : b.terms) {
                Rational e = ea + eb;
                if (r.order && e > *r.order) continue;
                r.insert_term(e, ca * cb);
            }
        return r;
    }

    static void require_compatible(const Series& a, const Series& b) {
        if (a.var != b.var || a.mode != b.mode)
            throw UnsupportedError("series with mixed variables or modes");
    }
};

// S = c * z^alpha + g, with the dominant data of g (b, sigma, h) when g is
// nonzero.
struct SplitSeries {
    Coefficient c;
    Rational alpha;
    Series g;
    std::optional<Coefficient> b;
    std::optional<Rational> sigma;
    std::optional<Series> h;
};

inline SplitSeries split_dominant(const Series& s) {
    if (s.is_zero()) throw SingularError("zero series has no dominant term");
    const Series t = s.distributed();
    SplitSeries sp;
    auto it = t.terms.begin();
    sp.c = it->second;
    sp.alpha = it->first;
    sp.g = Series::zero_exact(t.var, t.mode);
    sp.g.order = t.order;
    for (++it; it != t.terms.end(); ++it) sp.g.terms.emplace(it->first, it->second);
    if (!sp.g.terms.empty()) {
        auto jt = sp.g.terms.begin();
        sp.b = jt->second;
        sp.sigma = jt->first;
        Series h = sp.g;
        h.terms.erase(h.terms.begin());
        sp.h = std::move(h);
    }
    return sp;
}

enum class Kernel : uint8_t { Exp, Ln1p, Binom, Atan0, Asin0, Asinh0, Atanh0 };

// Maclaurin coefficient a_k of the kernel (binom takes beta).
inline Rational kernel_coef(Kernel f, long k, const Rational& beta = Rational(0)) {
    switch (f) {
        case Kernel::Exp: {
            Rational r(1);
            for (long j = 1; j <= k; ++j) r = r / Rational(j);
            return r;
        }
        case Kernel::Ln1p:
            if (k == 0) return Rational(0);
            return Rational(k % 2 ? 1 : -1, k);
        case Kernel::Binom: {
            Rational r(1);
            for (long j = 0; j < k; ++j) r = r * (beta - Rational(j)) / Rational(j + 1);
            return r;
        }
        case Kernel::Atan0:
            if (k % 2 == 0) return Rational(0);
            return Rational((k / 2) % 2 ? -1 : 1, k);
        case Kernel::Atanh0:
            if (k % 2 == 0) return Rational(0);
            return Rational(1, k);
        case Kernel::Asin0:
        case Kernel::Asinh0: {
            if (k % 2 == 0) return Rational(0);
            long j = (k - 1) / 2;
            // (2j)! / (4^j (j!)^2 (2j+1)), asinh alternates sign
            Rational r(1);
            for (long m = 1; m <= j; ++m) r = r * Rational(2 * m - 1) / Rational(2 * m);
            r = r / Rational(k);
            if (f == Kernel::Asinh0 && j % 2 == 1) r = -r;
            return r;
        }
    }
    return Rational(0);
}

// f(W) for a small series W (dominant exponent > 0), truncated to o(var^n).
inline Series analytic_compose(Kernel f, const Series& w_in, const Rational& n,
                               const Rational& beta = Rational(0)) {
    Series w = w_in.distributed().truncated(n);
    for (const auto& [e, c] : w.terms) {
        if (c.has_corr() || c.has_unit() || !c.lnatoms.empty())
            throw UnsupportedError("analytic composition over piecewise coefficients");
    }
    auto dom = w.dominant_exp();
    if (!w.is_zero() && *dom <= Rational(0)) {
        if (f == Kernel::Exp && *dom < Rational(0))
            throw SingularError("essential singularity: exp of a negative-degree series");
        throw UnsupportedError("not a small series");
    }
    Series acc = Series::zero_to(w.var, w.mode, n);
    acc.insert_term(Rational(0), Coefficient::scalar(ConstantExpr::from(kernel_coef(f, 0, beta))));
    if (w.is_zero()) {
        if (w.order) acc.order = std::min(n, *w.order);
        return acc;
    }
    Series p = Series::constant(w.var, w.mode, ConstantExpr::one());
    Rational kdom(0);
    for (long k = 1; kdom + *dom <= n; ++k) {
        p = (p * w).truncated(n);
        kdom += *dom;
        Rational a = kernel_coef(f, k, beta);
        if (!a.is_zero()) acc = acc + p.scaled(ConstantExpr::from(a));
        if (p.is_zero()) break;
    }
    if (w.order) acc.order = std::min(n, *w.order);
    acc = acc.truncated(*acc.order);
    return acc;
}

// 1/S to the order implied by S (or capped by req, which is required when
// S is exact).  The dominant coefficient must be an invertible monomial in l.
inline Series series_recip(const Series& s, std::optional<Rational> req = std::nullopt) {
    if (s.is_zero()) throw SingularError("division by zero series");
    SplitSeries sp = split_dominant(s);
    auto mono = sp.c.monomial();
    if (!mono) throw UnsupportedError("reciprocal: dominant coefficient is piecewise");
    ConstantExpr cinv = mono->first.recip();
    Rational ldeg = -mono->second;
    Coefficient::check_ldeg(ldeg);
    Coefficient inv_dom = Coefficient::lpow(cinv, ldeg);
    Series invmono = Series::monomial(s.var, s.mode, inv_dom, -sp.alpha);
    if (sp.g.is_zero() && !sp.g.order) return invmono;
    // ratio = g * (c z^alpha)^-1, small by construction
    Series ratio = Series::monomial(s.var, s.mode, inv_dom, Rational(0)) * sp.g.shifted(-sp.alpha);
    std::optional<Rational> tn = ratio.order;
    if (req) {
        Rational cand = *req - sp.alpha;
        tn = tn ? std::min(*tn, cand) : cand;
    }
    if (!tn) throw UnsupportedError("reciprocal of an exact series needs a target order");
    Series inv = analytic_compose(Kernel::Binom, ratio.truncated(*tn), *tn, Rational(-1));
    return invmono * inv;
}

}  // namespace spx
