#pragma once

#include <algorithm>

#include "spx/series.hpp"

namespace spx {

inline SeriesPtr sptr(Series s) { return std::make_shared<const Series>(std::move(s)); }

// Interval of an angle-like quantity in units of pi, with open/closed ends.
struct PiInterval {
    Rational lo, hi;
    bool lo_open = false, hi_open = false;

    static PiInterval point(const Rational& q) { return {q, q, false, false}; }
    bool is_point() const { return lo == hi && !lo_open && !hi_open; }

    // whole interval strictly above / strictly below b
    bool above(const Rational& b) const { return lo > b || (lo == b && lo_open); }
    bool below(const Rational& b) const { return hi < b || (hi == b && hi_open); }
    bool at_most(const Rational& b) const { return hi <= b; }

    PiInterval scaled(const Rational& k) const {
        if (k.is_zero()) return point(Rational(0));
        if (k.sign() > 0) return {lo * k, hi * k, lo_open, hi_open};
        return {hi * k, lo * k, hi_open, lo_open};
    }
    PiInterval shifted(const Rational& q) const { return {lo + q, hi + q, lo_open, hi_open}; }
    friend PiInterval operator+(const PiInterval& a, const PiInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi, a.lo_open || b.lo_open, a.hi_open || b.hi_open};
    }
};

// The window (2m-1, 2m+1] containing the whole interval, if one exists;
// mods(t, 2pi) is then t - 2m*pi on all of it.
inline std::optional<Rational> mods_window(const PiInterval& t) {
    // smallest m with hi <= 2m+1; the window is unique if it exists
    Rational m = ((t.hi - Rational(1)) / Rational(2)).ceil();
    Rational left = Rational(2) * m - Rational(1);
    if (t.lo > left || (t.lo == left && t.lo_open)) return m;
    return std::nullopt;
}

// Constant n with floor(1/2 - t/(2pi)) = n over the interval (t in pi
// units); the value-n cell is t in (-(2n+1), (1-2n)].
inline std::optional<Rational> floor_fold(const PiInterval& t) {
    Rational n = ((Rational(1) - t.hi) / Rational(2)).floor();
    Rational left = -(Rational(2) * n + Rational(1));
    if (t.lo > left || (t.lo == left && t.lo_open)) return n;
    return std::nullopt;
}

// Floor cell at each end of the interval; equal cells mean a constant
// value, adjacent cells a single threshold.
inline std::pair<Rational, Rational> floor_cells(const PiInterval& t) {
    Rational nlo = ((Rational(1) - t.lo) / Rational(2)).floor();
    if (t.lo_open && ((Rational(1) - t.lo) / Rational(2)).is_integer())
        nlo -= Rational(1);
    Rational nhi = ((Rational(1) - t.hi) / Rational(2)).floor();
    return {nlo, nhi};
}

// Allowed arguments of the variable under a constraint, as an interval.
// Unconstrained means (-pi, pi]; a real variable is handled per side by
// the callers and only falls back to the hull here.
inline PiInterval theta_interval(const Constraint& cc) {
    auto [lo, hi] = cc.arg_interval();
    PiInterval out{lo, hi, false, false};
    if (!cc.real && lo <= Rational(-1)) {
        out.lo = Rational(-1);
        out.lo_open = true;
    }
    return out;
}

// Interval of arg(z^alpha) = mods(alpha arg z, 2pi) over the allowed z.
inline PiInterval upsilon_interval(const Rational& alpha, const Constraint& cc) {
    if (cc.real) {
        Rational neg = mods(alpha, Rational(2));  // arg((-r)^alpha)/pi
        if (cc.real_sign > 0) return PiInterval::point(Rational(0));
        if (cc.real_sign < 0) return PiInterval::point(neg);
        return {std::min(Rational(0), neg), std::max(Rational(0), neg), false, false};
    }
    PiInterval t = theta_interval(cc).scaled(alpha);
    if (auto m = mods_window(t)) return t.shifted(Rational(-2) * *m);
    return {Rational(-1), Rational(1), true, false};
}

// Limiting arg/pi of a coefficient's value as the variable approaches 0.
// The highest ln-power dominates; (ln r)^k contributes k*pi for integer k.
// Fractional ln-powers approach different args from the two half planes.
inline std::optional<Rational> coeff_arg_pi_limit(const Coefficient& c) {
    if (c.has_corr() || c.has_unit() || !c.lnatoms.empty() || c.lpoly.empty())
        return std::nullopt;
    auto it = std::prev(c.lpoly.end());
    if (!it->first.is_integer()) return std::nullopt;
    auto q = it->second.arg_over_pi_sym();
    if (!q) return std::nullopt;
    return mods(*q + it->first, Rational(2));
}

// Sign of the first nonvanishing Im(a l^k z^e / |.|) along the ray
// arg z = theta, scanning the terms of `ratio` in ascending order.  Exact
// when every deciding argument lies on an exact ray; escalating numeric
// fallback otherwise.  0 when the scan exhausts all terms (the curve is
// tangent to the cut and never crosses within the stated order); nullopt
// when undecidable.
inline std::optional<int> ic_sign(const Series& ratio, const Rational& theta_pi) {
    for (const auto& [e, c] : ratio.terms) {
        if (c.has_corr() || c.has_unit() || !c.lnatoms.empty()) return std::nullopt;
        // descending ln-degree: |ln r|^k factors dominate lower degrees
        for (auto it = c.lpoly.rbegin(); it != c.lpoly.rend(); ++it) {
            if (!it->first.is_integer()) return std::nullopt;
            const ConstantExpr& a = it->second;
            if (auto q = a.arg_over_pi_sym()) {
                Rational t = mods(*q + it->first + e * theta_pi, Rational(2));
                if (t.is_zero() || t == Rational(1)) continue;
                return t.sign() > 0 ? 1 : -1;
            }
            // numeric: sign of Im(a e^{i e theta pi}) with (-1)^k folded in
            long p = 128;
            while (true) {
                ComplexFloat av = a.eval(p);
                BigFloat ang = BigFloat::pi(p) * BigFloat::from(e * theta_pi + it->first, p);
                BigFloat im = av.re * ang.sin() + av.im * ang.cos();
                BigFloat scale = av.abs();
                if (im.abs() > scale.mul_2exp(-(p - 40)))
                    return im.sign();
                if (p >= 4096) return std::nullopt;
                p *= 2;
            }
        }
    }
    return 0;
}

// Angles (in pi units, within the constraint) where arg(c z^alpha)
// reaches the cut: eta + alpha*theta = (2n+1)pi.
struct CriticalInfo {
    std::vector<Rational> angles_pi;
    bool known = false;
};

inline CriticalInfo critical_angles(const std::optional<Rational>& eta_pi, const Rational& alpha,
                                    const Constraint& cc) {
    CriticalInfo out;
    if (!eta_pi || alpha.is_zero()) return out;
    PiInterval th = theta_interval(cc);
    PiInterval range = th.scaled(alpha).shifted(*eta_pi);
    if (range.hi - range.lo > Rational(256)) return out;  // refuse pathological alpha
    out.known = true;
    Rational m = range.lo.ceil();
    if (mods(m, Rational(2)).is_zero()) m += Rational(1);  // odd integers only
    for (; m <= range.hi; m += Rational(2)) {
        if (m == range.lo && range.lo_open) continue;
        if (m == range.hi && range.hi_open) continue;
        out.angles_pi.push_back((m - *eta_pi) / alpha);
    }
    std::sort(out.angles_pi.begin(), out.angles_pi.end());
    return out;
}

// --- structural shortcuts over whole series ---

inline bool all_coeffs_real_scalar(const Series& s) {
    for (const auto& [e, c] : s.terms) {
        const ConstantExpr* v = c.pure_scalar();
        if (!v || v->is_real_sym() != ConstantExpr::Tri::True) return false;
    }
    return true;
}

inline bool all_exps_integer(const Series& s) {
    for (const auto& [e, c] : s.terms)
        if (!e.is_integer()) return false;
    return true;
}

inline bool all_exps_odd_denominator(const Series& s) {
    for (const auto& [e, c] : s.terms)
        if (!e.has_odd_denominator()) return false;
    return true;
}

inline bool all_exps_multiple_of(const Series& s, const Rational& alpha) {
    if (alpha.is_zero()) return false;
    for (const auto& [e, c] : s.terms)
        if (!(e / alpha).is_integer()) return false;
    return true;
}

}  // namespace spx
