#pragma once

#include "spx/simplify.hpp"

namespace spx {

// s = c l^d z^alpha (1 + ratio), with the data the correction analysis
// needs.  `dom` is the dominant monomial as a series (for conditions),
// `eta_pi` the limiting arg of the dominant coefficient.
struct PreparedBase {
    SplitSeries sp;
    ConstantExpr c;
    Rational ldeg;
    Rational alpha;
    Series ratio;
    Series dom;
    std::optional<Rational> eta_pi;
};

inline PreparedBase prepare_base(SplitSeries sp, const std::string& var, Mode mode) {
    PreparedBase p;
    p.sp = std::move(sp);
    auto mono = p.sp.c.monomial();
    if (!mono) throw UnsupportedError("piecewise dominant coefficient");
    p.c = mono->first;
    p.ldeg = mono->second;
    p.alpha = p.sp.alpha;
    p.eta_pi = coeff_arg_pi_limit(p.sp.c);
    Coefficient invc = Coefficient::lpow(p.c.recip(), -p.ldeg);
    Series invdom = Series::monomial(var, mode, invc, -p.alpha);
    p.ratio = invdom * p.sp.g;
    p.dom = Series::monomial(var, mode, p.sp.c, p.alpha);
    return p;
}

inline PreparedBase prepare_base(const Series& s) {
    return prepare_base(split_dominant(s), s.var, s.mode);
}

inline Constraint effective_constraint(Mode m, Constraint cc) {
    if (m != Mode::ComplexPrincipal) cc.real = true;
    return cc;
}

inline Series one_plus(const Series& s) {
    return Series::constant(s.var, s.mode, ConstantExpr::one()) + s;
}

inline Correction case_correction(CaseAtom at, Role role) {
    Correction k;
    k.role = role;
    if (!at.cases.empty() || !at.otherwise.is_zero()) k.atoms.push_back(std::move(at));
    return k;
}

namespace detail {

// arg(c) = pi exactly?  nullopt when numerically undecidable (a constant
// that hugs the negative real axis without landing on it symbolically).
inline std::optional<bool> on_negative_axis(const ConstantExpr& c) {
    if (auto q = c.arg_over_pi_sym()) return *q == Rational(1);
    long p = 128;
    while (p <= 4096) {
        ComplexFloat v = c.eval(p);
        BigFloat eps = v.abs().mul_2exp(-(p - 40));
        if (v.im.abs() > eps) return false;
        if (v.re.sign() > 0 && v.re.abs() > eps) return false;
        p *= 2;
    }
    return std::nullopt;
}

// Correction for ln about an alpha = 0 dominant term on the cut:
// u = c (1 + ratio) with arg(c) = pi.  The crossing set is where
// Im(ratio) changes sign through arg(c (1+ratio)) = pi.
inline Correction omega_pi0_on_cut(const PreparedBase& p, const Constraint& cc) {
    const Role role = Role::OmegaPiZero;
    auto generic = [&]() {
        CaseAtom at;
        at.cases.push_back({Condition::sign_cmp(false, sptr(p.ratio), Rel::GT),
                            ConstantExpr::pi_i_times(Rational(-2))});
        return case_correction(std::move(at), role);
    };
    if (p.ratio.terms.empty()) return Correction{{}, role};
    auto tau = coeff_arg_pi_limit(p.ratio.terms.begin()->second);
    if (!tau) return generic();
    Rational sigma = p.ratio.terms.begin()->first;

    // angles where the leading direction sigma*theta + tau meets the axis
    PiInterval th = theta_interval(cc);
    PiInterval range = th.scaled(sigma).shifted(*tau);
    if (range.hi - range.lo > Rational(256)) return generic();
    std::vector<Rational> crit;
    for (Rational k = range.lo.ceil(); k <= range.hi; k += Rational(1)) {
        if (k == range.lo && range.lo_open) continue;
        if (k == range.hi && range.hi_open) continue;
        crit.push_back((k - *tau) / sigma);
    }
    std::sort(crit.begin(), crit.end());

    // arcs between consecutive criticals; theta = +-pi are hard boundaries
    // (z^sigma is discontinuous across them), so arcs never wrap
    std::vector<Rational> samples;
    if (crit.empty()) {
        samples.push_back((th.lo + th.hi) / Rational(2));
    } else {
        for (size_t i = 0; i + 1 < crit.size(); ++i)
            samples.push_back((crit[i] + crit[i + 1]) / Rational(2));
        if (crit.front() > th.lo) samples.push_back((th.lo + crit.front()) / Rational(2));
        if (crit.back() < th.hi) samples.push_back((crit.back() + th.hi) / Rational(2));
    }

    std::vector<int> ic_c, ic_s;
    for (const Rational& t : crit) {
        auto v = ic_sign(p.ratio, t);
        if (!v) return generic();
        ic_c.push_back(*v);
    }
    for (const Rational& t : samples) {
        auto v = ic_sign(p.ratio, t);
        if (!v) return generic();
        ic_s.push_back(*v);
    }

    bool s_all_le0 = true, s_all_pos = true;
    for (int v : ic_s) {
        if (v > 0) s_all_le0 = false;
        if (v <= 0) s_all_pos = false;
    }
    if (s_all_le0) {
        std::vector<Rational> up;  // rays the curve still crosses upward on
        for (size_t i = 0; i < crit.size(); ++i)
            if (ic_c[i] > 0) up.push_back(crit[i]);
        if (up.empty()) return Correction{{}, role};
        CaseAtom at;
        for (const Rational& t : up) {
            if (t.is_zero())
                at.cases.push_back({Condition::var_sign(Rel::GT),
                                    ConstantExpr::pi_i_times(Rational(-2))});
            else if (t == Rational(1))
                at.cases.push_back({Condition::var_sign(Rel::LT),
                                    ConstantExpr::pi_i_times(Rational(-2))});
            else
                return generic();
        }
        return case_correction(std::move(at), role);
    }
    if (s_all_pos) {
        // -2pi off the exceptional rays where the cusp stays weakly below
        CaseAtom at;
        at.cases.push_back({Condition::var_zero(), ConstantExpr{}});
        for (size_t i = 0; i < crit.size(); ++i) {
            if (ic_c[i] > 0) continue;
            if (crit[i].is_zero())
                at.cases.push_back({Condition::var_sign(Rel::GT), ConstantExpr{}});
            else if (crit[i] == Rational(1))
                at.cases.push_back({Condition::var_sign(Rel::LT), ConstantExpr{}});
            else
                return generic();
        }
        at.otherwise = ConstantExpr::pi_i_times(Rational(-2));
        return case_correction(std::move(at), role);
    }
    return generic();
}

}  // namespace detail

// Additive correction i*Omega for ln(c l^d z^alpha (1 + ratio)) relative
// to ln(dominant) + ln(1 + ratio), about z = 0.
inline Correction omega_correction(const PreparedBase& p, Mode mode, const Constraint& cc_in) {
    Constraint cc = effective_constraint(mode, cc_in);

    // (a) no subdominant terms within the stated order: nothing can cross
    if (p.sp.g.terms.empty()) return Correction{{}, Role::Omega};

    // real-branch logs exist only where the logand is positive, where they
    // agree with the principal value
    if (mode == Mode::RealBranch) return Correction{{}, Role::Omega};

    if (cc.real) {
        Series full = p.dom + p.sp.g;
        if (all_coeffs_real_scalar(full) && all_exps_integer(full))
            return Correction{{}, Role::OmegaReal};
        if (p.eta_pi) {
            bool pos_crit = mods(*p.eta_pi, Rational(2)) == Rational(1);
            bool neg_crit = mods(*p.eta_pi + p.alpha, Rational(2)) == Rational(1);
            std::optional<int> ic_pos, ic_neg;
            bool ok = true;
            if (cc.real_sign >= 0 && pos_crit) {
                ic_pos = ic_sign(p.ratio, Rational(0));
                ok = ok && ic_pos.has_value();
            }
            if (cc.real_sign <= 0 && neg_crit) {
                ic_neg = ic_sign(p.ratio, Rational(1));
                ok = ok && ic_neg.has_value();
            }
            if (ok) {
                CaseAtom at;
                if (ic_pos && *ic_pos > 0)
                    at.cases.push_back({Condition::var_sign(Rel::GT),
                                        ConstantExpr::pi_i_times(Rational(-2))});
                if (ic_neg && *ic_neg > 0)
                    at.cases.push_back({Condition::var_sign(Rel::LT),
                                        ConstantExpr::pi_i_times(Rational(-2))});
                if (at.cases.empty()) return Correction{{}, Role::OmegaReal};
                return case_correction(std::move(at), Role::OmegaReal);
            }
        }
        // fall through to the complex forms, which stay valid on the axis
    }

    if (p.alpha.is_zero()) {
        if (!p.ldeg.is_zero())
            throw UnsupportedError("constant term with a logarithmic coefficient");
        auto cut = detail::on_negative_axis(p.c);
        if (!cut) throw UnsupportedError("cannot decide whether the constant term lies on the cut");
        if (!*cut) return Correction{{}, Role::OmegaPiZero};
        return detail::omega_pi0_on_cut(p, cc);
    }

    {
        Series full = p.dom + p.sp.g;
        if (all_coeffs_real_scalar(full) && all_exps_multiple_of(full, p.alpha))
            return Correction{{}, Role::Omega};
    }

    bool omit_pos = false, omit_neg = false;
    CriticalInfo crit = critical_angles(p.eta_pi, p.alpha, cc);
    if (crit.known) {
        bool all_ge0 = true, all_le0 = true, all_known = true;
        for (const Rational& t : crit.angles_pi) {
            auto v = ic_sign(p.ratio, t);
            if (!v) {
                all_known = false;
                break;
            }
            if (*v < 0) all_ge0 = false;
            if (*v > 0) all_le0 = false;
        }
        if (all_known) {
            omit_pos = all_ge0;  // curve never dips below the cut
            omit_neg = all_le0;
        }
    }
    if (omit_pos && omit_neg) return Correction{{}, Role::Omega};

    ArgLin lhs;
    lhs.add(Rational(1), sptr(one_plus(p.ratio)));
    lhs.add(Rational(1), sptr(p.dom));
    CaseAtom at;
    if (!omit_pos)
        at.cases.push_back({Condition::arg_cmp(lhs, Rel::LE, Rational(-1)),
                            ConstantExpr::pi_i_times(Rational(2))});
    if (!omit_neg)
        at.cases.push_back({Condition::arg_cmp(lhs, Rel::GT, Rational(1)),
                            ConstantExpr::pi_i_times(Rational(-2))});
    return case_correction(std::move(at), Role::Omega);
}

namespace detail {

// value of the power-split cases at a known arg sum (in pi units)
inline ConstantExpr power_split_value(const Rational& sum_pi) {
    if (sum_pi <= Rational(-1)) return ConstantExpr::pi_i_times(Rational(2));
    if (sum_pi > Rational(1)) return ConstantExpr::pi_i_times(Rational(-2));
    return {};
}

}  // namespace detail

// Correction i*Phi for splitting ln(c z^alpha ...) as ln(c) + ln(z^alpha)
// + ln(1+ratio): Phi = Omega + the split cases on arg(c) + arg(z^alpha).
inline Correction phi_correction(const PreparedBase& p, Mode mode, const Constraint& cc_in) {
    Constraint cc = effective_constraint(mode, cc_in);
    Correction out = omega_correction(p, mode, cc_in);
    out.role = Role::Phi;
    if (mode == Mode::RealBranch) return out;

    auto q = p.c.arg_over_pi_sym();
    if (cc.real && q) {
        ConstantExpr fpos = detail::power_split_value(*q);
        ConstantExpr fneg = detail::power_split_value(*q + mods(p.alpha, Rational(2)));
        if (cc.real_sign > 0) {
            if (!fpos.is_zero()) out.atoms.push_back(std::move(fpos));
        } else if (cc.real_sign < 0) {
            if (!fneg.is_zero()) out.atoms.push_back(std::move(fneg));
        } else if (compare(fpos, fneg) == 0) {
            if (!fpos.is_zero()) out.atoms.push_back(std::move(fpos));
        } else {
            CaseAtom at;
            at.cases.push_back({Condition::var_sign(Rel::LT), fneg});
            at.otherwise = fpos;  // x = 0 has arg(0) = 0, same as the x > 0 side
            out.atoms.push_back(std::move(at));
        }
        return out;
    }

    Series zpow = Series::monomial(p.dom.var, p.dom.mode, Coefficient::one(), p.alpha);
    ArgLin lhs;
    bool omit_pos = false, omit_neg = false;
    if (q) {
        lhs.offset_pi = *q;
        PiInterval sum = upsilon_interval(p.alpha, cc).shifted(*q);
        omit_pos = sum.above(Rational(-1));
        omit_neg = sum.at_most(Rational(1));
    } else {
        lhs.add(Rational(1), sptr(Series::constant(p.dom.var, p.dom.mode, p.c)));
    }
    lhs.add(Rational(1), sptr(zpow));
    CaseAtom at;
    if (!omit_pos)
        at.cases.push_back({Condition::arg_cmp(lhs, Rel::LE, Rational(-1)),
                            ConstantExpr::pi_i_times(Rational(2))});
    if (!omit_neg)
        at.cases.push_back({Condition::arg_cmp(lhs, Rel::GT, Rational(1)),
                            ConstantExpr::pi_i_times(Rational(-2))});
    if (!at.cases.empty()) out.atoms.push_back(std::move(at));
    return out;
}

// Correction i*Psi for the full split ln(c) + alpha ln(z) + ln(1+ratio):
// Psi = Phi + 2 pi floor(1/2 - alpha arg(z) / (2 pi)).
inline Correction psi_correction(const PreparedBase& p, Mode mode, const Constraint& cc_in) {
    Constraint cc = effective_constraint(mode, cc_in);
    Correction out = phi_correction(p, mode, cc_in);
    out.role = Role::Psi;
    if (mode == Mode::RealBranch) return out;

    if (cc.real) {
        Rational nneg = ((Rational(1) - p.alpha) / Rational(2)).floor();
        if (cc.real_sign <= 0 && !nneg.is_zero()) {
            ConstantExpr v = ConstantExpr::pi_i_times(Rational(2) * nneg);
            if (cc.real_sign < 0) {
                out.atoms.push_back(v);
            } else {
                CaseAtom at;
                at.cases.push_back({Condition::var_sign(Rel::LT), v});
                out.atoms.push_back(std::move(at));
            }
        }
        return out;
    }

    PiInterval t = theta_interval(cc).scaled(p.alpha);
    if (auto n = floor_fold(t)) {
        if (!n->is_zero())
            out.atoms.push_back(ConstantExpr::pi_i_times(Rational(2) * *n));
        return out;
    }
    auto [nlo, nhi] = floor_cells(t);
    if (nlo == nhi + Rational(1)) {
        CaseAtom at;
        at.cases.push_back({Condition::arg_cmp(ArgLin::of_var(p.alpha), Rel::LE,
                                               Rational(1) - Rational(2) * nlo),
                            ConstantExpr::pi_i_times(Rational(2) * nlo)});
        at.otherwise = ConstantExpr::pi_i_times(Rational(2) * nhi);
        out.atoms.push_back(std::move(at));
        return out;
    }
    FloorAtom fl;
    fl.scale = ConstantExpr::pi_i_times(Rational(2));
    fl.arg = ArgLin::of_var(p.alpha);
    out.atoms.push_back(std::move(fl));
    return out;
}

enum class LnSplit : uint8_t { None, Coefficient, Full };

// Truncated logarithm of a series about 0, correct across the cut.  The
// degree-0 coefficient carries the non-power parts (constants, unsplit
// log atoms, powers of ln var) plus the piecewise correction.
inline Series ln_series(const Series& src_in, const Rational& n, LnSplit split = LnSplit::None,
                        const Constraint& cc = {}) {
    Series src = src_in.distributed();
    if (src.is_zero()) throw SingularError("log of a series with no leading term");
    const Mode mode = src.mode;
    if (n < Rational(0)) return Series::zero_to(src.var, mode, n);

    PreparedBase p = prepare_base(src);
    if (!p.ldeg.is_zero())
        throw UnsupportedError("log of a series whose leading coefficient involves ln");

    // The correction analysis and the embedded case conditions see only the
    // terms that can influence the o(z^n) result; deeper terms of the logand
    // would change them, so they must not leak in.
    Series rat = p.ratio.truncated(n);
    if (p.ratio.is_exact() && rat.terms.size() == p.ratio.terms.size()) rat = p.ratio;
    p.ratio = std::move(rat);

    Series tail = p.ratio.is_zero() && p.ratio.is_exact()
                      ? Series::zero_exact(src.var, mode)
                      : analytic_compose(Kernel::Ln1p, p.ratio, n);

    Coefficient deg0;
    Correction corr;
    switch (split) {
        case LnSplit::None: {
            corr = omega_correction(p, mode, cc);
            if (p.alpha.is_zero())
                deg0 = Coefficient::scalar(ConstantExpr::ln_general(p.c));
            else
                deg0 = Coefficient::unsplit_ln(p.c, p.alpha);
            break;
        }
        case LnSplit::Coefficient: {
            if (mode == Mode::RealBranch && p.c.sign_sym().value_or(0) <= 0)
                throw UnsupportedError(
                    "coefficient split requires a positive leading constant in real-branch mode");
            corr = phi_correction(p, mode, cc);
            deg0 = Coefficient::scalar(ConstantExpr::ln_general(p.c));
            if (!p.alpha.is_zero())
                deg0 = deg0 + Coefficient::unsplit_ln(ConstantExpr::one(), p.alpha);
            break;
        }
        case LnSplit::Full: {
            if (mode == Mode::RealBranch) {
                bool one = p.c.is_one();
                if (!one && p.c.sign_sym().value_or(0) <= 0)
                    throw UnsupportedError(
                        "full split requires a positive leading constant in real-branch mode");
                deg0 = one ? Coefficient{} : Coefficient::scalar(ConstantExpr::ln_general(p.c));
                if (!p.alpha.is_zero()) {
                    if (!p.alpha.numerator_odd() && p.alpha.has_odd_denominator()) {
                        // ln(x^(2m/q)) = (m/q) ln(x^2), defined on both sides
                        deg0 = deg0 + Coefficient::unsplit_ln(ConstantExpr::one(), Rational(2),
                                                              ConstantExpr::from(p.alpha / Rational(2)));
                    } else {
                        deg0 = deg0 + Coefficient::lpow(ConstantExpr::from(p.alpha), Rational(1));
                    }
                }
                corr = Correction{{}, Role::Psi};
            } else {
                corr = psi_correction(p, mode, cc);
                deg0 = Coefficient::scalar(ConstantExpr::ln_general(p.c));
                if (!p.alpha.is_zero())
                    deg0 = deg0 + Coefficient::lpow(ConstantExpr::from(p.alpha), Rational(1));
            }
            break;
        }
    }
    if (!corr.trivially_zero()) {
        if (deg0.corr) {
            for (CorrAtom& a : corr.atoms) deg0.corr->atoms.push_back(std::move(a));
        } else {
            deg0.corr = std::move(corr);
        }
    }

    Series res = tail;
    res.insert_term(Rational(0), deg0);
    return res;
}

}  // namespace spx
