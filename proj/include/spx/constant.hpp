#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <vector>

#include "spx/cfloat.hpp"
#include "spx/gaussian.hpp"

namespace spx {

class ConstantExpr;
using ConstPtr = std::shared_ptr<const ConstantExpr>;

// Closed constant grammar: Gaussian rationals, pi, roots of positive
// rationals, logarithms, arctan/arctanh/arccos/arccosh of rationals, and
// (-1)^rational, combined by +, * and integer powers.
//
// The representation is always normalized: a sum of terms, each term a
// Gaussian-rational coefficient times a sorted list of factors.  Factor
// values other than (-1)^q are real and positive by construction (function
// arguments are canonicalized so ln, arctan, arctanh produce positive
// values; signs live in the coefficient), which keeps sign and argument
// classification exact.  Equal constants in this grammar always compare
// equal structurally except for unrelated-base coincidences that would need
// integer factorization (square parts are extracted by trial division only).
class ConstantExpr {
public:
    enum class FactorKind : uint8_t {
        Pi,        // pi^e, integer e != 0
        Root,      // a^e, integer a >= 2 canonical after square extraction, e in (0,1)
        LnRat,     // ln(a)^e, integer a >= 2 not a perfect power, integer e >= 1
        LnC,       // ln(inner)^e, general inner, integer e >= 1
        Arctan,    // arctan(a)^e, rational a > 0, integer e >= 1
        Arctanh,   // arctanh(a)^e, rational a in (0,1), integer e >= 1
        Arccos,    // arccos(a)^e, rational a in (-1,1), a != 0, integer e >= 1
        Arccosh,   // arccosh(a)^e, rational a > 1, integer e >= 1
        NegOne,    // (-1)^a, a in (-1,1), denominator > 2
    };

    struct Factor {
        FactorKind kind;
        Rational a;
        Rational e;
        ConstPtr inner;

        friend bool operator==(const Factor& x, const Factor& y) {
            if (x.kind != y.kind || x.a != y.a || x.e != y.e) return false;
            if (!x.inner != !y.inner) return false;
            return !x.inner || *x.inner == *y.inner;
        }
    };

    struct Term {
        GaussianRational coeff;
        std::vector<Factor> factors;
    };

    ConstantExpr() = default;  // zero

    static ConstantExpr from(GaussianRational g) {
        ConstantExpr c;
        if (!g.is_zero()) c.terms_.push_back({std::move(g), {}});
        return c;
    }
    static ConstantExpr from(Rational q) { return from(GaussianRational(std::move(q))); }
    static ConstantExpr from(long n) { return from(GaussianRational(n)); }
    static ConstantExpr one() { return from(1); }
    static ConstantExpr i() { return from(GaussianRational::unit_i()); }

    static ConstantExpr pi() {
        return single(GaussianRational(1), {Factor{FactorKind::Pi, Rational(0), Rational(1), nullptr}});
    }
    static ConstantExpr pi_times(const Rational& q) {
        if (q.is_zero()) return {};
        return single(GaussianRational(q), {Factor{FactorKind::Pi, Rational(0), Rational(1), nullptr}});
    }
    // q*pi*i: additive branch corrections live on this ray.
    static ConstantExpr pi_i_times(const Rational& q) {
        if (q.is_zero()) return {};
        return single(GaussianRational(Rational(0), q),
                      {Factor{FactorKind::Pi, Rational(0), Rational(1), nullptr}});
    }

    // r^e for rational r != 0 and rational e; principal value.  Supported
    // whenever the result stays in the grammar (always, for positive r).
    static ConstantExpr rational_pow(const Rational& r, const Rational& e) {
        if (r.is_zero()) {
            if (e.sign() > 0) return {};
            throw std::domain_error("0 to non-positive power");
        }
        if (e.is_integer()) {
            if (!e.fits_long()) throw std::domain_error("huge exponent");
            return from(r.pow(e.to_long()));
        }
        ConstantExpr out = one();
        if (r.sign() < 0) out = neg_one_pow(e);
        Rational ar = r.abs();
        Rational ip = e.floor();
        if (!ip.is_zero()) {
            if (!ip.fits_long()) throw std::domain_error("huge exponent");
            out = out * from(ar.pow(ip.to_long()));
        }
        Rational fe = e - ip;  // in (0,1)
        if (!fe.is_zero()) out = out * positive_root(ar, fe);
        return out;
    }

    static ConstantExpr sqrt_rational(const Rational& r) {
        if (r.sign() < 0) throw std::domain_error("sqrt of negative rational");
        if (r.is_zero()) return {};
        return rational_pow(r, Rational(1, 2));
    }

    // (-1)^q, exponent reduced by mods(q, 2); half-integer cases fold to
    // +-1, +-i.
    static ConstantExpr neg_one_pow(const Rational& q) {
        Rational m = mods(q, Rational(2));
        if (m.is_zero()) return one();
        if (m == Rational(1)) return from(-1);
        if (m == Rational(1, 2)) return i();
        if (m == Rational(-1, 2)) return from(GaussianRational(Rational(0), Rational(-1)));
        return single(GaussianRational(1), {Factor{FactorKind::NegOne, m, Rational(1), nullptr}});
    }

    // ln r for positive rational r, split as sums of prime-power logs only
    // so far as perfect powers and the p/q split allow.
    static ConstantExpr ln_rational(const Rational& r) {
        if (r.sign() <= 0) throw std::domain_error("ln of non-positive rational");
        ConstantExpr out;
        // ln(p/q) = ln p - ln q on integer parts.
        auto add_int_log = [&out](const Rational& n, int sgn) {
            if (n == Rational(1)) return;
            Rational base = n;
            long mult = 1;
            extract_perfect_power(base, mult);
            out += single(GaussianRational(Rational(sgn * mult)),
                          {Factor{FactorKind::LnRat, base, Rational(1), nullptr}});
        };
        add_int_log(r.numerator(), 1);
        add_int_log(r.denominator(), -1);
        return out;
    }

    // Principal ln of a nonzero Gaussian rational: ln|g| + i arg(g), with
    // the argument exact on axes/diagonals and arctan-based elsewhere.
    static ConstantExpr ln_gaussian(const GaussianRational& g) {
        if (g.is_zero()) throw std::domain_error("ln 0");
        ConstantExpr out = from(Rational(1, 2)) * ln_rational(g.norm2());
        return out + i() * gaussian_arg(g);
    }

    // arg(g) as a ConstantExpr (exact rational multiple of pi, or
    // arctan-based).
    static ConstantExpr gaussian_arg(const GaussianRational& g) {
        if (auto q = g.arg_over_pi()) return pi_times(*q);
        Rational t = g.im / g.re;
        ConstantExpr at = arctan_rational(t);
        if (g.re.sign() > 0) return at;
        // left half plane: arg = arctan(t) +- pi
        return at + pi_times(Rational(g.im.sign() >= 0 ? 1 : -1));
    }

    static ConstantExpr arctan_rational(const Rational& t) {
        if (t.is_zero()) return {};
        if (t.abs() == Rational(1)) return pi_times(Rational(t.sign(), 4));
        return single(GaussianRational(Rational(t.sign())),
                      {Factor{FactorKind::Arctan, t.abs(), Rational(1), nullptr}});
    }

    // Principal arctanh at any rational t except the branch points +-1.
    static ConstantExpr arctanh_rational(const Rational& t) {
        if (t.is_zero()) return {};
        Rational a = t.abs();
        if (a == Rational(1)) throw std::domain_error("arctanh at branch point");
        if (a < Rational(1))
            return single(GaussianRational(Rational(t.sign())),
                          {Factor{FactorKind::Arctanh, a, Rational(1), nullptr}});
        // |t| > 1: arctanh(t) = arctanh(1/t) - sign(t) i pi / 2
        ConstantExpr out = single(GaussianRational(Rational(t.sign())),
                                  {Factor{FactorKind::Arctanh, Rational(1) / a, Rational(1), nullptr}});
        return out + pi_i_times(Rational(-t.sign(), 2));
    }

    static ConstantExpr arccos_rational(const Rational& t) {
        if (t.abs() > Rational(1)) throw std::domain_error("arccos argument out of range");
        if (t.is_zero()) return pi_times(Rational(1, 2));
        if (t == Rational(1)) return {};
        if (t == Rational(-1)) return pi();
        if (t == Rational(1, 2)) return pi_times(Rational(1, 3));
        if (t == Rational(-1, 2)) return pi_times(Rational(2, 3));
        return single(GaussianRational(1), {Factor{FactorKind::Arccos, t, Rational(1), nullptr}});
    }

    // Principal arccosh at rational t with |t| >= 1 (real result for t >= 1,
    // + i pi for t <= -1).
    static ConstantExpr arccosh_rational(const Rational& t) {
        if (t == Rational(1)) return {};
        if (t == Rational(-1)) return pi_i_times(Rational(1));
        if (t > Rational(1))
            return single(GaussianRational(1), {Factor{FactorKind::Arccosh, t, Rational(1), nullptr}});
        if (t < Rational(-1))
            return single(GaussianRational(1),
                          {Factor{FactorKind::Arccosh, -t, Rational(1), nullptr}}) +
                   pi_i_times(Rational(1));
        // |t| < 1: arccosh(t) = i arccos(t)
        return i() * arccos_rational(t);
    }

    static ConstantExpr ln_general(const ConstantExpr& c) {
        if (c.is_zero()) throw std::domain_error("ln 0");
        if (auto g = c.as_gaussian()) return ln_gaussian(*g);
        ConstantExpr out;
        out.terms_.push_back({GaussianRational(1),
                              {Factor{FactorKind::LnC, Rational(0), Rational(1),
                                      std::make_shared<const ConstantExpr>(c)}}});
        return out;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const {
        return terms_.size() == 1 && terms_[0].factors.empty() && terms_[0].coeff.is_one();
    }

    std::optional<GaussianRational> as_gaussian() const {
        if (terms_.empty()) return GaussianRational(0);
        if (terms_.size() == 1 && terms_[0].factors.empty()) return terms_[0].coeff;
        return std::nullopt;
    }
    std::optional<Rational> as_rational() const {
        auto g = as_gaussian();
        if (g && g->is_real()) return g->re;
        return std::nullopt;
    }

    friend ConstantExpr operator+(const ConstantExpr& x, const ConstantExpr& y) {
        ConstantExpr r = x;
        r += y;
        return r;
    }
    ConstantExpr& operator+=(const ConstantExpr& y) {
        for (const Term& t : y.terms_) add_term(t);
        return *this;
    }
    friend ConstantExpr operator-(const ConstantExpr& x, const ConstantExpr& y) { return x + (-y); }
    ConstantExpr operator-() const {
        ConstantExpr r = *this;
        for (Term& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }
    friend ConstantExpr operator*(const ConstantExpr& x, const ConstantExpr& y) {
        ConstantExpr r;
        for (const Term& a : x.terms_)
            for (const Term& b : y.terms_) r.add_term(mul_terms(a, b));
        return r;
    }
    ConstantExpr& operator*=(const ConstantExpr& y) { return *this = *this * y; }

    friend bool operator==(const ConstantExpr& x, const ConstantExpr& y) {
        if (x.terms_.size() != y.terms_.size()) return false;
        for (size_t k = 0; k < x.terms_.size(); ++k) {
            if (!(x.terms_[k].coeff == y.terms_[k].coeff)) return false;
            if (!(x.terms_[k].factors == y.terms_[k].factors)) return false;
        }
        return true;
    }
    friend bool operator!=(const ConstantExpr& x, const ConstantExpr& y) { return !(x == y); }

    ConstantExpr intpow(long e) const {
        if (e == 0) return one();
        if (e < 0) return recip().intpow(-e);
        ConstantExpr acc = one(), base = *this;
        unsigned long ue = static_cast<unsigned long>(e);
        while (ue) {
            if (ue & 1) acc = acc * base;
            base = base * base;
            ue >>= 1;
        }
        return acc;
    }

    // Reciprocal.  Single terms invert factor-wise; two-term sums that
    // differ by one square root rationalize by the conjugate; anything else
    // is outside the closed grammar.
    ConstantExpr recip() const {
        if (terms_.empty()) throw std::domain_error("reciprocal of zero");
        if (terms_.size() == 1) {
            const Term& t = terms_[0];
            ConstantExpr r = from(GaussianRational(1) / t.coeff);
            for (const Factor& f : t.factors) r = r * invert_factor(f);
            return r;
        }
        if (terms_.size() == 2) {
            ConstantExpr conj;
            conj.terms_ = {terms_[0], terms_[1]};
            conj.terms_[1].coeff = -conj.terms_[1].coeff;
            ConstantExpr den = *this * conj;
            if (den.terms_.size() == 1) return conj * den.recip();
        }
        throw std::domain_error("reciprocal outside constant grammar");
    }

    // Principal power with rational exponent; single-term constants whose
    // coefficient argument is an exact multiple of pi only.
    ConstantExpr pow_rational(const Rational& e) const {
        if (e.is_integer()) {
            if (!e.fits_long()) throw std::domain_error("huge exponent");
            return intpow(e.to_long());
        }
        if (terms_.empty()) return {};
        if (terms_.size() != 1) throw std::domain_error("fractional power of a sum");
        const Term& t = terms_[0];
        auto q = t.coeff.arg_over_pi();
        if (!q) throw std::domain_error("fractional power off the exact rays");
        // |coeff|: rational on the axes, rational*sqrt(2) on the diagonals.
        ConstantExpr out = neg_one_pow(*q * e);
        Rational den = t.coeff.norm2();  // |coeff|^2
        out = out * rational_pow(den, e / Rational(2));
        for (const Factor& f : t.factors) out = out * pow_factor(f, e);
        return out;
    }

    // --- classification ---

    enum class Tri : uint8_t { False, True, Unknown };

    Tri is_real_sym() const {
        for (const Term& t : terms_) {
            Tri ft = term_real(t);
            if (ft != Tri::True) return ft;
        }
        return Tri::True;
    }

    // Sign for provably real constants; 0 only for the exact zero.
    // Unknown when terms disagree in sign (no numeric fallback here).
    std::optional<int> sign_sym() const {
        if (terms_.empty()) return 0;
        int s = 0;
        for (const Term& t : terms_) {
            if (term_real(t) != Tri::True) return std::nullopt;
            int ts = t.coeff.re.sign();
            if (s == 0) s = ts;
            else if (ts != s) return std::nullopt;
        }
        return s;
    }

    // arg/pi when exactly representable as a rational in (-1, 1].
    std::optional<Rational> arg_over_pi_sym() const {
        if (terms_.empty()) return Rational(0);
        if (terms_.size() == 1) {
            const Term& t = terms_[0];
            Rational q(0);
            for (const Factor& f : t.factors) {
                if (f.kind == FactorKind::NegOne) q += f.a;
                else if (factor_positive_real(f) != Tri::True) return std::nullopt;
            }
            auto cq = t.coeff.arg_over_pi();
            if (!cq) return std::nullopt;
            return mods(q + *cq, Rational(2));
        }
        // Sums: only the provably real / imaginary cases.
        if (auto s = sign_sym()) return Rational(*s >= 0 ? 0 : 1);
        ConstantExpr div_i = *this * from(GaussianRational(Rational(0), Rational(-1)));
        if (auto s = div_i.sign_sym()) {
            if (*s == 0) return Rational(0);
            return Rational(*s, 2);
        }
        return std::nullopt;
    }

    // --- numeric evaluation ---

    // Relative error <= 4 * 2^-prec (32 guard bits internally).
    ComplexFloat eval(long prec) const {
        long wp = prec + 32;
        ComplexFloat acc(wp);
        for (const Term& t : terms_) {
            ComplexFloat v = ComplexFloat::from(t.coeff, wp);
            for (const Factor& f : t.factors) v = v * eval_factor(f, wp);
            acc = acc + v;
        }
        return {acc.re.round_to(prec), acc.im.round_to(prec)};
    }

    const std::vector<Term>& terms() const { return terms_; }

    // Canonical text form, parseable by the expression front end.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (size_t k = 0; k < terms_.size(); ++k) {
            const Term& t = terms_[k];
            GaussianRational c = t.coeff;
            bool neg = c.re.sign() < 0 || (c.re.is_zero() && c.im.sign() < 0);
            if (neg) c = -c;
            if (k == 0) {
                if (neg) out += "-";
            } else {
                out += neg ? " - " : " + ";
            }
            std::string cs = coeff_str(c);
            bool unit = cs == "1";
            std::string fs;
            for (const Factor& f : t.factors) {
                if (!fs.empty()) fs += "*";
                fs += factor_str(f);
            }
            if (fs.empty()) out += cs;
            else if (unit) out += fs;
            else out += cs + "*" + fs;
        }
        return out;
    }

    // Canonical ordering for use as a map key / in sorted unions.
    friend int compare(const ConstantExpr& x, const ConstantExpr& y) {
        size_t n = std::min(x.terms_.size(), y.terms_.size());
        for (size_t k = 0; k < n; ++k) {
            int c = compare_terms(x.terms_[k], y.terms_[k]);
            if (c != 0) return c;
            const GaussianRational &a = x.terms_[k].coeff, &b = y.terms_[k].coeff;
            if (a.re != b.re) return a.re < b.re ? -1 : 1;
            if (a.im != b.im) return a.im < b.im ? -1 : 1;
        }
        if (x.terms_.size() != y.terms_.size())
            return x.terms_.size() < y.terms_.size() ? -1 : 1;
        return 0;
    }

private:
    std::vector<Term> terms_;

    static ConstantExpr single(GaussianRational c, std::vector<Factor> fs) {
        ConstantExpr r;
        normalize_factors(c, fs);
        if (!c.is_zero()) r.terms_.push_back({std::move(c), std::move(fs)});
        return r;
    }

    // a^e with a > 0 rational, e in (0,1): canonical Root factors with
    // integer bases >= 2 (denominator lifted by a^e = (num*den^k...) split).
    static ConstantExpr positive_root(const Rational& a, const Rational& e) {
        // p/q with e = u/v: (p/q)^e = p^e * q^(1-e) / q
        Rational p = a.numerator(), q = a.denominator();
        ConstantExpr out = integer_root(p, e);
        if (q != Rational(1)) {
            out = out * integer_root(q, Rational(1) - e);
            out = out * from(Rational(1) / q);
        }
        return out;
    }

    // n^e for integer n >= 1, e in (0,1); extracts k-th power parts by trial
    // division so sqrt(8) -> 2*sqrt(2).
    static ConstantExpr integer_root(const Rational& n, const Rational& e) {
        if (n == Rational(1)) return one();
        long v = e.denominator_long();
        Rational outer(1), base = n;
        // pull out d^v | base for small d
        for (long d = 2; d * d <= 1000000 && Rational(d).pow(v) <= base; ++d) {
            Rational dv = Rational(d).pow(v);
            while (true) {
                Rational q = base / dv;
                if (q.is_integer()) {
                    base = q;
                    outer = outer * Rational(d);
                } else {
                    break;
                }
            }
        }
        ConstantExpr out = from(outer.pow(e.numerator_long()));
        if (base != Rational(1))
            out = out * single(GaussianRational(1),
                               {Factor{FactorKind::Root, base, e, nullptr}});
        return out;
    }

    static void extract_perfect_power(Rational& base, long& mult) {
        // base is an integer >= 2; find largest k with base = s^k.
        const mpq_t& raw = base.raw();
        if (mpz_perfect_power_p(mpq_numref(raw))) {
            for (long k = 62; k >= 2; --k) {
                mpz_t root;
                mpz_init(root);
                int exact = mpz_root(root, mpq_numref(raw), static_cast<unsigned long>(k));
                Rational r = Rational::from_mpz(root);
                mpz_clear(root);
                if (exact && r > Rational(1)) {
                    base = r;
                    mult *= k;
                    extract_perfect_power(base, mult);
                    return;
                }
            }
        }
    }

    static int compare_factor(const Factor& x, const Factor& y) {
        if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
        if (x.a != y.a) return x.a < y.a ? -1 : 1;
        if (x.e != y.e) return x.e < y.e ? -1 : 1;
        if (!x.inner && !y.inner) return 0;
        if (!x.inner) return -1;
        if (!y.inner) return 1;
        return compare(*x.inner, *y.inner);
    }

    // Orders terms by factor list alone: the term list is keyed on factors.
    static int compare_terms(const Term& x, const Term& y) {
        size_t n = std::min(x.factors.size(), y.factors.size());
        for (size_t k = 0; k < n; ++k) {
            int c = compare_factor(x.factors[k], y.factors[k]);
            if (c != 0) return c;
        }
        if (x.factors.size() != y.factors.size())
            return x.factors.size() < y.factors.size() ? -1 : 1;
        return 0;
    }

    // Merge same-base factors, folding integer Root exponents and NegOne
    // arithmetic into the coefficient.
    static void normalize_factors(GaussianRational& coeff, std::vector<Factor>& fs) {
        std::sort(fs.begin(), fs.end(),
                  [](const Factor& x, const Factor& y) { return compare_factor(x, y) < 0; });
        std::vector<Factor> out;
        Rational neg_one_q(0);
        bool has_neg_one = false;
        for (Factor& f : fs) {
            if (f.kind == FactorKind::NegOne) {
                neg_one_q += f.a;
                has_neg_one = true;
                continue;
            }
            if (!out.empty() && out.back().kind == f.kind && out.back().a == f.a &&
                ((!out.back().inner && !f.inner) ||
                 (out.back().inner && f.inner && *out.back().inner == *f.inner))) {
                out.back().e += f.e;
            } else {
                out.push_back(std::move(f));
            }
        }
        std::vector<Factor> kept;
        for (Factor& f : out) {
            if (f.e.is_zero()) continue;
            if (f.kind == FactorKind::Root) {
                Rational ip = f.e.floor();
                if (!ip.is_zero()) {
                    coeff = coeff * GaussianRational(f.a.pow(ip.to_long()));
                    f.e = f.e - ip;
                }
                if (f.e.is_zero()) continue;
            }
            kept.push_back(std::move(f));
        }
        if (has_neg_one && !coeff.is_zero()) {
            Rational m = mods(neg_one_q, Rational(2));
            if (m == Rational(1)) coeff = -coeff;
            else if (m == Rational(1, 2)) coeff = coeff * GaussianRational::unit_i();
            else if (m == Rational(-1, 2)) coeff = coeff * (-GaussianRational::unit_i());
            else if (!m.is_zero())
                kept.insert(kept.begin(), Factor{FactorKind::NegOne, m, Rational(1), nullptr});
        }
        std::sort(kept.begin(), kept.end(),
                  [](const Factor& x, const Factor& y) { return compare_factor(x, y) < 0; });
        fs = std::move(kept);
    }

    static Term mul_terms(const Term& a, const Term& b) {
        Term r;
        r.coeff = a.coeff * b.coeff;
        r.factors = a.factors;
        r.factors.insert(r.factors.end(), b.factors.begin(), b.factors.end());
        normalize_factors(r.coeff, r.factors);
        // Root merging with equal exponents: a^e * b^e = (ab)^e.
        for (size_t k = 0; k + 1 < r.factors.size();) {
            Factor &f = r.factors[k], &g = r.factors[k + 1];
            if (f.kind == FactorKind::Root && g.kind == FactorKind::Root && f.e == g.e) {
                GaussianRational unit(1);
                ConstantExpr merged = integer_root(f.a * g.a, f.e);
                // merged is coeff * at most one Root factor
                const Term& mt = merged.terms_[0];
                r.coeff = r.coeff * mt.coeff;
                std::vector<Factor> rest(r.factors.begin() + k + 2, r.factors.end());
                r.factors.erase(r.factors.begin() + k, r.factors.end());
                for (const Factor& mf : mt.factors) r.factors.push_back(mf);
                for (Factor& rf : rest) r.factors.push_back(std::move(rf));
                normalize_factors(r.coeff, r.factors);
                k = 0;
            } else {
                ++k;
            }
        }
        return r;
    }

    void add_term(const Term& t) {
        if (t.coeff.is_zero()) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), t, [](const Term& x, const Term& y) {
            return compare_terms(x, y) < 0;
        });
        if (it != terms_.end() && it->factors == t.factors) {
            it->coeff = it->coeff + t.coeff;
            if (it->coeff.is_zero()) terms_.erase(it);
        } else {
            terms_.insert(it, t);
        }
    }

    static ConstantExpr invert_factor(const Factor& f) {
        switch (f.kind) {
            case FactorKind::Pi: {
                Factor g = f;
                g.e = -g.e;
                return single(GaussianRational(1), {g});
            }
            case FactorKind::Root: {
                // a^-e = a^(1-e) / a
                Factor g = f;
                g.e = Rational(1) - f.e;
                return single(GaussianRational(Rational(1) / f.a), {g});
            }
            case FactorKind::NegOne:
                return neg_one_pow(-f.a);
            default: {
                Factor g = f;
                g.e = -g.e;
                return single(GaussianRational(1), {g});
            }
        }
    }

    static ConstantExpr pow_factor(const Factor& f, const Rational& e) {
        switch (f.kind) {
            case FactorKind::Root:
                return rational_pow(f.a, f.e * e);
            case FactorKind::NegOne:
                return neg_one_pow(f.a * e);
            case FactorKind::Pi: {
                Rational ne = f.e * e;
                if (!ne.is_integer()) throw std::domain_error("non-integer power of pi");
                Factor g = f;
                g.e = ne;
                return single(GaussianRational(1), {g});
            }
            default: {
                Rational ne = f.e * e;
                if (!ne.is_integer()) throw std::domain_error("non-integer power of log factor");
                Factor g = f;
                g.e = ne;
                return single(GaussianRational(1), {g});
            }
        }
    }

    static Tri factor_positive_real(const Factor& f) {
        switch (f.kind) {
            case FactorKind::Pi:
            case FactorKind::Root:
            case FactorKind::LnRat:
            case FactorKind::Arctan:
            case FactorKind::Arctanh:
            case FactorKind::Arccos:
            case FactorKind::Arccosh:
                return Tri::True;
            case FactorKind::NegOne:
                return Tri::False;
            case FactorKind::LnC:
                return Tri::Unknown;
        }
        return Tri::Unknown;
    }

    static Tri term_real(const Term& t) {
        if (!t.coeff.is_real()) {
            // i * positive factors is imaginary, not real
            bool all_pos = true;
            for (const Factor& f : t.factors)
                if (factor_positive_real(f) != Tri::True) all_pos = false;
            if (all_pos) return Tri::False;
            return Tri::Unknown;
        }
        for (const Factor& f : t.factors) {
            Tri ft = factor_positive_real(f);
            if (ft != Tri::True) return ft == Tri::False ? Tri::False : Tri::Unknown;
        }
        return Tri::True;
    }

    // c with re >= 0 (or re == 0, im > 0); "1", "2/3", "i", "3*i", "(1+2*i)".
    static std::string coeff_str(const GaussianRational& c) {
        if (c.is_real()) return c.re.str();
        if (c.re.is_zero()) {
            if (c.im == Rational(1)) return "i";
            if (c.im == Rational(-1)) return "-i";
            return c.im.str() + "*i";
        }
        std::string im = c.im.abs() == Rational(1) ? "i" : c.im.abs().str() + "*i";
        return "(" + c.re.str() + (c.im.sign() < 0 ? " - " : " + ") + im + ")";
    }

    static std::string factor_str(const Factor& f) {
        auto powsuf = [&f](std::string base) {
            if (f.e == Rational(1)) return base;
            return base + "^" + f.e.str();
        };
        switch (f.kind) {
            case FactorKind::Pi:
                return powsuf("pi");
            case FactorKind::Root:
                if (f.e == Rational(1, 2)) return "sqrt(" + f.a.str() + ")";
                return f.a.str() + "^(" + f.e.str() + ")";
            case FactorKind::LnRat:
                return powsuf("ln(" + f.a.str() + ")");
            case FactorKind::LnC:
                return powsuf("ln(" + f.inner->str() + ")");
            case FactorKind::Arctan:
                return powsuf("arctan(" + f.a.str() + ")");
            case FactorKind::Arctanh:
                return powsuf("arctanh(" + f.a.str() + ")");
            case FactorKind::Arccos:
                return powsuf("arccos(" + f.a.str() + ")");
            case FactorKind::Arccosh:
                return powsuf("arccosh(" + f.a.str() + ")");
            case FactorKind::NegOne:
                return "(-1)^(" + f.a.str() + ")";
        }
        return "?";
    }

    static ComplexFloat eval_factor(const Factor& f, long prec) {
        switch (f.kind) {
            case FactorKind::Pi:
                return ComplexFloat::real(BigFloat::pi(prec).pow_si(f.e.to_long()));
            case FactorKind::Root: {
                BigFloat b = BigFloat::from(f.a, prec);
                BigFloat v = (b.log() * BigFloat::from(f.e, prec)).exp();
                return ComplexFloat::real(v);
            }
            case FactorKind::LnRat:
                return ComplexFloat::real(BigFloat::from(f.a, prec).log().pow_si(f.e.to_long()));
            case FactorKind::LnC: {
                ComplexFloat v = f.inner->eval(prec).log();
                ComplexFloat acc = ComplexFloat::from(Rational(1), prec);
                for (long k = 0; k < f.e.to_long(); ++k) acc = acc * v;
                return acc;
            }
            case FactorKind::Arctan:
                return ComplexFloat::real(BigFloat::from(f.a, prec).atan().pow_si(f.e.to_long()));
            case FactorKind::Arctanh:
                return ComplexFloat::real(BigFloat::from(f.a, prec).atanh().pow_si(f.e.to_long()));
            case FactorKind::Arccos:
                return ComplexFloat::real(BigFloat::from(f.a, prec).acos().pow_si(f.e.to_long()));
            case FactorKind::Arccosh:
                return ComplexFloat::real(BigFloat::from(f.a, prec).acosh().pow_si(f.e.to_long()));
            case FactorKind::NegOne: {
                BigFloat ang = BigFloat::pi(prec) * BigFloat::from(f.a, prec);
                return {ang.cos(), ang.sin()};
            }
        }
        return ComplexFloat::nan(prec);
    }
};

}  // namespace spx
