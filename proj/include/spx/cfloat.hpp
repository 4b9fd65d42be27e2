#pragma once

#include "spx/bigfloat.hpp"
#include "spx/gaussian.hpp"

namespace spx {

// Complex float on top of BigFloat.  Principal argument lies in (-pi, pi]:
// points on the negative real axis take arg = +pi (the branch cut belongs to
// the upper side), and arg(0) = 0 by convention.  Exact zeros are treated as
// unsigned; there is no signed-zero side information.
struct ComplexFloat {
    BigFloat re;
    BigFloat im;

    ComplexFloat() = default;
    explicit ComplexFloat(long prec) : re(prec), im(prec) {}
    ComplexFloat(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}

    static ComplexFloat from(const GaussianRational& g, long prec) {
        return {BigFloat::from(g.re, prec), BigFloat::from(g.im, prec)};
    }
    static ComplexFloat from(const Rational& q, long prec) {
        return {BigFloat::from(q, prec), BigFloat(prec)};
    }
    static ComplexFloat real(BigFloat r) {
        long p = r.prec();
        return {std::move(r), BigFloat(p)};
    }
    static ComplexFloat polar(const BigFloat& r, const BigFloat& theta) {
        return {r * theta.cos(), r * theta.sin()};
    }
    static ComplexFloat nan(long prec = kDefaultPrec) {
        return {BigFloat::nan(prec), BigFloat::nan(prec)};
    }

    long prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_nan() const { return re.is_nan() || im.is_nan(); }

    friend ComplexFloat operator+(const ComplexFloat& a, const ComplexFloat& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ComplexFloat operator-(const ComplexFloat& a, const ComplexFloat& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ComplexFloat operator*(const ComplexFloat& a, const ComplexFloat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ComplexFloat operator/(const ComplexFloat& a, const ComplexFloat& b) {
        BigFloat n = b.re * b.re + b.im * b.im;
        if (n.is_zero()) return nan(a.prec());
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    ComplexFloat operator-() const { return {-re, -im}; }

    ComplexFloat conj() const { return {re, -im}; }

    BigFloat abs() const { return re.hypot_with(im); }

    BigFloat arg() const {
        if (im.is_zero()) {
            long p = prec();
            if (re.sign() < 0) return BigFloat::pi(p);
            return BigFloat(p);
        }
        return im.atan2_with(re);
    }

    ComplexFloat log() const {
        if (is_zero()) return nan(prec());
        return {abs().log(), arg()};
    }

    ComplexFloat exp() const {
        BigFloat m = re.exp();
        return {m * im.cos(), m * im.sin()};
    }

    ComplexFloat sqrt() const {
        if (is_zero()) return ComplexFloat(prec());
        BigFloat m = abs().sqrt();
        BigFloat half_arg = arg() * BigFloat::from(Rational(1, 2), prec());
        return polar(m, half_arg);
    }

    // Principal z^q for rational q.
    ComplexFloat pow(const Rational& q, long prec_hint = 0) const {
        long p = prec_hint > 0 ? prec_hint : prec();
        if (is_zero()) {
            if (q.sign() > 0) return ComplexFloat(p);
            if (q.is_zero()) return from(Rational(1), p);
            return nan(p);
        }
        if (q.is_integer() && q.fits_long()) {
            long e = q.to_long();
            ComplexFloat base = *this, acc = from(Rational(1), p);
            unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
            while (ue) {
                if (ue & 1) acc = acc * base;
                base = base * base;
                ue >>= 1;
            }
            if (e < 0) acc = from(Rational(1), p) / acc;
            return acc;
        }
        // exp(q * log z) with the modulus and argument handled separately:
        // |z|^q * e^(i q arg z) keeps the argument exact on the axes.
        BigFloat qa = BigFloat::from(q, p);
        BigFloat mag = (abs().log() * qa).exp();
        BigFloat ang = arg() * qa;
        return polar(mag, ang);
    }

    // Real-branch t^q for real t and odd reduced denominator of q: the real
    // root with sign (-1)^numerator for negative t.  Undefined for negative
    // t when the reduced denominator is even.
    static ComplexFloat pow_real_branch(const BigFloat& t, const Rational& q) {
        long p = t.prec();
        if (t.sign() < 0 && !q.has_odd_denominator()) return nan(p);
        if (t.sign() >= 0) return ComplexFloat{t, BigFloat(p)}.pow(q);
        BigFloat mag = (t.abs().log() * BigFloat::from(q, p)).exp();
        if (q.numerator_odd()) mag = -mag;
        return real(mag);
    }

    ComplexFloat asinh() const {
        ComplexFloat one = from(Rational(1), prec());
        return (*this + (one + *this * *this).sqrt()).log();
    }
    ComplexFloat acosh() const {
        ComplexFloat one = from(Rational(1), prec());
        ComplexFloat half{BigFloat::from(Rational(1, 2), prec()), BigFloat(prec())};
        ComplexFloat s = (((*this - one) * half).sqrt() + ((*this + one) * half).sqrt()).log();
        return s + s;
    }
    ComplexFloat atanh() const {
        ComplexFloat one = from(Rational(1), prec());
        ComplexFloat half{BigFloat::from(Rational(1, 2), prec()), BigFloat(prec())};
        return ((one + *this).log() - (one - *this).log()) * half;
    }
    ComplexFloat asin() const {
        ComplexFloat iz{-im, re};
        ComplexFloat w = iz.asinh();
        return {w.im, -w.re};  // -i * asinh(i z)
    }
    ComplexFloat acos() const {
        ComplexFloat s = asin();
        BigFloat half_pi = BigFloat::pi(prec()).mul_2exp(-1);
        return {half_pi - s.re, -s.im};
    }
    ComplexFloat atan() const {
        ComplexFloat iz{-im, re};
        ComplexFloat w = iz.atanh();
        return {w.im, -w.re};
    }

    std::string str(int digits = 17) const {
        std::string s = re.str(digits);
        if (im.sign() >= 0 && !im.is_nan()) s += "+";
        s += im.str(digits) + "i";
        return s;
    }
};

}  // namespace spx
