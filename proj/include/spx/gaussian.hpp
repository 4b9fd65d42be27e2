#pragma once

#include <optional>

#include "spx/rational.hpp"

namespace spx {

// Gaussian rational a + b*i.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long r) : re(r) {}
    GaussianRational(long r, long i) : re(r), im(i) {}

    static GaussianRational unit_i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }
    bool is_imaginary() const { return re.is_zero() && !im.is_zero(); }
    bool is_one() const { return im.is_zero() && re == Rational(1); }

    GaussianRational conj() const { return {re, -im}; }
    Rational norm2() const { return re * re + im * im; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    GaussianRational operator-() const { return {-re, -im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n = b.norm2();
        if (n.is_zero()) throw std::domain_error("gaussian division by zero");
        GaussianRational p = a * b.conj();
        return {p.re / n, p.im / n};
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    GaussianRational pow(long e) const {
        GaussianRational acc(1), base = *this;
        bool invert = e < 0;
        unsigned long ue = static_cast<unsigned long>(invert ? -e : e);
        while (ue) {
            if (ue & 1) acc = acc * base;
            base = base * base;
            ue >>= 1;
        }
        if (invert) acc = GaussianRational(1) / acc;
        return acc;
    }

    // arg as an exact multiple of pi, available on the axes and diagonals
    // (the only Gaussian rationals whose argument is a rational multiple of
    // pi, by Niven's theorem).  Returns q with arg = q*pi, q in (-1, 1].
    std::optional<Rational> arg_over_pi() const {
        if (is_zero()) return Rational(0);  // arg(0) = 0 convention
        int sr = re.sign(), si = im.sign();
        if (si == 0) return Rational(sr > 0 ? 0 : 1);
        if (sr == 0) return Rational(si, 2);
        if (re.abs() == im.abs()) {
            if (sr > 0) return Rational(si, 4);
            return Rational(si * 3, 4);
        }
        return std::nullopt;
    }

    size_t hash() const { return re.hash() * 31 + im.hash(); }
};

}  // namespace spx
