#pragma once

#include <gmp.h>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spx {

// Exact rational with arbitrary-size numerator/denominator, kept in lowest
// terms with positive denominator (mpq_canonicalize guarantees both).
class Rational {
public:
    Rational() { mpq_init(q_); }
    Rational(long n) { mpq_init(q_); mpq_set_si(q_, n, 1); }
    Rational(long n, long d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        mpq_init(q_);
        mpq_set_si(q_, n, d);
        mpq_canonicalize(q_);
    }
    Rational(const Rational& o) { mpq_init(q_); mpq_set(q_, o.q_); }
    Rational(Rational&& o) noexcept { mpq_init(q_); mpq_swap(q_, o.q_); }
    Rational& operator=(const Rational& o) {
        if (this != &o) mpq_set(q_, o.q_);
        return *this;
    }
    Rational& operator=(Rational&& o) noexcept {
        if (this != &o) mpq_swap(q_, o.q_);
        return *this;
    }
    ~Rational() { mpq_clear(q_); }

    // Accepts "p", "p/q", optional leading '-'.
    static Rational parse(std::string_view s) {
        Rational r;
        std::string t(s);
        if (t.empty() || mpq_set_str(r.q_, t.c_str(), 10) != 0)
            throw std::invalid_argument("bad rational literal: " + t);
        if (mpz_sgn(mpq_denref(r.q_)) == 0)
            throw std::domain_error("rational with zero denominator");
        mpq_canonicalize(r.q_);
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        Rational r; mpq_add(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        Rational r; mpq_sub(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        Rational r; mpq_mul(r.q_, a.q_, b.q_); return r;
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("rational division by zero");
        Rational r; mpq_div(r.q_, a.q_, b.q_); return r;
    }
    Rational operator-() const { Rational r; mpq_neg(r.q_, q_); return r; }
    Rational& operator+=(const Rational& b) { mpq_add(q_, q_, b.q_); return *this; }
    Rational& operator-=(const Rational& b) { mpq_sub(q_, q_, b.q_); return *this; }
    Rational& operator*=(const Rational& b) { mpq_mul(q_, q_, b.q_); return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_, b.q_) != 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) >= 0; }

    bool is_zero() const { return mpq_sgn(q_) == 0; }
    int sign() const { return mpq_sgn(q_); }
    bool is_integer() const { return mpz_cmp_ui(mpq_denref(q_), 1) == 0; }

    // Odd reduced denominator: the exponents for which a real branch of
    // t^(p/q) exists at negative t.
    bool has_odd_denominator() const { return mpz_odd_p(mpq_denref(q_)); }
    bool numerator_odd() const { return mpz_odd_p(mpq_numref(q_)); }

    Rational floor() const {
        Rational r;
        mpz_fdiv_q(mpq_numref(r.q_), mpq_numref(q_), mpq_denref(q_));
        return r;
    }
    Rational ceil() const {
        Rational r;
        mpz_cdiv_q(mpq_numref(r.q_), mpq_numref(q_), mpq_denref(q_));
        return r;
    }

    Rational abs() const { Rational r; mpq_abs(r.q_, q_); return r; }

    Rational pow(long e) const {
        if (e == 0) return Rational(1);
        if (is_zero() && e < 0) throw std::domain_error("0 to negative power");
        Rational r;
        unsigned long ue = static_cast<unsigned long>(e < 0 ? -e : e);
        mpz_pow_ui(mpq_numref(r.q_), mpq_numref(q_), ue);
        mpz_pow_ui(mpq_denref(r.q_), mpq_denref(q_), ue);
        if (e < 0) mpq_inv(r.q_, r.q_);
        return r;
    }

    // Fits in long? Needed for binomial loops and small exponents.
    bool fits_long() const {
        return is_integer() && mpz_fits_slong_p(mpq_numref(q_));
    }
    long to_long() const {
        if (!fits_long()) throw std::domain_error("rational does not fit long");
        return mpz_get_si(mpq_numref(q_));
    }
    long numerator_long() const {
        if (!mpz_fits_slong_p(mpq_numref(q_))) throw std::domain_error("numerator too large");
        return mpz_get_si(mpq_numref(q_));
    }
    long denominator_long() const {
        if (!mpz_fits_slong_p(mpq_denref(q_))) throw std::domain_error("denominator too large");
        return mpz_get_si(mpq_denref(q_));
    }
    Rational numerator() const {
        Rational r;
        mpq_set_z(r.q_, mpq_numref(q_));
        return r;
    }
    Rational denominator() const {
        Rational r;
        mpq_set_z(r.q_, mpq_denref(q_));
        return r;
    }
    static Rational from_mpz(const mpz_t z) {
        Rational r;
        mpq_set_z(r.q_, z);
        return r;
    }

    double to_double() const { return mpq_get_d(q_); }

    std::string str() const {
        char* s = mpq_get_str(nullptr, 10, q_);
        std::string out(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, out.size() + 1);
        return out;
    }

    size_t hash() const {
        size_t h = 1469598103934665603ull;
        auto mix = [&h](const mpz_t z) {
            size_t n = mpz_size(z);
            for (size_t i = 0; i < n; ++i) {
                h ^= static_cast<size_t>(mpz_getlimbn(z, i));
                h *= 1099511628211ull;
            }
            h ^= static_cast<size_t>(mpz_sgn(z) + 2);
            h *= 1099511628211ull;
        };
        mix(mpq_numref(q_));
        mix(mpq_denref(q_));
        return h;
    }

    const mpq_t& raw() const { return q_; }

private:
    mpq_t q_;
};

// mods(u, v): representative of u mod v in (-v/2, v/2].  v > 0.
inline Rational mods(const Rational& u, const Rational& v) {
    if (v.sign() <= 0) throw std::domain_error("mods needs positive modulus");
    Rational k = (u / v - Rational(1, 2)).ceil();
    return u - v * k;
}

// Perfect-square test on a non-negative rational.
inline bool is_perfect_square(const Rational& r, Rational* root = nullptr) {
    if (r.sign() < 0) return false;
    const mpq_t& q = r.raw();
    if (!mpz_perfect_square_p(mpq_numref(q)) || !mpz_perfect_square_p(mpq_denref(q))) return false;
    if (root) {
        mpq_t out;
        mpq_init(out);
        mpz_sqrt(mpq_numref(out), mpq_numref(q));
        mpz_sqrt(mpq_denref(out), mpq_denref(q));
        char* s = mpq_get_str(nullptr, 10, out);
        std::string tmp(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, tmp.size() + 1);
        mpq_clear(out);
        *root = Rational::parse(tmp);
    }
    return true;
}

}  // namespace spx

template <>
struct std::hash<spx::Rational> {
    size_t operator()(const spx::Rational& r) const { return r.hash(); }
};
