#pragma once

#include <mpfr.h>

#include <cstdio>
#include <string>

#include "spx/rational.hpp"

namespace spx {

inline constexpr long kDefaultPrec = 128;
inline constexpr long kMaxPrec = 4096;

// Arbitrary-precision binary float (MPFR).  Binary operations produce a
// result at the wider of the two operand precisions; round-to-nearest.
class BigFloat {
public:
    explicit BigFloat(long prec = kDefaultPrec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
    BigFloat(const BigFloat& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o) mpfr_swap(x_, o.x_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(x_); }

    static BigFloat from(const Rational& q, long prec) {
        BigFloat r(prec);
        mpfr_set_q(r.x_, q.raw(), MPFR_RNDN);
        return r;
    }
    static BigFloat from(long n, long prec) {
        BigFloat r(prec);
        mpfr_set_si(r.x_, n, MPFR_RNDN);
        return r;
    }
    static BigFloat from(double d, long prec) {
        BigFloat r(prec);
        mpfr_set_d(r.x_, d, MPFR_RNDN);
        return r;
    }
    static BigFloat pi(long prec) {
        BigFloat r(prec);
        mpfr_const_pi(r.x_, MPFR_RNDN);
        return r;
    }
    static BigFloat nan(long prec = kDefaultPrec) {
        BigFloat r(prec);
        mpfr_set_nan(r.x_);
        return r;
    }
    static BigFloat parse(const char* s, long prec) {
        BigFloat r(prec);
        if (mpfr_set_str(r.x_, s, 10, MPFR_RNDN) != 0)
            throw std::invalid_argument(std::string("bad float literal: ") + s);
        return r;
    }

    long prec() const { return mpfr_get_prec(x_); }

    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    bool is_nan() const { return mpfr_nan_p(x_) != 0; }
    bool is_inf() const { return mpfr_inf_p(x_) != 0; }
    int sign() const { return mpfr_zero_p(x_) ? 0 : (mpfr_sgn(x_) > 0 ? 1 : -1); }

    friend int cmp(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.x_, b.x_); }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.x_, b.x_) != 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.x_, b.x_) != 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.x_, b.x_) != 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.x_, b.x_) != 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.x_, b.x_) != 0; }

#define SPX_BF_BINOP(op, fn)                                                 \
    friend BigFloat operator op(const BigFloat& a, const BigFloat& b) {      \
        BigFloat r(a.prec() > b.prec() ? a.prec() : b.prec());               \
        fn(r.x_, a.x_, b.x_, MPFR_RNDN);                                     \
        return r;                                                            \
    }
    SPX_BF_BINOP(+, mpfr_add)
    SPX_BF_BINOP(-, mpfr_sub)
    SPX_BF_BINOP(*, mpfr_mul)
    SPX_BF_BINOP(/, mpfr_div)
#undef SPX_BF_BINOP

    BigFloat operator-() const {
        BigFloat r(prec());
        mpfr_neg(r.x_, x_, MPFR_RNDN);
        return r;
    }

#define SPX_BF_UNFN(name, fn)                \
    BigFloat name() const {                  \
        BigFloat r(prec());                  \
        fn(r.x_, x_, MPFR_RNDN);             \
        return r;                            \
    }
    SPX_BF_UNFN(abs, mpfr_abs)
    SPX_BF_UNFN(sqrt, mpfr_sqrt)
    SPX_BF_UNFN(log, mpfr_log)
    SPX_BF_UNFN(log1p, mpfr_log1p)
    SPX_BF_UNFN(exp, mpfr_exp)
    SPX_BF_UNFN(sin, mpfr_sin)
    SPX_BF_UNFN(cos, mpfr_cos)
    SPX_BF_UNFN(atan, mpfr_atan)
    SPX_BF_UNFN(asin, mpfr_asin)
    SPX_BF_UNFN(acos, mpfr_acos)
    SPX_BF_UNFN(atanh, mpfr_atanh)
    SPX_BF_UNFN(asinh, mpfr_asinh)
    SPX_BF_UNFN(acosh, mpfr_acosh)
    SPX_BF_UNFN(floor_f, mpfr_rint_floor)
    SPX_BF_UNFN(ceil_f, mpfr_rint_ceil)
#undef SPX_BF_UNFN

    BigFloat hypot_with(const BigFloat& b) const {
        BigFloat r(prec() > b.prec() ? prec() : b.prec());
        mpfr_hypot(r.x_, x_, b.x_, MPFR_RNDN);
        return r;
    }
    // atan2(this, x): argument of x + i*this.
    BigFloat atan2_with(const BigFloat& x) const {
        BigFloat r(prec() > x.prec() ? prec() : x.prec());
        mpfr_atan2(r.x_, x_, x.x_, MPFR_RNDN);
        return r;
    }
    BigFloat pow(const BigFloat& e) const {
        BigFloat r(prec() > e.prec() ? prec() : e.prec());
        mpfr_pow(r.x_, x_, e.x_, MPFR_RNDN);
        return r;
    }
    BigFloat pow_si(long e) const {
        BigFloat r(prec());
        mpfr_pow_si(r.x_, x_, e, MPFR_RNDN);
        return r;
    }
    BigFloat mul_2exp(long e) const {
        BigFloat r(prec());
        mpfr_mul_2si(r.x_, x_, e, MPFR_RNDN);
        return r;
    }
    BigFloat round_to(long prec) const {
        BigFloat r(prec);
        mpfr_set(r.x_, x_, MPFR_RNDN);
        return r;
    }

    // Exact exponent: |x| in [2^(e-1), 2^e).  Only valid for nonzero finite.
    long exponent() const { return mpfr_get_exp(x_); }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

    long to_long_exact() const {
        if (!mpfr_integer_p(x_) || !mpfr_fits_slong_p(x_, MPFR_RNDN))
            throw std::domain_error("float is not a small integer");
        return mpfr_get_si(x_, MPFR_RNDN);
    }

    // Decimal string with the given significant digits, plain format.
    std::string str(int digits = 17) const {
        if (is_nan()) return "nan";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%%.%dRg", digits);
        char* out = nullptr;
        mpfr_asprintf(&out, buf, x_);
        std::string s(out);
        mpfr_free_str(out);
        return s;
    }

    const mpfr_t& raw() const { return x_; }
    mpfr_t& raw() { return x_; }

private:
    mpfr_t x_;
};

}  // namespace spx
