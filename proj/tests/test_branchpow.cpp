#include <catch2/catch_amalgamated.hpp>

#include "spx/branchpow.hpp"
#include "spx/eval.hpp"

using namespace spx;

namespace {

Rational Q(long p, long q = 1) { return Rational(p, q); }

Series var_series(Mode m = Mode::ComplexPrincipal) {
    return Series::variable(m == Mode::ComplexPrincipal ? "z" : "x", m);
}

Series mono(Rational e, ConstantExpr c = ConstantExpr::one(), Mode m = Mode::ComplexPrincipal) {
    return Series::monomial(m == Mode::ComplexPrincipal ? "z" : "x", m,
                            Coefficient::scalar(std::move(c)), std::move(e));
}

Series konst(ConstantExpr c, Mode m = Mode::ComplexPrincipal) {
    return Series::constant(m == Mode::ComplexPrincipal ? "z" : "x", m, std::move(c));
}

const ConstantExpr kI = ConstantExpr::i();
const ConstantExpr kOne = ConstantExpr::one();
const ConstantExpr kMinusOne = ConstantExpr::from(-1);

ComplexFloat oracle_pow(const ComplexFloat& u, const Rational& b, long wp = 160) {
    if (u.is_zero()) return ComplexFloat(wp);
    return (u.log() * ComplexFloat::from(b, wp)).exp();
}

bool rel_close(const ComplexFloat& a, const ComplexFloat& b, long bits) {
    BigFloat tol = b.abs().mul_2exp(-bits) + BigFloat::from(1L, 160).mul_2exp(-2 * bits);
    return (a - b).abs() < tol;
}

// truncated power against the principal oracle over a polar grid; the
// tail contributes ~ r^gap so callers pick r and bits together
void check_pow_grid(const Series& u, const Series& s, const Rational& b, const Rational& r,
                    long denom, long bits) {
    EvalCtx ctx;
    ctx.prec = 160;
    ctx.mode = u.mode;
    for (long k = -denom + 1; k <= denom; ++k) {
        PointValue z = PointValue::polar(r, Q(k, denom));
        ComplexFloat uv = series_eval(u, z, ctx);
        ComplexFloat want = oracle_pow(uv, b);
        ComplexFloat got = series_eval(s, z, ctx);
        INFO("theta = " << k << "/" << denom << " pi");
        CHECK(rel_close(got, want, bits));
    }
}

void check_pow_real(const Series& u, const Series& s, const Rational& b, long bits,
                    int sides = 0) {
    EvalCtx ctx;
    ctx.prec = 160;
    ctx.mode = u.mode;
    for (long e : {2L, 3L}) {
        for (int sgn : {1, -1}) {
            if (sides != 0 && sgn != sides) continue;
            Rational r = sgn > 0 ? Q(1) : Q(-1);
            for (long j = 0; j < e; ++j) r = r / Q(10);
            PointValue z = PointValue::from_exact(GaussianRational(r));
            ComplexFloat uv = series_eval(u, z, ctx);
            ComplexFloat want = oracle_pow(uv, b);
            ComplexFloat got = series_eval(s, z, ctx);
            INFO("x = " << r.str());
            CHECK(rel_close(got, want, bits));
        }
    }
}

ConstantExpr unit_at(const UnitFactor& u, const Rational& r, const Rational& theta_pi,
                     Mode m = Mode::ComplexPrincipal) {
    EvalCtx ctx;
    ctx.prec = 160;
    ctx.mode = m;
    return unit_eval(u, PointValue::polar(r, theta_pi), ctx);
}

const UnitCases& only_unit_cases(const UnitFactor& u) {
    REQUIRE(u.atoms.size() == 1);
    REQUIRE(std::holds_alternative<UnitCases>(u.atoms[0]));
    return std::get<UnitCases>(u.atoms[0]);
}

bool scalar_term_is(const Series& s, const Rational& e, const ConstantExpr& want) {
    auto it = s.terms.find(e);
    if (it == s.terms.end()) return false;
    const ConstantExpr* v = it->second.pure_scalar();
    return v && compare(*v, want) == 0;
}

}  // namespace

TEST_CASE("integer powers multiply out exactly") {
    Series z = var_series();
    Series u = z * z + z * z * z;

    Series sq = pow_series(u, Q(2), Q(10));
    REQUIRE(sq.is_exact());
    CHECK(sq.terms.size() == 3);
    CHECK(scalar_term_is(sq, Q(4), kOne));
    CHECK(scalar_term_is(sq, Q(5), ConstantExpr::from(2)));
    CHECK(scalar_term_is(sq, Q(6), kOne));
    CHECK(!sq.global);

    Series fifth = pow_series(konst(kOne) + z, Q(5), Q(10));
    REQUIRE(fifth.is_exact());
    CHECK(scalar_term_is(fifth, Q(2), ConstantExpr::from(10)));
    CHECK(scalar_term_is(fifth, Q(3), ConstantExpr::from(10)));
    CHECK(scalar_term_is(fifth, Q(5), kOne));

    Series capped = pow_series(konst(kOne) + z, Q(10), Q(3));
    REQUIRE(capped.order);
    CHECK(*capped.order == Q(3));
    CHECK(scalar_term_is(capped, Q(3), ConstantExpr::from(120)));

    Series inv = pow_series(u, Q(-2), Q(0));
    CHECK(inv.dominant_exp() == Q(-4));
    check_pow_grid(u, inv, Q(-2), Q(1, 100), 360, 30);
    CHECK(!inv.global);
}

TEST_CASE("monomial fractional powers stay exact") {
    Series m = mono(Q(2));
    Series s = pow_series(m, Q(3, 2), Q(8));
    REQUIRE(s.is_exact());
    REQUIRE(s.terms.size() == 1);
    CHECK(scalar_term_is(s, Q(3), kOne));
    // the half-odd floor factor of z^2 survives as the full unit
    REQUIRE(s.global);
    check_pow_grid(m, s, Q(3, 2), Q(1, 4), 360, 60);

    // (-z^(-1/2))^(1/2) = [-1 for arg z < 0] i z^(-1/4)
    Series neg = mono(Q(-1, 2), kMinusOne);
    Series r8 = pow_series(neg, Q(1, 2), Q(2));
    REQUIRE(r8.is_exact());
    CHECK(scalar_term_is(r8, Q(-1, 4), kI));
    REQUIRE(r8.global);
    const UnitCases& uc = only_unit_cases(*r8.global);
    REQUIRE(uc.cases.size() == 1);
    CHECK(uc.cases[0].cond->kind == Condition::Kind::ArgCmp);
    CHECK(uc.cases[0].cond->rel == Rel::GT);
    CHECK(uc.cases[0].cond->bound_pi == Q(1));
    CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
    CHECK(compare(uc.otherwise, kOne) == 0);
    check_pow_grid(neg, r8, Q(1, 2), Q(1, 100), 360, 60);
    CHECK(compare(unit_at(*r8.global, Q(1), Q(-1, 3)), kMinusOne) == 0);
    CHECK(compare(unit_at(*r8.global, Q(1), Q(1, 3)), kOne) == 0);
    CHECK(compare(unit_at(*r8.global, Q(1), Q(1)), kOne) == 0);
}

TEST_CASE("unit factor shapes across the cut") {
    Series z = var_series();

    SECTION("wrap of the ratio merges into one two-sided case") {
        Series u = z * z + z * z * z;
        Series s = pow_series(u, Q(3, 2), Q(6));
        REQUIRE(s.global);
        // half-odd power of z^2: a floor factor plus the ratio wrap
        REQUIRE(s.global->atoms.size() == 2);
        REQUIRE(std::holds_alternative<CorrectionExponent>(s.global->atoms[0]));
        const auto& ce = std::get<CorrectionExponent>(s.global->atoms[0]);
        REQUIRE(ce.atoms.size() == 1);
        CHECK(std::get<ExpFloor>(ce.atoms[0]).coef == Q(1));
        REQUIRE(std::holds_alternative<UnitCases>(s.global->atoms[1]));
        const UnitCases& uc = std::get<UnitCases>(s.global->atoms[1]);
        // both wrap directions flip by -1, so they merge into a disjunction
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->kind == Condition::Kind::Or);
        CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
        CHECK(compare(uc.otherwise, kOne) == 0);
        // on the imaginary rays the explicit-curve region matters: the
        // rotation is -1 on both, and -1 on the negative axis
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 2)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(-1, 2)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(0)), kOne) == 0);
    }

    SECTION("pure floor factor when the wrap vanishes") {
        Series u = z * z + (z * z * z).scaled(ConstantExpr() - kI);
        Series s = pow_series(u, Q(3, 2), Q(6));
        REQUIRE(s.global);
        REQUIRE(s.global->atoms.size() == 1);
        REQUIRE(std::holds_alternative<CorrectionExponent>(s.global->atoms[0]));
        const auto& ce = std::get<CorrectionExponent>(s.global->atoms[0]);
        REQUIRE(ce.atoms.size() == 1);
        REQUIRE(std::holds_alternative<ExpFloor>(ce.atoms[0]));
        CHECK(std::get<ExpFloor>(ce.atoms[0]).coef == Q(1));
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(3, 4)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 2)), kOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(-1, 2)), kMinusOne) == 0);
    }

    SECTION("quarter powers rotate by units of i") {
        Series u = z * z + z * z * z;
        Series s = pow_series(u, Q(7, 4), Q(7));
        REQUIRE(s.global);
        EvalCtx ctx;
        ctx.prec = 160;
        ConstantExpr at_pi = unit_at(*s.global, Q(1, 100), Q(1));
        CHECK(compare(at_pi, kI) == 0);
        ConstantExpr at_mid = unit_at(*s.global, Q(1, 100), Q(-3, 4));
        CHECK(compare(at_mid, ConstantExpr() - kI) == 0);
        check_pow_grid(u, s, Q(7, 4), Q(1, 100), 360, 22);
    }

    SECTION("negative exponent dominant term") {
        Series u = mono(Q(-1)) + konst(kOne);
        Series s = pow_series(u, Q(3, 2), Q(2));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->kind == Condition::Kind::ArgCmp);
        CHECK(uc.cases[0].cond->rel == Rel::LE);
        CHECK(uc.cases[0].cond->bound_pi == Q(-1));
        CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 2)), kOne) == 0);
    }

    SECTION("shifted cut from an imaginary dominant coefficient") {
        Series u = z.scaled(kI) + z * z;
        Series s = pow_series(u, Q(3, 2), Q(5));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->rel == Rel::GT);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(3, 4)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1)), kMinusOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 2)), kOne) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 4)), kOne) == 0);
        CHECK(scalar_term_is(s.shifted(Q(-3, 2)).truncated(Q(0)), Q(0),
                             kI.pow_rational(Q(3, 2))));
    }

    SECTION("on-cut constant term keeps the origin on the fallback") {
        Series u = konst(ConstantExpr::from(-2)) + z * z;
        Series s = pow_series(u, Q(3, 4), Q(4));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->rel == Rel::GT);
        CHECK(compare(uc.cases[0].value, kI) == 0);
        // Im(z^2) < 0 crosses the continuation of the cut
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(-1, 4)), kI) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(3, 4)), kI) == 0);
        CHECK(compare(unit_at(*s.global, Q(1, 100), Q(1, 4)), kOne) == 0);
        EvalCtx ctx;
        ctx.prec = 160;
        CHECK(compare(unit_eval(*s.global, PointValue::from_exact(GaussianRational(0)), ctx),
                      kOne) == 0);
        check_pow_grid(u, s, Q(3, 4), Q(1, 100), 360, 26);
    }
}

TEST_CASE("numeric sweeps match the principal oracle") {
    Series z = var_series();
    struct Fixture {
        Series u;
        Rational beta;
        Rational n;
        long bits;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({z * z + z * z * z, Q(3, 2), Q(6), 26});
    fixtures.push_back({z * z + (z * z * z).scaled(ConstantExpr() - kI), Q(3, 2), Q(6), 26});
    fixtures.push_back({z * z + z * z * z, Q(7, 4), Q(7), 22});
    fixtures.push_back({konst(kMinusOne) + mono(Q(1, 4), kI) + z, Q(3, 2), Q(4), 24});
    fixtures.push_back({konst(kMinusOne) + mono(Q(1, 2), kI) + z, Q(3, 2), Q(4), 26});
    fixtures.push_back({konst(kMinusOne) - z * z - z * z * z, Q(3, 2), Q(4), 28});
    fixtures.push_back({z.scaled(kI) + z * z, Q(3, 2), Q(5), 24});
    fixtures.push_back({mono(Q(-1)) + konst(kOne), Q(3, 2), Q(2), 26});
    fixtures.push_back({z * z + z * z * z, Q(-3, 2), Q(0), 24});
    for (const Fixture& f : fixtures) {
        Series s = pow_series(f.u, f.beta, f.n);
        check_pow_grid(f.u, s, f.beta, Q(1, 100), 360, f.bits);
    }
}

TEST_CASE("log-dominant coefficient") {
    Series z = var_series();
    Series lnz = Series::monomial("z", Mode::ComplexPrincipal,
                                  Coefficient::lpow(kOne, Q(1)), Q(0));
    Series u = lnz + z;
    Series s = pow_series(u, Q(3, 2), Q(3));
    // ln(z)^(3/2) leads; the wrap cases never fire on this base but stay
    REQUIRE(s.global);
    auto it = s.terms.find(Q(0));
    REQUIRE(it != s.terms.end());
    REQUIRE(it->second.lpoly.size() == 1);
    CHECK(it->second.lpoly.begin()->first == Q(3, 2));
    check_pow_grid(u, s, Q(3, 2), Q(1, 100), 360, 26);
    check_pow_grid(u, s, Q(3, 2), Q(1, 1000), 360, 30);

    CHECK_THROWS_AS(pow_series(lnz.scaled(kMinusOne) + z, Q(3, 2), Q(3)), UnsupportedError);
    Series ln2 = Series::monomial("z", Mode::ComplexPrincipal, Coefficient::lpow(kOne, Q(2)), Q(0));
    CHECK_THROWS_AS(pow_series(ln2 + z, Q(3, 2), Q(3)), UnsupportedError);
    Series lnx = Series::monomial("x", Mode::RealBranch, Coefficient::lpow(kOne, Q(1)), Q(0));
    CHECK_THROWS_AS(pow_series(lnx + var_series(Mode::RealBranch), Q(3, 2), Q(3)),
                    UnsupportedError);
}

TEST_CASE("real axis powers fold to per-side factors") {
    Series x = var_series(Mode::RealPrincipal);

    SECTION("negative constant base folds to a constant rotation") {
        Series u = konst(ConstantExpr::from(-2), Mode::RealPrincipal) + x;
        Series s = pow_series(u, Q(3, 2), Q(3));
        CHECK(!s.global);
        ConstantExpr want = ConstantExpr::from(-2).pow_rational(Q(3, 2));
        CHECK(scalar_term_is(s, Q(0), want));
        check_pow_real(u, s, Q(3, 2), 24);
    }

    SECTION("half powers of x split the sides") {
        Series u = konst(kMinusOne, Mode::RealPrincipal) - mono(Q(1, 2), kOne, Mode::RealPrincipal);
        Series s = pow_series(u, Q(7, 2), Q(3));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->kind == Condition::Kind::VarSign);
        CHECK(uc.cases[0].cond->rel == Rel::LT);
        CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
        CHECK(compare(uc.otherwise, kOne) == 0);
        CHECK(scalar_term_is(s, Q(0), ConstantExpr() - kI));
        check_pow_real(u, s, Q(7, 2), 20);
    }

    SECTION("fractional exponents below an even power") {
        Series u = mono(Q(4, 3), kOne, Mode::RealPrincipal) + x * x;
        Series s = pow_series(u, Q(3, 2), Q(4));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->kind == Condition::Kind::VarSign);
        CHECK(uc.cases[0].cond->rel == Rel::LT);
        CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
        check_pow_real(u, s, Q(3, 2), 14);
    }

    SECTION("one non-positive degree term becomes a two-case coefficient") {
        Series u = konst(kMinusOne, Mode::RealPrincipal) + x - (x * x).scaled(kI);
        Series s = pow_series(u, Q(7, 2), Q(2));
        CHECK(!s.global);
        auto it = s.terms.find(Q(0));
        REQUIRE(it != s.terms.end());
        REQUIRE(it->second.corr);
        REQUIRE(it->second.corr->role == Role::Xi);
        REQUIRE(it->second.corr->atoms.size() == 1);
        const CaseAtom& at = std::get<CaseAtom>(it->second.corr->atoms[0]);
        REQUIRE(at.cases.size() == 1);
        CHECK(at.cases[0].cond->kind == Condition::Kind::IsZeroVar);
        CHECK(compare(at.cases[0].value, ConstantExpr() - kI) == 0);
        CHECK(compare(at.otherwise, kI) == 0);
        CHECK(scalar_term_is(s, Q(1), (ConstantExpr() - kI) * ConstantExpr::from(Q(7, 2))));
        ConstantExpr deg2 = ConstantExpr::from(Q(-7, 2)) + kI * ConstantExpr::from(Q(35, 8));
        CHECK(scalar_term_is(s, Q(2), deg2));
        check_pow_real(u, s, Q(7, 2), 14);
        EvalCtx ctx;
        ctx.prec = 160;
        ctx.mode = Mode::RealPrincipal;
        ComplexFloat at0 = series_eval(s, PointValue::from_exact(GaussianRational(0)), ctx);
        CHECK(rel_close(at0, ComplexFloat::from(GaussianRational(Q(0), Q(-1)), 160), 80));
    }
}

TEST_CASE("real branch powers") {
    Series x = var_series(Mode::RealBranch);

    SECTION("even-power dominant term needs no factor") {
        Series u = mono(Q(4, 3), kOne, Mode::RealBranch) + x * x;
        Series s = pow_series(u, Q(3, 2), Q(4));
        CHECK(!s.global);
        CHECK(scalar_term_is(s, Q(2), kOne));
        EvalCtx ctx;
        ctx.prec = 160;
        ctx.mode = Mode::RealBranch;
        for (int sgn : {1, -1}) {
            PointValue z = PointValue::polar(Q(1, 100), Q(sgn > 0 ? 0 : 1));
            ComplexFloat uv = series_eval(u, z, ctx);
            REQUIRE(uv.im.is_zero());
            BigFloat want = (uv.re.log() * BigFloat::from(Q(3, 2), 160)).exp();
            ComplexFloat got = series_eval(s, z, ctx);
            CHECK(rel_close(got, ComplexFloat::real(want), 14));
        }
    }

    SECTION("odd root of a negative leading coefficient") {
        Series u = (x * x * x).scaled(kMinusOne) + x * x * x * x;
        Series s = pow_series(u, Q(1, 3), Q(3));
        CHECK(!s.global);
        CHECK(scalar_term_is(s, Q(1), kMinusOne));
        EvalCtx ctx;
        ctx.prec = 160;
        ctx.mode = Mode::RealBranch;
        for (int sgn : {1, -1}) {
            PointValue z = PointValue::polar(Q(1, 100), Q(sgn > 0 ? 0 : 1));
            ComplexFloat uv = series_eval(u, z, ctx);
            BigFloat mag = uv.re.abs().log();
            BigFloat root = (mag * BigFloat::from(Q(1, 3), 160)).exp();
            if (uv.re.sign() < 0) root = BigFloat() - root;
            ComplexFloat got = series_eval(s, z, ctx);
            CHECK(rel_close(got, ComplexFloat::real(root), 20));
        }
    }

    SECTION("square root below an odd power flips the left side") {
        Series u = x * x + x * x * x;
        Series s = pow_series(u, Q(1, 2), Q(3));
        REQUIRE(s.global);
        const UnitCases& uc = only_unit_cases(*s.global);
        REQUIRE(uc.cases.size() == 1);
        CHECK(uc.cases[0].cond->kind == Condition::Kind::VarSign);
        CHECK(compare(uc.cases[0].value, kMinusOne) == 0);
        EvalCtx ctx;
        ctx.prec = 160;
        ctx.mode = Mode::RealBranch;
        for (int sgn : {1, -1}) {
            PointValue z = PointValue::polar(Q(1, 100), Q(sgn > 0 ? 0 : 1));
            ComplexFloat uv = series_eval(u, z, ctx);
            BigFloat want = (uv.re.log() * BigFloat::from(Q(1, 2), 160)).exp();
            ComplexFloat got = series_eval(s, z, ctx);
            CHECK(rel_close(got, ComplexFloat::real(want), 20));
        }
    }

    SECTION("bases with no real side are rejected") {
        CHECK_THROWS_AS(pow_series(konst(kMinusOne, Mode::RealBranch) - x, Q(1, 2), Q(2)),
                        UnsupportedError);
        CHECK_THROWS_AS(pow_series(x.scaled(kMinusOne), Q(1, 2), Q(2)), UnsupportedError);
        CHECK_THROWS_AS(pow_series(x.scaled(kI) + x * x, Q(1, 2), Q(2)), UnsupportedError);
    }

    SECTION("right-only bases stay silent about the left") {
        Series u = x + x * x;
        Series s = pow_series(u, Q(1, 2), Q(2));
        CHECK(!s.global);
        EvalCtx ctx;
        ctx.prec = 160;
        ctx.mode = Mode::RealBranch;
        ComplexFloat left = series_eval(s, PointValue::polar(Q(1, 100), Q(1)), ctx);
        CHECK(left.is_nan());
        ComplexFloat right = series_eval(s, PointValue::polar(Q(1, 100), Q(0)), ctx);
        CHECK(!right.is_nan());
    }
}

TEST_CASE("power of a power") {
    Series z = var_series();
    auto pp = power_of_power(z, Q(2), Q(1, 2));
    CHECK(pp.exponent == Q(1));
    EvalCtx ctx;
    ctx.prec = 160;
    CHECK(compare(unit_eval(pp.factor, PointValue::polar(Q(1), Q(3, 4)), ctx), kMinusOne) == 0);
    CHECK(compare(unit_eval(pp.factor, PointValue::polar(Q(1), Q(1, 4)), ctx), kOne) == 0);
    CHECK(compare(unit_eval(pp.factor, PointValue::polar(Q(1), Q(1, 2)), ctx), kOne) == 0);
    CHECK(compare(unit_eval(pp.factor, PointValue::polar(Q(1), Q(-1, 2)), ctx), kMinusOne) == 0);

    // ((-1)^2)^(1/2) = -1
    auto ppc = power_of_power(konst(kMinusOne), Q(2), Q(1, 2));
    CHECK(compare(unit_eval(ppc.factor, PointValue::polar(Q(1, 2), Q(1, 3)), ctx), kMinusOne) == 0);

    // roots of roots never leave the principal range
    auto pp4 = power_of_power(z, Q(1, 2), Q(1, 2));
    CHECK(pp4.factor.trivially_one());
    CHECK(pp4.exponent == Q(1, 4));

    auto ppint = power_of_power(z * z * z, Q(5), Q(2));
    CHECK(ppint.factor.trivially_one());
    CHECK(ppint.exponent == Q(10));
}

TEST_CASE("argument rewrite on the real branch") {
    CHECK(arg_real_branch(Q(4, 3)) == ArgRewrite::Zero);
    CHECK(arg_real_branch(Q(7, 3)) == ArgRewrite::ArgOfBase);
    CHECK(arg_real_branch(Q(1, 2)) == ArgRewrite::Untouched);
    CHECK(arg_real_branch(Q(3)) == ArgRewrite::ArgOfBase);
    CHECK(arg_real_branch(Q(2)) == ArgRewrite::Zero);
    CHECK(arg_real_branch(Q(0)) == ArgRewrite::Zero);
    CHECK(arg_real_branch(Q(-1, 3)) == ArgRewrite::ArgOfBase);
}

TEST_CASE("pow context invariants") {
    Series z = var_series();
    Series u = z * z + z * z * z;

    SECTION("integer exponents have no factor") {
        PowContext ctx = pow_context(prepare_base(u), Q(2), Mode::ComplexPrincipal, {});
        CHECK(ctx.l.trivially_one());
        CHECK(ctx.lambda.atoms.empty());
        CHECK(unit_factor(split_dominant(u), Q(4), Mode::ComplexPrincipal).trivially_one());
    }

    SECTION("factor splits as floor times wrap") {
        PowContext ctx = pow_context(prepare_base(u), Q(3, 2), Mode::ComplexPrincipal, {});
        CHECK(ctx.psi.role == Role::Psi);
        CHECK(!ctx.lambda.atoms.empty());
        EvalCtx ec;
        ec.prec = 160;
        for (long k : {-7L, -4L, -1L, 0L, 3L, 5L, 8L}) {
            PointValue p = PointValue::polar(Q(1, 100), Q(k, 8));
            ConstantExpr whole = unit_eval(ctx.l, p, ec);
            ConstantExpr parts = unit_eval(ctx.l1, p, ec) * unit_eval(ctx.l2, p, ec);
            CHECK(compare(whole, parts) == 0);
            ComplexFloat v = whole.eval(160);
            CHECK(rel_close(ComplexFloat::real(v.abs()),
                            ComplexFloat::from(GaussianRational(1), 160), 100));
        }
    }

    SECTION("exponent denominators divide the root order") {
        for (Rational beta : {Q(3, 2), Q(7, 4), Q(2, 3), Q(-5, 6)}) {
            PowContext ctx = pow_context(prepare_base(u), beta, Mode::ComplexPrincipal, {});
            long d = beta.denominator_long();
            auto divides = [&](const Rational& v) { return (v * Q(d)).is_integer(); };
            for (const ExpAtom& a : ctx.lambda.atoms) {
                if (std::holds_alternative<Rational>(a)) {
                    CHECK(divides(std::get<Rational>(a)));
                } else if (std::holds_alternative<ExpFloor>(a)) {
                    CHECK(divides(std::get<ExpFloor>(a).coef));
                } else {
                    const ExpCase& c = std::get<ExpCase>(a);
                    CHECK(divides(c.coef * c.otherwise));
                    for (const ExpCaseBranch& b : c.cases) CHECK(divides(c.coef * b.value));
                }
            }
        }
    }

    SECTION("half-integer factors resolve to plus or minus one") {
        Series v = z.scaled(kI) + z * z;
        Series s = pow_series(v, Q(3, 2), Q(5));
        REQUIRE(s.global);
        EvalCtx ec;
        ec.prec = 160;
        for (long k = -17; k <= 18; ++k) {
            ConstantExpr val = unit_eval(*s.global, PointValue::polar(Q(1, 100), Q(k, 18)), ec);
            bool pm = compare(val, kOne) == 0 || compare(val, kMinusOne) == 0;
            CHECK(pm);
        }
    }
}

TEST_CASE("roots compose with integer powers") {
    Series z = var_series();
    EvalCtx ctx;
    ctx.prec = 160;

    SECTION("square of a square root") {
        Series u = z * z + z * z * z;
        Series r = pow_series(u, Q(1, 2), Q(4));
        Series back = pow_series(r, Q(2), Q(5));
        for (long k = -11; k <= 12; ++k) {
            PointValue p = PointValue::polar(Q(1, 100), Q(k, 12));
            CHECK(rel_close(series_eval(back, p, ctx), series_eval(u, p, ctx), 30));
        }
    }

    SECTION("cube of a cube root") {
        Series u = (z * z * z).scaled(kMinusOne) + mono(Q(4));
        Series r = pow_series(u, Q(1, 3), Q(3));
        Series back = pow_series(r, Q(3), Q(4));
        for (long k = -11; k <= 12; ++k) {
            if (k == 12) continue;  // the cut of the root triples inside the power
            PointValue p = PointValue::polar(Q(1, 100), Q(k, 12));
            CHECK(rel_close(series_eval(back, p, ctx), series_eval(u, p, ctx), 30));
        }
    }
}

TEST_CASE("degenerate bases") {
    Series z = var_series();
    Series zero = Series::zero_exact("z", Mode::ComplexPrincipal);
    CHECK(pow_series(zero, Q(2), Q(4)).is_zero());
    CHECK(pow_series(zero, Q(2), Q(4)).is_exact());
    CHECK_THROWS_AS(pow_series(zero, Q(-1), Q(4)), SingularError);
    CHECK_THROWS_AS(pow_series(zero, Q(0), Q(4)), SingularError);

    Series ozero = Series::zero_to("z", Mode::ComplexPrincipal, Q(3));
    Series op = pow_series(ozero, Q(2), Q(10));
    REQUIRE(op.order);
    CHECK(*op.order == Q(6));
    CHECK_THROWS_AS(pow_series(ozero, Q(-1, 2), Q(4)), SingularError);

    Series one = pow_series(z + z * z, Q(0), Q(4));
    CHECK(one.is_exact());
    CHECK(scalar_term_is(one, Q(0), kOne));

    // truncation below the dominant exponent keeps only the order marker
    Series low = pow_series(z * z + z * z * z, Q(3, 2), Q(2));
    CHECK(low.terms.empty());
    REQUIRE(low.order);
    CHECK(*low.order == Q(2));

    // a piecewise dominant coefficient cannot be extracted
    Series pw = pow_series(konst(kMinusOne) + z, Q(3, 2), Q(2));
    CHECK_THROWS_AS(pow_series(pw, Q(1, 2), Q(1)), UnsupportedError);
}
