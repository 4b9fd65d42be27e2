#include <catch2/catch_amalgamated.hpp>

#include "spx/constant.hpp"

using namespace spx;

namespace {

Rational Q(long p, long q = 1) { return Rational(p, q); }

// |v - (re + i im)| < 2^-bits, digit strings frozen from an independent
// 45-digit computation.
bool close_to(const ComplexFloat& v, const char* re, const char* im, long bits = 100) {
    long wp = 160;
    BigFloat er = BigFloat::parse(re, wp), ei = BigFloat::parse(im, wp);
    BigFloat dr = (v.re - er).abs(), di = (v.im - ei).abs();
    BigFloat tol = BigFloat::from(1L, wp).mul_2exp(-bits);
    return dr < tol && di < tol;
}

}  // namespace

TEST_CASE("rational arithmetic and parsing") {
    CHECK(Rational::parse("6/4") == Q(3, 2));
    CHECK(Rational::parse("-10/5") == Q(-2));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK(Q(1, 3) + Q(1, 6) == Q(1, 2));
    CHECK(Q(2, 3) * Q(9, 4) == Q(3, 2));
    CHECK(Q(1) / Q(-4, 7) == Q(-7, 4));
    CHECK_THROWS(Q(1) / Q(0));
    CHECK(Q(7, 2).floor() == Q(3));
    CHECK(Q(-7, 2).floor() == Q(-4));
    CHECK(Q(-7, 2).ceil() == Q(-3));
    CHECK(Q(-3, 2).pow(3) == Q(-27, 8));
    CHECK(Q(4, 9).pow(-2) == Q(81, 16));
    CHECK(Q(5, 3).str() == "5/3");
    CHECK(Q(-4).str() == "-4");
}

TEST_CASE("mods lands in (-v/2, v/2]") {
    CHECK(mods(Q(3), Q(2)) == Q(1));
    CHECK(mods(Q(-1), Q(2)) == Q(1));
    CHECK(mods(Q(1), Q(2)) == Q(1));
    CHECK(mods(Q(7, 2), Q(2)) == Q(-1, 2));
    CHECK(mods(Q(0), Q(2)) == Q(0));
    CHECK(mods(Q(-6), Q(2)) == Q(0));
    // property sweep
    for (long n = -40; n <= 40; ++n) {
        Rational u(n, 7), v(2);
        Rational m = mods(u, v);
        CHECK((u - m) / v == ((u - m) / v).floor());  // integer multiple removed
        CHECK(m <= v / Q(2));
        CHECK(-(v / Q(2)) < m);
    }
}

TEST_CASE("perfect square detection") {
    Rational root;
    CHECK(is_perfect_square(Q(49, 64), &root));
    CHECK(root == Q(7, 8));
    CHECK(!is_perfect_square(Q(8), nullptr));
    CHECK(!is_perfect_square(Q(-4), nullptr));
}

TEST_CASE("gaussian rational field ops") {
    GaussianRational z(Q(3), Q(4));
    CHECK(z.norm2() == Q(25));
    CHECK((z * z.conj()).is_real());
    GaussianRational w = GaussianRational(Q(1), Q(1)) / GaussianRational(Q(1), Q(-1));
    CHECK(w == GaussianRational::unit_i());
    CHECK(GaussianRational::unit_i().pow(2) == GaussianRational(-1));
    CHECK(GaussianRational(Q(1), Q(1)).pow(-2) == GaussianRational(Q(0), Q(-1, 2)));
}

TEST_CASE("gaussian arg on the exact rays") {
    auto q = [](long re, long im) { return GaussianRational(Rational(re), Rational(im)).arg_over_pi(); };
    CHECK(*q(5, 0) == Q(0));
    CHECK(*q(-5, 0) == Q(1));
    CHECK(*q(0, 2) == Q(1, 2));
    CHECK(*q(0, -2) == Q(-1, 2));
    CHECK(*q(3, 3) == Q(1, 4));
    CHECK(*q(-3, 3) == Q(3, 4));
    CHECK(*q(-3, -3) == Q(-3, 4));
    CHECK(*q(3, -3) == Q(-1, 4));
    CHECK(!q(3, 4).has_value());
    CHECK(*q(0, 0) == Q(0));
}

TEST_CASE("bigfloat basics") {
    CHECK(BigFloat::pi(160).str(40) == "3.141592653589793238462643383279502884197");
    BigFloat a = BigFloat::from(Q(1, 3), 256);
    CHECK((a * BigFloat::from(3L, 256) - BigFloat::from(1L, 256)).abs() <
          BigFloat::from(1L, 64).mul_2exp(-250));
    CHECK(BigFloat::from(2L, 128).log().exp().str(30) == "2");
    CHECK(BigFloat::parse("0.5", 64).to_double() == 0.5);
}

TEST_CASE("complex principal argument convention") {
    long p = 128;
    auto arg = [p](double re, double im) {
        return ComplexFloat{BigFloat::from(re, p), BigFloat::from(im, p)}.arg().to_double();
    };
    CHECK(arg(-1.0, 0.0) == Catch::Approx(3.14159265358979324));  // +pi on the cut
    CHECK(arg(1.0, 0.0) == 0.0);
    CHECK(arg(0.0, 0.0) == 0.0);
    CHECK(arg(0.0, -1.0) == Catch::Approx(-1.5707963267948966));
    ComplexFloat m1 = ComplexFloat::from(GaussianRational(-1), p);
    CHECK(close_to(m1.log(), "0", "3.1415926535897932384626433832795028841971694"));
    CHECK(close_to(m1.sqrt(), "0", "1"));
}

TEST_CASE("complex powers") {
    long p = 128;
    ComplexFloat z = ComplexFloat::from(GaussianRational(Q(0), Q(2)), p);
    CHECK(close_to(z.pow(Q(1, 2)), "1", "1"));
    ComplexFloat m8 = ComplexFloat::from(GaussianRational(-8), p);
    CHECK(close_to(m8.pow(Q(1, 3)), "1", "1.73205080756887729352744634150587236694281"));
    ComplexFloat rb = ComplexFloat::pow_real_branch(BigFloat::from(-8L, p), Q(1, 3));
    CHECK(rb.re.to_double() == Catch::Approx(-2.0));
    CHECK(rb.im.is_zero());
    ComplexFloat rb2 = ComplexFloat::pow_real_branch(BigFloat::from(-4L, p), Q(1, 2));
    CHECK(rb2.is_nan());  // even denominator: no real branch
    ComplexFloat rb3 = ComplexFloat::pow_real_branch(BigFloat::from(4L, p), Q(1, 2));
    CHECK(rb3.re.to_double() == Catch::Approx(2.0));
    CHECK(rb3.im.is_zero());
    CHECK(close_to(m8.pow(Q(2)), "64", "0"));
}

TEST_CASE("complex inverse functions match the principal branch") {
    long p = 160;
    auto C = [p](long re, long im) { return ComplexFloat::from(GaussianRational(Rational(re), Rational(im)), p); };
    CHECK(close_to(C(2, 0).atanh(),
                   "0.549306144334054845697622618461262852323745279",
                   "-1.5707963267948966192313216916397514420985847"));
    CHECK(close_to(C(-2, 0).atanh(),
                   "-0.549306144334054845697622618461262852323745279",
                   "1.5707963267948966192313216916397514420985847"));
    CHECK(close_to(C(3, 4).log(),
                   "1.60943791243410037460075933322618763952560135",
                   "0.927295218001612232428512462922428804057074109"));
    CHECK(close_to(C(0, 2).asinh(),
                   "1.31695789692481670862504634730796844402698197",
                   "1.5707963267948966192313216916397514420985847"));
    CHECK(close_to(C(-3, 0).acosh(),
                   "1.76274717403908605046521864995958461805632066",
                   "3.1415926535897932384626433832795028841971694"));
    CHECK(close_to(C(3, 0).acos(), "0", "1.76274717403908605046521864995958461805632066"));
    CHECK(close_to(C(0, 2).atan(),
                   "1.5707963267948966192313216916397514420985847",
                   "0.549306144334054845697622618461262852323745279"));
}

TEST_CASE("constant normal form folds") {
    CHECK(ConstantExpr::neg_one_pow(Q(2)) == ConstantExpr::one());
    CHECK(ConstantExpr::neg_one_pow(Q(7, 2)) ==
          ConstantExpr::from(GaussianRational(Q(0), Q(-1))));
    CHECK(ConstantExpr::i() * ConstantExpr::i() == ConstantExpr::from(-1));
    CHECK(ConstantExpr::neg_one_pow(Q(1, 3)).intpow(3) == ConstantExpr::from(-1));
    CHECK(ConstantExpr::sqrt_rational(Q(8)).str() == "2*sqrt(2)");
    CHECK(ConstantExpr::sqrt_rational(Q(8)) * ConstantExpr::sqrt_rational(Q(2)) ==
          ConstantExpr::from(4));
    CHECK(ConstantExpr::sqrt_rational(Q(49, 64)) == ConstantExpr::from(Q(7, 8)));
    CHECK(ConstantExpr::ln_rational(Q(4)).str() == "2*ln(2)");
    CHECK(ConstantExpr::ln_rational(Q(8)) + ConstantExpr::ln_rational(Q(2)) ==
          ConstantExpr::ln_rational(Q(16)));
    CHECK(ConstantExpr::ln_rational(Q(4, 9)).str() == "2*ln(2) - 2*ln(3)");
    CHECK(ConstantExpr::ln_rational(Q(1)).is_zero());
    CHECK(ConstantExpr::rational_pow(Q(27), Q(2, 3)) == ConstantExpr::from(9));
    CHECK(ConstantExpr::rational_pow(Q(-8), Q(1, 3)).str() == "2*(-1)^(1/3)");
}

TEST_CASE("constant sums cancel structurally") {
    ConstantExpr a = ConstantExpr::pi_times(Q(2, 3)) + ConstantExpr::ln_rational(Q(2));
    ConstantExpr b = a - ConstantExpr::pi_times(Q(2, 3));
    CHECK(b == ConstantExpr::ln_rational(Q(2)));
    CHECK((a - a).is_zero());
    ConstantExpr c = ConstantExpr::ln_rational(Q(4)) - ConstantExpr::ln_rational(Q(2)) -
                     ConstantExpr::ln_rational(Q(2));
    CHECK(c.is_zero());
}

TEST_CASE("constant reciprocal") {
    ConstantExpr s = ConstantExpr::from(2) + ConstantExpr::sqrt_rational(Q(3));
    ConstantExpr r = s.recip();
    CHECK(r == ConstantExpr::from(2) - ConstantExpr::sqrt_rational(Q(3)));
    CHECK((s * r) == ConstantExpr::one());
    ConstantExpr t = ConstantExpr::pi_times(Q(1, 2)) * ConstantExpr::sqrt_rational(Q(2));
    CHECK((t * t.recip()) == ConstantExpr::one());
    ConstantExpr sum3 = ConstantExpr::one() + ConstantExpr::pi() + ConstantExpr::sqrt_rational(Q(2));
    CHECK_THROWS(sum3.recip());
}

TEST_CASE("constant fractional powers on the exact rays") {
    ConstantExpr tw = ConstantExpr::from(GaussianRational(Q(0), Q(2)));
    CHECK(close_to(tw.pow_rational(Q(1, 2)).eval(128), "1", "1"));
    ConstantExpr m1 = ConstantExpr::from(-1);
    CHECK(m1.pow_rational(Q(1, 3)) == ConstantExpr::neg_one_pow(Q(1, 3)));
    ConstantExpr diag = ConstantExpr::from(GaussianRational(Q(1), Q(1)));
    CHECK(close_to(diag.pow_rational(Q(2)).eval(128), "0", "2"));
    CHECK_THROWS((ConstantExpr::one() + ConstantExpr::pi()).pow_rational(Q(1, 2)));
}

TEST_CASE("constant evaluation against frozen oracles") {
    CHECK(close_to(ConstantExpr::ln_general(ConstantExpr::from(2) + ConstantExpr::sqrt_rational(Q(3))).eval(160),
                   "1.31695789692481670862504634730796844402698197", "0"));
    CHECK(close_to(ConstantExpr::arccosh_rational(Q(2)).eval(160),
                   "1.31695789692481670862504634730796844402698197", "0"));
    CHECK(close_to(ConstantExpr::ln_gaussian(GaussianRational(Q(3), Q(4))).eval(160),
                   "1.60943791243410037460075933322618763952560135",
                   "0.927295218001612232428512462922428804057074109"));
    CHECK(close_to(ConstantExpr::arctanh_rational(Q(2)).eval(160),
                   "0.549306144334054845697622618461262852323745279",
                   "-1.5707963267948966192313216916397514420985847"));
    CHECK(close_to(ConstantExpr::arctanh_rational(Q(-2)).eval(160),
                   "-0.549306144334054845697622618461262852323745279",
                   "1.5707963267948966192313216916397514420985847"));
    CHECK(close_to(ConstantExpr::neg_one_pow(Q(1, 3)).eval(160),
                   "0.5", "0.866025403784438646763723170752936183471402627"));
    CHECK(close_to(ConstantExpr::arccos_rational(Q(-1, 2)).eval(160),
                   "2.09439510239319549230842892218633525613144627", "0"));
    CHECK(close_to(ConstantExpr::arccosh_rational(Q(-3)).eval(160),
                   "1.76274717403908605046521864995958461805632066",
                   "3.1415926535897932384626433832795028841971694"));
}

TEST_CASE("constant evaluation is stable across precisions") {
    ConstantExpr c = ConstantExpr::ln_gaussian(GaussianRational(Q(3), Q(4))) *
                         ConstantExpr::pi_times(Q(5, 7)) +
                     ConstantExpr::arctanh_rational(Q(1, 3));
    ComplexFloat lo = c.eval(64), hi = c.eval(512);
    CHECK((lo.re - hi.re.round_to(64)).abs() < BigFloat::from(1L, 64).mul_2exp(-58));
    CHECK((lo.im - hi.im.round_to(64)).abs() < BigFloat::from(1L, 64).mul_2exp(-58));
}

TEST_CASE("constant classification") {
    ConstantExpr c = ConstantExpr::pi_times(Q(2)) + ConstantExpr::ln_rational(Q(3));
    CHECK(c.sign_sym() == 1);
    CHECK((-c).sign_sym() == -1);
    CHECK(c.arg_over_pi_sym() == Q(0));
    CHECK((-c).arg_over_pi_sym() == Q(1));
    CHECK((ConstantExpr::i() * c).arg_over_pi_sym() == Q(1, 2));
    ConstantExpr mixed = ConstantExpr::pi() - ConstantExpr::ln_rational(Q(2));
    CHECK(!mixed.sign_sym().has_value());
    CHECK(ConstantExpr().sign_sym() == 0);
    CHECK(*ConstantExpr::neg_one_pow(Q(1, 3)).arg_over_pi_sym() == Q(1, 3));
    CHECK(*ConstantExpr::pi_i_times(Q(-3)).arg_over_pi_sym() == Q(-1, 2));
}

TEST_CASE("constant printing") {
    CHECK(ConstantExpr().str() == "0");
    CHECK(ConstantExpr::pi_i_times(Q(1, 2)).str() == "1/2*i*pi");
    CHECK((ConstantExpr::from(GaussianRational(Q(1), Q(-2))) * ConstantExpr::pi()).str() ==
          "(1 - 2*i)*pi");
    CHECK((ConstantExpr::from(2) - ConstantExpr::sqrt_rational(Q(3))).str() == "2 - sqrt(3)");
    CHECK(ConstantExpr::rational_pow(Q(2), Q(3, 4)).str() == "2^(3/4)");
    CHECK((ConstantExpr::pi() * ConstantExpr::pi()).str() == "pi^2");
    CHECK(ConstantExpr::ln_general(ConstantExpr::from(2) + ConstantExpr::sqrt_rational(Q(3))).str() ==
          "ln(2 + sqrt(3))");
}
