#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace mahler;
using namespace mahler::test;

TEST_CASE("Rudin-Shapiro companion matrix") {
    MahlerEquation eq = rs_equation();
    MahlerSystem sys = build_companion(eq);
    CHECK(sys.companion);
    CHECK(sys.size() == 2);
    FieldPtr q = eq.field;
    CHECK(sys.A.at(0, 0).is_zero());
    CHECK(sys.A.at(0, 1) == RationalFunction::one(q));
    CHECK(sys.A.at(1, 0) == parse_rf(q, "1/(2*z)"));
    CHECK(sys.A.at(1, 1) == parse_rf(q, "(z-1)/(2*z)"));
}

TEST_CASE("order one companion") {
    FieldPtr q = Field::rationals();
    MahlerEquation eq = MahlerEquation::make(2, q, {parse_rf(q, "-2"), parse_rf(q, "1")});
    MahlerSystem sys = build_companion(eq);
    CHECK(sys.size() == 1);
    CHECK(sys.A.at(0, 0) == parse_rf(q, "2"));
}

TEST_CASE("Carlitz companion entries") {
    MahlerEquation eq = carlitz_equation(3);
    MahlerSystem sys = build_companion(eq);
    CHECK(sys.size() == 2);
    // -a_0 / a_2 = z^9 - theta
    CHECK(sys.A.at(1, 0) == parse_rf(eq.field, "z^9-theta"));
}

TEST_CASE("newton slopes") {
    MahlerEquation rs = rs_equation();
    auto s = newton_slopes(rs);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == Rational(0));
    CHECK(s[1] == Rational(1, 2));

    auto sc = newton_slopes(carlitz_equation(3));
    REQUIRE(sc.size() == 1);
    CHECK(sc[0] == Rational(0));

    FieldPtr q = Field::rationals();
    MahlerEquation e2 = MahlerEquation::make(2, q, {parse_rf(q, "1"), parse_rf(q, "z")});
    auto s2 = newton_slopes(e2);
    REQUIRE(s2.size() == 1);
    CHECK(s2[0] == Rational(1));
}

TEST_CASE("ramification index") {
    CHECK(ramification_index({Rational(0), Rational(1, 2)}, 2) == 1);
    CHECK(ramification_index({Rational(1, 3)}, 2) == 3);
    CHECK(ramification_index({}, 2) == 1);
    CHECK(ramification_index({Rational(2), Rational(-1)}, 3) == 1);
    CHECK(ramification_index({Rational(1, 6)}, 2) == 3);
    CHECK(ramification_index({Rational(1, 6)}, 3) == 2);
    // d | p^m - 1 for the y + z y(z^4) = 0 guard case (slope 1/3, m = 2, p = 2)
    FieldPtr q = Field::rationals();
    MahlerEquation e = MahlerEquation::make(2, q, {parse_rf(q, "1"), RationalFunction::zero(q), parse_rf(q, "z")});
    auto s = newton_slopes(e);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == Rational(1, 3));
    long d = ramification_index(s, 2);
    CHECK(d == 3);
    CHECK((4 - 1) % d == 0);
}

TEST_CASE("substitution z -> z^d normalizes the index to 1") {
    FieldPtr q = Field::rationals();
    // slope 1/3 under p = 2 forces d = 3
    MahlerEquation eq = MahlerEquation::make(2, q, {parse_rf(q, "1"), RationalFunction::zero(q), parse_rf(q, "z")});
    long d = ramification_index(newton_slopes(eq), 2);
    REQUIRE(d == 3);
    MahlerEquation sub = eq.substitute_power(d);
    CHECK(ramification_index(newton_slopes(sub), 2) == 1);
    // and the RS equation is already normalized
    CHECK(ramification_index(newton_slopes(rs_equation().substitute_power(1)), 2) == 1);
}

TEST_CASE("equation validation") {
    FieldPtr q = Field::rationals();
    CHECK_THROWS_AS(MahlerEquation::make(2, q, {RationalFunction::zero(q), parse_rf(q, "1")}),
                    InputError);
    CHECK_THROWS_AS(MahlerEquation::make(1, q, {parse_rf(q, "1"), parse_rf(q, "1")}), InputError);
    CHECK_THROWS_AS(MahlerSystem::make(2, q, rfmat_zero(q, 2, 2)), InputError);
}
