#include <cmath>

#include "doctest.h"
#include "kte/error.hpp"
#include "kte/expr.hpp"

using namespace kte;

TEST_CASE("parse and evaluate") {
    auto e = RadialExpr::parse("s^2+s^4");
    CHECK(e.value(0.0) == 0.0);
    CHECK(e.value(1.0) == 2.0);
    CHECK(e.value(2.0) == 20.0);
    CHECK(e.min_exponent() == 2.0);
    CHECK(e.max_exponent() == 4.0);
    CHECK_FALSE(e.linear_at_infinity());

    auto m = RadialExpr::parse("max(s^2, 0.5*s^3)");
    CHECK(m.value(1.0) == 1.0);
    CHECK(m.value(4.0) == 32.0);

    auto k = RadialExpr::parse(" 3 * ( s + s^1.5 ) * 2 ");
    CHECK(k.value(4.0) == doctest::Approx(6.0 * (4.0 + 8.0)));
    CHECK(RadialExpr::parse("s").linear_at_infinity());
}

TEST_CASE("round trip through str") {
    for (const char* text : {"s^2+s^4", "max(s^2, 0.5*s^3)", "3*(s+s^1.5)", "max(s, s^2)+2*s^3", "s^1.25"}) {
        auto e = RadialExpr::parse(text);
        auto back = RadialExpr::parse(e.str());
        for (double s : {0.0, 0.3, 1.0, 2.7, 11.0}) CHECK(back.value(s) == doctest::Approx(e.value(s)).epsilon(1e-14));
    }
}

TEST_CASE("jets agree with finite differences") {
    for (const char* text : {"s^2+s^4", "max(s^2, 0.5*s^3)", "3*(s+s^1.5)", "s^2.5"}) {
        auto e = RadialExpr::parse(text);
        for (double s : {0.2, 0.9, 1.7, 3.1}) {
            auto j = e.jet(s);
            const double d = 1e-5;
            CHECK(j.value == e.value(s));
            CHECK(j.d1 == doctest::Approx((e.value(s + d) - e.value(s - d)) / (2 * d)).epsilon(1e-6));
            CHECK(j.d2 ==
                  doctest::Approx((e.value(s + d) - 2 * e.value(s) + e.value(s - d)) / (d * d)).epsilon(1e-3));
        }
    }
    // Right derivatives at a kink of max.
    auto m = RadialExpr::parse("max(s^2, 0.5*s^3)");
    auto j = m.jet(2.0);
    CHECK(j.d1 == doctest::Approx(6.0));
}

TEST_CASE("malformed input") {
    for (const char* bad : {"", "s^0.5", "0*s^2", "-s^2", "s^", "max()", "max(s^2", "s^2+", "x^2", "s^2 s^3",
                            "(s^2", "s^2)", "2*"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(RadialExpr::parse(bad), Error);
    }
    try {
        RadialExpr::parse("s^0.5");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
    }
}
