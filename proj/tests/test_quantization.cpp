#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qebcheck/quantization.hpp"

using namespace qeb;

TEST_CASE("clamp") {
    CHECK(clamp_value(5.0, -8.0, 7.0) == 5.0);
    CHECK(clamp_value(-12.0, -8.0, 7.0) == -8.0);
    CHECK(clamp_value(16.0, 0.0, 15.0) == 15.0);
    CHECK(clamp_value(int64_t(16), int64_t(0), int64_t(15)) == 15);
    CHECK_THROWS_AS(clamp_value(1.0, 2.0, -2.0), std::invalid_argument);
}

TEST_CASE("round to nearest, ties away from zero") {
    CHECK(round_nearest(1.3125) == 1);
    CHECK(round_nearest(3.5625) == 4);
    CHECK(round_nearest(-1.6875) == -2);
    CHECK(round_nearest(0.5) == 1);
    CHECK(round_nearest(-0.5) == -1);
    CHECK(round_nearest(2.5) == 3);
    CHECK(round_nearest(-2.5) == -3);
    CHECK(round_nearest(0.0) == 0);
    CHECK_THROWS_AS(round_nearest(std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(round_nearest(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(round_nearest(1e19), std::invalid_argument);
}

TEST_CASE("config bounds") {
    QuantConfig u4{Signedness::Unsigned, 4, 4};
    CHECK(u4.lb() == 0);
    CHECK(u4.ub() == 15);
    QuantConfig s4{Signedness::Signed, 4, 2};
    CHECK(s4.lb() == -8);
    CHECK(s4.ub() == 7);
    QuantConfig s32{Signedness::Signed, 32, 16};
    CHECK(s32.lb() == -(int64_t(1) << 31));
    CHECK(s32.ub() == (int64_t(1) << 31) - 1);
    CHECK_THROWS_AS((QuantConfig{Signedness::Signed, 0, 0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((QuantConfig{Signedness::Signed, 33, 0}.validate()), std::invalid_argument);
}

TEST_CASE("quantize_value") {
    QuantConfig cw{Signedness::Signed, 4, 2};
    CHECK(quantize_value(1.2, cw) == 5);
    CHECK(quantize_value(0.8, cw) == 3);
    CHECK(quantize_value(0.0, QuantConfig{Signedness::Unsigned, 8, 8}) == 0);
    // saturation on both ends
    CHECK(quantize_value(100.0, cw) == 7);
    CHECK(quantize_value(-100.0, cw) == -8);
}

TEST_CASE("quantize_value is monotone and idempotent on the grid") {
    QuantConfig c{Signedness::Signed, 6, 3};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        double a = dist(rng), b = dist(rng);
        if (a > b) std::swap(a, b);
        CHECK(quantize_value(a, c) <= quantize_value(b, c));
    }
    for (int64_t v = c.lb(); v <= c.ub(); ++v)
        CHECK(quantize_value(double(v) / 8.0, c) == v);
}

TEST_CASE("scheme validation") {
    QuantScheme s;
    s.weights = {Signedness::Signed, 4, 2};
    s.biases = {Signedness::Signed, 4, 4};
    s.input = {Signedness::Unsigned, 4, 4};
    s.hidden = {Signedness::Unsigned, 4, 2};
    CHECK_NOTHROW(s.validate());
    s.hidden.sign = Signedness::Signed;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("signedness strings") {
    CHECK(to_string(Signedness::Unsigned) == "+");
    CHECK(signedness_from_string("+") == Signedness::Unsigned);
    CHECK(signedness_from_string(to_string(Signedness::Signed)) == Signedness::Signed);
    CHECK(signedness_from_string("+-") == Signedness::Signed);
    CHECK_THROWS_AS(signedness_from_string("x"), std::invalid_argument);
}
