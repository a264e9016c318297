#include <catch_amalgamated.hpp>

#include <cmath>

#include "hpheat/basis.hpp"

using namespace hpheat;
using Catch::Matchers::WithinAbs;

TEST_CASE("legendre polynomials match closed forms") {
    for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
        CHECK_THAT(legendre_eval(2, x), WithinAbs(0.5 * (3 * x * x - 1), 1e-15));
        CHECK_THAT(legendre_eval(3, x), WithinAbs(0.5 * (5 * x * x * x - 3 * x), 1e-15));
        CHECK_THAT(legendre_eval(7, 1.0), WithinAbs(1.0, 1e-15));
        CHECK_THAT(legendre_eval(7, -1.0), WithinAbs(-1.0, 1e-15));
    }
    CHECK_THROWS_AS(legendre_eval(-1, 0.0), std::invalid_argument);
}

TEST_CASE("bubble modes vanish at the element ends") {
    for (int p = 2; p <= kMaxDegree; ++p) {
        const ShapeSet s(p);
        for (int k = 3; k <= s.count(); ++k) {
            CHECK(std::abs(s.value(k, -1.0)) <= 1e-14);
            CHECK(std::abs(s.value(k, 1.0)) <= 1e-14);
        }
    }
}

TEST_CASE("vertex functions interpolate the ends and sum to one") {
    const ShapeSet s(4);
    CHECK(s.value(1, -1.0) == 1.0);
    CHECK(s.value(1, 1.0) == 0.0);
    CHECK(s.value(2, 1.0) == 1.0);
    for (double x : {-0.8, 0.1, 0.9}) CHECK_THAT(s.value(1, x) + s.value(2, x), WithinAbs(1.0, 1e-15));
}

TEST_CASE("bubble derivatives are orthonormal") {
    for (int p = 2; p <= kMaxDegree; ++p) {
        const ShapeSet s(p);
        const QuadratureRule rule = gauss_rule(p + 2);
        for (int j = 3; j <= s.count(); ++j)
            for (int k = 3; k <= s.count(); ++k) {
                double v = 0.0;
                for (std::size_t g = 0; g < rule.size(); ++g)
                    v += rule.weights[g] * s.deriv(j, rule.points[g]) * s.deriv(k, rule.points[g]);
                CHECK_THAT(v, WithinAbs(j == k ? 1.0 : 0.0, 1e-12));
            }
    }
}

TEST_CASE("derivatives agree with central differences") {
    const ShapeSet s(kMaxDegree);
    const double h = 1e-6;
    for (int k = 1; k <= s.count(); ++k)
        for (double x : {-0.9, -0.2, 0.35, 0.8})
            CHECK_THAT(s.deriv(k, x), WithinAbs((s.value(k, x + h) - s.value(k, x - h)) / (2 * h), 1e-6));
}

TEST_CASE("shape values at sample points") {
    // N_3(0) = -3/(2 sqrt 6), N_4(1/2) = (L_3 - L_1)(1/2) / sqrt 10 = -15/(16 sqrt 10),
    // N_5'(1/2) = sqrt(7/2) L_3(1/2) = -7/16 sqrt(7/2)
    const ShapeSet s(5);
    CHECK_THAT(s.value(3, 0.0), WithinAbs(-1.5 / std::sqrt(6.0), 1e-15));
    CHECK_THAT(s.value(4, 0.5), WithinAbs(-15.0 / (16.0 * std::sqrt(10.0)), 1e-15));
    CHECK_THAT(s.deriv(5, 0.5), WithinAbs(-7.0 / 16.0 * std::sqrt(3.5), 1e-15));
}

TEST_CASE("gauss rules integrate monomials exactly to degree 2n - 1") {
    for (int n = 1; n <= 16; ++n) {
        const QuadratureRule rule = gauss_rule(n);
        REQUIRE(rule.size() == static_cast<std::size_t>(n));
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double v = 0.0;
            for (std::size_t g = 0; g < rule.size(); ++g) v += rule.weights[g] * std::pow(rule.points[g], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            CHECK_THAT(v, WithinAbs(exact, 1e-13));
        }
    }
    CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
}

TEST_CASE("shape set rejects bad degrees and indices") {
    CHECK_THROWS_AS(ShapeSet(0), std::invalid_argument);
    CHECK_THROWS_AS(ShapeSet(kMaxDegree + 1), std::invalid_argument);
    const ShapeSet s(3);
    CHECK_THROWS_AS(s.value(0, 0.0), std::out_of_range);
    CHECK_THROWS_AS(s.deriv(5, 0.0), std::out_of_range);
}

TEST_CASE("element map is affine and invertible") {
    const ElementMap m{0.2, 0.7};
    CHECK(m.to_physical(-1.0) == 0.2);
    CHECK_THAT(m.to_physical(1.0), WithinAbs(0.7, 1e-16));
    CHECK_THAT(m.jacobian(), WithinAbs(0.25, 1e-16));
    for (double x : {0.2, 0.33, 0.7}) CHECK_THAT(m.to_physical(m.to_master(x)), WithinAbs(x, 1e-15));
}
