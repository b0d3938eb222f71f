#include <doctest.h>

#include "gluecd/taylor.hpp"
#include "oracles.hpp"

using namespace gluecd;

TEST_CASE("jet of x^2 and sin at simple points") {
    ScalarField f = parse_field("x1^2", 1);
    Jet j = jet_eval(f, make_point(3.0), 2);
    CHECK(j.value == 9.0);
    CHECK(j.first[0] == 6.0);
    CHECK(j.second[0][0] == 2.0);

    ScalarField s = parse_field("sin(x1)", 1);
    Jet js = jet_eval(s, make_point(0.0), 2);
    CHECK(js.value == 0.0);
    CHECK(js.first[0] == 1.0);
    CHECK(js.second[0][0] == 0.0);
}

TEST_CASE("jets agree with the finite-difference oracle") {
    struct Case {
        const char* expr;
        int arity;
        Point at;
    };
    const Case cases[] = {
        {"x1^3*x2 - 2*x1*x2^2 + 0.5*x2^3", 2, make_point(0.7, -0.4)},
        {"sin(x1)*cos(x2)", 2, make_point(0.9, 0.3)},
        {"exp(x1 - x2^2)", 2, make_point(0.2, 0.5)},
        {"sqrt(x1 + 2)/(x2 + 3)", 2, make_point(0.4, 0.1)},
        {"sinh(x1)*cosh(x2) + tan(x1/2)", 2, make_point(0.6, -0.2)},
        {"log(x1 + 2)^2", 2, make_point(0.8, 0.0)},
        {"x1^2*x2*x3 - x3^3", 3, make_point(0.5, 1.2, -0.7)},
        {"(1 - x2)^2", 2, make_point(0.1, 0.3)},
        {"cos(x2)^2", 2, make_point(0.0, 0.6)},
    };
    for (const Case& c : cases) {
        ScalarField f = parse_field(c.expr, c.arity);
        Jet j = jet_eval(f, c.at, 3);
        oracles::Fn fn = [&](const std::array<double, 4>& y) { return f.value(y); };
        auto close = [](double a, double b) {
            return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        for (int i = 0; i < c.arity; ++i) {
            CHECK_MESSAGE(close(j.first[i], oracles::fd_partial(fn, c.at, i, 1e-2)), c.expr);
            for (int k = i; k < c.arity; ++k) {
                CHECK_MESSAGE(close(j.second[i][k], oracles::fd_second(fn, c.at, i, k, 2e-2)),
                              c.expr);
                for (int l = k; l < c.arity; ++l)
                    CHECK_MESSAGE(
                        close(j.third[i][k][l], oracles::fd_third(fn, c.at, i, k, l, 4e-2)),
                        c.expr);
            }
        }
    }
}

TEST_CASE("jet symmetry is exact") {
    ScalarField f = parse_field("sin(x1*x2)*exp(x3) + x1^2*x3", 3);
    Jet j = jet_eval(f, make_point(0.4, -0.8, 0.2), 3);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            CHECK(j.second[i][k] == j.second[k][i]);
            for (int l = 0; l < 3; ++l) {
                CHECK(j.third[i][k][l] == j.third[k][i][l]);
                CHECK(j.third[i][k][l] == j.third[i][l][k]);
            }
        }
}

TEST_CASE("non-differentiable points are reported") {
    ScalarField f = parse_field("sqrt(x1)", 1);
    CHECK_THROWS_AS(jet_eval(f, make_point(0.0), 1), EvalError);
    CHECK(f.value(make_point(0.0)) == 0.0);
    ScalarField g = parse_field("x1^(-1)", 1);
    CHECK_THROWS_AS(jet_eval(g, make_point(0.0), 1), EvalError);
}

TEST_CASE("variable exponents") {
    ScalarField f = parse_field("x1^x2", 2);
    const Point p = make_point(1.5, 2.5);
    Jet j = jet_eval(f, p, 2);
    oracles::Fn fn = [&](const std::array<double, 4>& y) { return f.value(y); };
    CHECK(j.value == doctest::Approx(std::pow(1.5, 2.5)));
    CHECK(j.first[0] == doctest::Approx(oracles::fd_partial(fn, p, 0, 1e-3)));
    CHECK(j.first[1] == doctest::Approx(oracles::fd_partial(fn, p, 1, 1e-3)));
    CHECK(j.second[0][1] == doctest::Approx(oracles::fd_second(fn, p, 0, 1, 1e-2)));
}
