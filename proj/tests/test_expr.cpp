#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "noether2d/expr.hpp"
#include "support.hpp"

using namespace noether2d;
using testsupport::central_diff;

namespace {

double eval_at(const Expr& e, std::initializer_list<std::pair<std::string, double>> vals) {
    Bindings<double> env;
    for (const auto& [k, v] : vals) env.set(k, v);
    return e.eval(env);
}

double eval_t(const Expr& e, double t) { return eval_at(e, {{"t", t}}); }

}  // namespace

TEST_CASE("parse and evaluate basics") {
    CHECK(eval_t(parse_expression("2*t + sin(t)"), 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_at(parse_expression("x^2+y^2"), {{"x", 3.0}, {"y", 4.0}}) == doctest::Approx(25.0));
    CHECK(eval_t(parse_expression("exp(ln(t))"), 2.5) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(eval_t(parse_expression("t^-2"), 2.0) == doctest::Approx(0.25));
    CHECK(eval_t(parse_expression("t^(1/2)"), 9.0) == doctest::Approx(3.0));
    CHECK(eval_t(parse_expression("atan(t)"), 1.0) == doctest::Approx(std::atan(1.0)));
    CHECK(eval_t(parse_expression("-t^2"), 3.0) == doctest::Approx(-9.0));
}

TEST_CASE("print round-trip is value preserving") {
    const Expr e = parse_expression("t^3");
    const Expr back = parse_expression(e.str());
    CHECK(eval_t(back, 2.0) == doctest::Approx(8.0));

    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        const Expr r = testsupport::random_expr_tree(rng, {"x", "y"}, 3);
        const Expr rt = parse_expression(r.str());
        std::uniform_real_distribution<double> pt(-2.0, 2.0);
        for (int j = 0; j < 5; ++j) {
            const double x = pt(rng), y = pt(rng);
            double v0, v1;
            try {
                v0 = eval_at(r, {{"x", x}, {"y", y}});
                v1 = eval_at(rt, {{"x", x}, {"y", y}});
            } catch (const ExprEvalError&) {
                continue;
            }
            if (!std::isfinite(v0)) continue;
            CHECK(v1 == doctest::Approx(v0).epsilon(1e-12));
        }
    }
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(parse_expression("rho*("), ExprParseError);
    try {
        parse_expression("rho*(");
    } catch (const ExprParseError& e) {
        CHECK(e.offset() == 5);
    }
    try {
        parse_expression("foo(t)");
    } catch (const ExprParseError& e) {
        CHECK(std::string(e.what()).find("unknown function") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expression("t^x"), ExprParseError);      // non-constant exponent
    CHECK_THROWS_AS(parse_expression("2*t 3"), ExprParseError);    // trailing input
    CHECK_THROWS_AS(parse_expression("(1+2"), ExprParseError);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(eval_t(parse_expression("1/t"), 0.0), ExprEvalError);
    CHECK_THROWS_AS(eval_t(parse_expression("ln(t)"), -1.0), ExprEvalError);
    CHECK_THROWS_AS(eval_t(parse_expression("sqrt(t)"), -2.0), ExprEvalError);
    CHECK_THROWS_AS(eval_t(parse_expression("x + t"), 1.0), ExprEvalError);  // unbound x
    try {
        eval_t(parse_expression("1/t"), 0.0);
    } catch (const ExprEvalError& e) {
        // error message reports the variable values
        CHECK(std::string(e.what()).find("t=0") != std::string::npos);
    }
}

TEST_CASE("exact derivatives of simple forms") {
    const Expr cubic = parse_expression("t^3");
    const Expr dcubic = cubic.derivative("t");
    for (double t : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(eval_t(dcubic, t) == doctest::Approx(3.0 * t * t).epsilon(1e-14));

    // product rule: d/dt (t^2 sin t) = 2 t sin t + t^2 cos t
    const Expr prod = parse_expression("t^2 * sin(t)");
    const Expr dprod = prod.derivative("t");
    for (double t : {-1.0, 0.3, 2.0})
        CHECK(eval_t(dprod, t) ==
              doctest::Approx(2 * t * std::sin(t) + t * t * std::cos(t)).epsilon(1e-14));

    // derivative with respect to an absent variable is zero
    CHECK(eval_t(cubic.derivative("x"), 5.0) == 0.0);

    // repeated application: second derivative of sin is -sin
    const Expr s = parse_expression("sin(t)");
    const Expr dd = s.derivative("t").derivative("t");
    for (double t : {-1.0, 0.0, 0.7})
        CHECK(eval_t(dd, t) == doctest::Approx(-std::sin(t)).epsilon(1e-14));
}

TEST_CASE("random polynomial derivative matches finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    for (int k = 0; k < 40; ++k) {
        const Expr p = testsupport::random_polynomial(rng, "t");
        const Expr dp = p.derivative("t");
        for (int j = 0; j < 10; ++j) {
            const double t = pt(rng);
            const double want = central_diff([&](double q) { return eval_t(p, q); }, t);
            const double got = eval_t(dp, t);
            CHECK(std::abs(got - want) <= 1e-6 * std::max(1.0, std::abs(got)));
        }
    }
}

TEST_CASE("derivative vs finite difference on random expression trees") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    int checked = 0;
    while (checked < 200) {
        const Expr e = testsupport::random_expr_tree(rng, {"t"}, 4);
        Expr de;
        try {
            de = e.derivative("t");
        } catch (const Error&) {
            continue;
        }
        for (int j = 0; j < 20 && checked < 200; ++j) {
            const double t = pt(rng);
            double fd, fd2, sym;
            try {
                auto f = [&](double q) { return eval_t(e, q); };
                const double h = testsupport::kFdH * std::max(1.0, std::abs(t));
                fd = (f(t + h) - f(t - h)) / (2 * h);
                fd2 = (f(t + h / 2) - f(t - h / 2)) / h;
                sym = eval_t(de, t);
            } catch (const ExprEvalError&) {
                continue;
            }
            if (!std::isfinite(fd) || !std::isfinite(sym) || std::abs(eval_t(e, t)) > 1e4)
                continue;
            // keep only points where the finite difference itself is trustworthy
            if (std::abs(fd - fd2) > 5e-7 * std::max(1.0, std::abs(fd))) continue;
            CHECK(std::abs(sym - fd) <= 1e-6 * std::max(1.0, std::abs(sym)));
            ++checked;
        }
    }
}

TEST_CASE("simplify preserves value and is idempotent") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    for (int k = 0; k < 60; ++k) {
        const Expr e = testsupport::random_expr_tree(rng, {"x", "y"}, 3);
        const Expr s1 = e.simplified();
        const Expr s2 = s1.simplified();
        for (int j = 0; j < 5; ++j) {
            const double x = pt(rng), y = pt(rng);
            double v, v1, v2;
            try {
                v = eval_at(e, {{"x", x}, {"y", y}});
                v1 = eval_at(s1, {{"x", x}, {"y", y}});
                v2 = eval_at(s2, {{"x", x}, {"y", y}});
            } catch (const ExprEvalError&) {
                continue;
            }
            if (!std::isfinite(v)) continue;
            CHECK(std::abs(v1 - v) <= 1e-12 * std::max(1.0, std::abs(v)));
            CHECK(std::abs(v2 - v1) <= 1e-12 * std::max(1.0, std::abs(v1)));
        }
    }

    // like-term collection
    const Expr collected = parse_expression("2*x + 3*x - x + 1 + 2").simplified();
    CHECK(eval_at(collected, {{"x", 5.0}}) == doctest::Approx(23.0));
    CHECK(collected.str().find("x") != std::string::npos);
}

TEST_CASE("dual evaluation carries exact partials") {
    const Expr e = parse_expression("x^2*y + sin(x*t)");
    Bindings<Dual3> env;
    env.set("x", Dual3::var_x(1.3)).set("y", Dual3::var_y(-0.7)).set("t", Dual3::var_t(0.4));
    const Dual3 r = e.eval(env);
    const double x = 1.3, y = -0.7, t = 0.4;
    CHECK(r.v == doctest::Approx(x * x * y + std::sin(x * t)).epsilon(1e-15));
    CHECK(r.dx == doctest::Approx(2 * x * y + t * std::cos(x * t)).epsilon(1e-14));
    CHECK(r.dy == doctest::Approx(x * x).epsilon(1e-14));
    CHECK(r.dt == doctest::Approx(x * std::cos(x * t)).epsilon(1e-14));
}

TEST_CASE("variables are reported sorted and unique") {
    const Expr e = parse_expression("y + x*y + sin(x)");
    const auto vars = e.variables();
    REQUIRE(vars.size() == 2);
    CHECK(vars[0] == "x");
    CHECK(vars[1] == "y");
    CHECK(e.depends_on("x"));
    CHECK(!e.depends_on("t"));
}
