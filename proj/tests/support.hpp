#pragma once

// Shared helpers for the test suites: seeded random expressions, random
// scenario generation per symmetry case, and finite-difference oracles.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "noether2d/dynamics.hpp"
#include "noether2d/fields.hpp"
#include "noether2d/verify.hpp"

namespace testsupport {

using namespace noether2d;

inline const double kFdH = std::cbrt(std::numeric_limits<double>::epsilon());

// Central finite difference of a single-variable function.
template <class F>
double central_diff(const F& f, double x) {
    const double h = kFdH * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

//--------------------- random expressions (seeded) ---------------------//

// Random polynomial with integer-ish coefficients, degree <= 4.
inline Expr random_polynomial(std::mt19937_64& rng, const std::string& var) {
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_int_distribution<int> deg(1, 4);
    const int n = deg(rng);
    Expr sum = Expr::number(coef(rng));
    for (int k = 1; k <= n; ++k)
        sum = sum + Expr::number(coef(rng)) * Expr::pow(Expr::variable(var), k);
    return sum;
}

// Random expression tree over the given variables; depth-limited, all
// branches smooth.  ln/sqrt arguments are wrapped to keep them positive.
inline Expr random_expr_tree(std::mt19937_64& rng, const std::vector<std::string>& vars,
                             int depth) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<int> pick_var(0, static_cast<int>(vars.size()) - 1);
    if (depth <= 0) {
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
            return Expr::number(coef(rng));
        return Expr::variable(vars[static_cast<std::size_t>(pick_var(rng))]);
    }
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
        case 0:
            return random_expr_tree(rng, vars, depth - 1) +
                   random_expr_tree(rng, vars, depth - 1);
        case 1:
            return random_expr_tree(rng, vars, depth - 1) -
                   random_expr_tree(rng, vars, depth - 1);
        case 2:
            return random_expr_tree(rng, vars, depth - 1) *
                   random_expr_tree(rng, vars, depth - 1);
        case 3:
            return random_expr_tree(rng, vars, depth - 1) /
                   (Expr::number(2.5) + Expr::pow(random_expr_tree(rng, vars, depth - 1), 2));
        case 4:
            return -random_expr_tree(rng, vars, depth - 1);
        case 5:
            return Expr::pow(random_expr_tree(rng, vars, depth - 1),
                             std::uniform_int_distribution<int>(2, 3)(rng));
        case 6:
            return Expr::call(detail::Func::Sin, random_expr_tree(rng, vars, depth - 1));
        case 7:
            return Expr::call(detail::Func::Cos, random_expr_tree(rng, vars, depth - 1));
        case 8:
            return Expr::call(detail::Func::Atan, random_expr_tree(rng, vars, depth - 1));
        default:
            // strictly positive argument for ln / sqrt
            return Expr::call(
                std::uniform_int_distribution<int>(0, 1)(rng) ? detail::Func::Ln
                                                              : detail::Func::Sqrt,
                Expr::number(1.5) + Expr::pow(random_expr_tree(rng, vars, depth - 1), 2));
    }
}

// Profile function in (xbar, ybar): low-degree polynomial plus one bounded
// trigonometric term.
inline Expr random_profile(std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> coef(-amplitude, amplitude);
    const Expr xb = Expr::variable("xbar");
    const Expr yb = Expr::variable("ybar");
    Expr e = Expr::number(coef(rng)) + Expr::number(coef(rng)) * xb +
             Expr::number(coef(rng)) * yb + Expr::number(coef(rng)) * xb * yb +
             Expr::number(coef(rng)) * Expr::pow(xb, 2) +
             Expr::number(coef(rng)) * Expr::pow(yb, 2);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: e = e + Expr::number(coef(rng)) * Expr::call(detail::Func::Sin, xb); break;
        case 1: e = e + Expr::number(coef(rng)) * Expr::call(detail::Func::Cos, yb); break;
        default: break;
    }
    return e;
}

//--------------------- random scenarios per case ---------------------//

struct TestScenario {
    SymmetrySpec spec;
    FieldProfile profile;
    GridSpec grid;
    std::vector<State> initial_conditions;
    SpatialBounds bounds{};
};

inline Expr time_series(std::mt19937_64& rng, double base, double amp_sin, double amp_poly) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Expr t = Expr::variable("t");
    return Expr::number(base) +
           Expr::number(amp_sin * u(rng)) * Expr::call(detail::Func::Sin, t) +
           Expr::number(amp_poly * u(rng)) * t +
           Expr::number(0.5 * amp_poly * u(rng)) * Expr::pow(t, 2);
}

inline TestScenario make_random_scenario(SymmetryCase kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    TestScenario sc{SymmetrySpec::case_c(Expr::number(0), Expr::number(1), {0, 1}),
                    {}, {}, {}, {}};
    const TimeWindow window{0.0, 1.2};

    switch (kind) {
        case SymmetryCase::A: {
            const Expr rho = time_series(rng, 1.2, 0.25, 0.15);
            const Expr omega = time_series(rng, 0.3 * u(rng), 0.3, 0.1);
            const Expr alpha1 = time_series(rng, 0.0, 0.3, 0.2);
            const Expr alpha2 = time_series(rng, 0.0, 0.3, 0.2);
            sc.spec = SymmetrySpec::case_a(rho, omega, alpha1, alpha2, window);
            sc.profile.Bbar = random_profile(rng, 0.4);
            sc.profile.Vbar = random_profile(rng, 0.4);
            sc.bounds = {-6.0, 6.0, -6.0, 6.0};
            sc.grid = {20, 20, 10, -2.0, 2.0, -2.0, 2.0, window.t_min, window.t_max};
            break;
        }
        case SymmetryCase::B: {
            const Expr beta1 = time_series(rng, 0.0, 0.15, 0.1);
            const Expr beta2 = time_series(rng, 0.0, 0.15, 0.1);
            sc.spec = SymmetrySpec::case_b(beta1, beta2, window);
            sc.profile.psi = random_profile(rng, 0.3);
            sc.profile.Vbar = random_profile(rng, 0.3);
            // grid and trajectories keep clear of the translated centre
            sc.bounds = {-6.0, 6.0, -6.0, 6.0};
            sc.grid = {20, 20, 10, 0.9, 3.1, 0.9, 3.1, window.t_min, window.t_max};
            break;
        }
        case SymmetryCase::C: {
            const Expr a1 = time_series(rng, 0.2 * u(rng), 0.3, 0.2);
            const Expr a2 = Expr::number(1.5) +
                            Expr::number(0.3 * u(rng)) *
                                Expr::call(detail::Func::Cos, Expr::variable("t"));
            sc.spec = SymmetrySpec::case_c(a1, a2, window);
            sc.profile.psi = random_profile(rng, 0.4);
            sc.profile.Vbar = random_profile(rng, 0.4);
            sc.bounds = {-6.0, 6.0, -6.0, 6.0};
            sc.grid = {20, 20, 10, -2.0, 2.0, -2.0, 2.0, window.t_min, window.t_max};
            break;
        }
    }

    for (int k = 0; k < 3; ++k) {
        State ic;
        ic.t = window.t_min;
        if (kind == SymmetryCase::B) {
            // start on a ring of radius ~2 around the origin
            const double phi = 3.1 * u(rng);
            ic.x = 2.0 * std::cos(phi);
            ic.y = 2.0 * std::sin(phi);
        } else {
            ic.x = 1.2 * u(rng);
            ic.y = 1.2 * u(rng);
        }
        ic.vx = 0.5 * u(rng);
        ic.vy = 0.5 * u(rng);
        sc.initial_conditions.push_back(ic);
    }
    return sc;
}

inline FieldModelPtr build_scenario_field(const TestScenario& sc) {
    return build_field(sc.spec, sc.profile);
}

//----------------------- finite-difference oracles -----------------------//

// Checks a jet against central differences of the plain evaluation.
inline double jet_vs_fd_error(const FieldModel& field, double x, double y, double t) {
    const FieldJet jet = field.jet(x, y, t);
    auto ex = [&](double q) { return field.value(q, y, t); };
    auto ey = [&](double q) { return field.value(x, q, t); };
    auto et = [&](double q) { return field.value(x, y, q); };
    double worst = 0.0;
    auto cmp = [&worst](double got, double want) {
        worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
    };
    cmp(jet.e1.dx, central_diff([&](double q) { return ex(q).e1; }, x));
    cmp(jet.e1.dy, central_diff([&](double q) { return ey(q).e1; }, y));
    cmp(jet.e1.dt, central_diff([&](double q) { return et(q).e1; }, t));
    cmp(jet.e2.dx, central_diff([&](double q) { return ex(q).e2; }, x));
    cmp(jet.e2.dy, central_diff([&](double q) { return ey(q).e2; }, y));
    cmp(jet.e2.dt, central_diff([&](double q) { return et(q).e2; }, t));
    cmp(jet.b.dx, central_diff([&](double q) { return ex(q).b; }, x));
    cmp(jet.b.dy, central_diff([&](double q) { return ey(q).b; }, y));
    cmp(jet.b.dt, central_diff([&](double q) { return et(q).b; }, t));
    return worst;
}

}  // namespace testsupport
