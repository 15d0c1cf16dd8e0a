#pragma once

#include <array>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "noether2d/expr.hpp"
#include "noether2d/quadrature.hpp"

namespace noether2d {

enum class SymmetryCase { A, B, C };

const char* to_string(SymmetryCase c);

struct TimeWindow {
    double t_min = 0.0;
    double t_max = 1.0;
    bool contains(double t) const { return t >= t_min && t <= t_max; }
    double length() const { return t_max - t_min; }
};

// A coefficient function of time together with its symbolic derivatives up
// to third order (the field residuals need up to the third derivative of
// rho and second derivatives of the translation coefficients).
class TimeFunction {
public:
    TimeFunction() : TimeFunction(Expr::number(0.0)) {}
    explicit TimeFunction(Expr f);

    double operator()(double t) const { return d(0, t); }
    double d(int order, double t) const;

    // Evaluates the order-th derivative at a (possibly dual) time value.
    template <class Num>
    Num eval(int order, Num t) const {
        Bindings<Num> env;
        env.set("t", t);
        return expr(order).eval(env);
    }

    const Expr& expr(int order = 0) const { return d_.at(static_cast<std::size_t>(order)); }
    bool is_zero() const { return d_[0].is_zero(); }

private:
    std::array<Expr, 4> d_;
};

struct SymmetrySpecOptions {
    double rho_min = 1e-6;  // case A: min |rho| over the window
    double a_min = 1e-6;    // case C: min |a2| (or |a1| after axis swap)
    int validation_samples = 257;
};

// Immutable description of one Noether point symmetry.  All cases reduce to
// the unified generator data (rho, Omega, a1, a2):
//   tau  = rho^2
//   eta1 = rho rho' x - Omega y + a1
//   eta2 = rho rho' y + Omega x + a2
// Case A supplies rho, Omega and the translation offsets alpha1, alpha2
// (a_i = rho (rho alpha_i' - rho' alpha_i)); case B has rho = 0, Omega = 1,
// a1 = beta2, a2 = -beta1; case C has rho = Omega = 0 and direct a1, a2.
class SymmetrySpec {
public:
    static SymmetrySpec case_a(Expr rho, Expr omega, Expr alpha1, Expr alpha2,
                               TimeWindow window, double t_ref = 0.0,
                               const SymmetrySpecOptions& options = {});
    static SymmetrySpec case_b(Expr beta1, Expr beta2, TimeWindow window,
                               double t_ref = 0.0, const SymmetrySpecOptions& options = {});
    static SymmetrySpec case_c(Expr a1, Expr a2, TimeWindow window, double t_ref = 0.0,
                               const SymmetrySpecOptions& options = {});

    SymmetryCase kind() const { return kind_; }
    const TimeWindow& window() const { return window_; }
    double t_ref() const { return t_ref_; }
    const SymmetrySpecOptions& options() const { return options_; }

    // Case C with a2 vanishing on the window but a1 bounded away from zero
    // is handled by swapping the roles of the axes internally.
    bool axis_swapped() const { return axis_swapped_; }

    const TimeFunction& rho() const { return rho_; }
    const TimeFunction& omega() const { return omega_; }
    const TimeFunction& a1() const { return a1_; }
    const TimeFunction& a2() const { return a2_; }

    const TimeFunction& alpha1() const;  // case A only
    const TimeFunction& alpha2() const;
    const TimeFunction& beta1() const;  // case B only
    const TimeFunction& beta2() const;

    void require_in_window(double t) const;

private:
    SymmetrySpec() = default;

    SymmetryCase kind_ = SymmetryCase::A;
    TimeWindow window_{};
    double t_ref_ = 0.0;
    SymmetrySpecOptions options_{};
    bool axis_swapped_ = false;

    TimeFunction rho_, omega_, a1_, a2_;
    TimeFunction alpha1_, alpha2_;  // case A
    TimeFunction beta1_, beta2_;    // case B
};

// The translation coefficient induced by a case A offset:
// a = rho (rho alpha' - rho' alpha).
Expr case_a_translation_coefficient(const Expr& rho, const Expr& alpha);

struct GeneratorComponents {
    double tau;
    double eta1;
    double eta2;
};

GeneratorComponents generator_components(const SymmetrySpec& spec, double x, double y,
                                         double t);

struct CanonicalCoords {
    double xbar;
    double ybar;
    double tbar;
};

// Coordinate change to the frame where the symmetry generator is a pure
// translation in tbar.  Case A is quadrature backed (tbar, rotation angle T
// and the drift offsets delta1, delta2 are cumulative integrals from t_ref);
// the caches are serialized internally, so a shared map may be used from
// several threads.
class CanonicalMap {
public:
    explicit CanonicalMap(SymmetrySpec spec, double quad_tol = kDefaultQuadTol);

    const SymmetrySpec& spec() const { return spec_; }

    CanonicalCoords to_canonical(double x, double y, double t) const;
    std::pair<double, double> from_canonical(const CanonicalCoords& c, double t) const;

    // Case A canonical-time quantities and their exact time derivatives.
    struct CaseATime {
        double tbar, angle, delta1, delta2;
        double tbar_rate, angle_rate, delta1_rate, delta2_rate;
    };
    CaseATime case_a_time(double t) const;

    double tbar(double t) const;

private:
    CanonicalCoords to_canonical_unlocked(double x, double y, double t) const;
    CaseATime case_a_time_unlocked(double t) const;

    SymmetrySpec spec_;
    double quad_tol_;
    mutable std::optional<CumulativeIntegral> tbar_ci_, angle_ci_, delta1_ci_, delta2_ci_;
    mutable std::mutex mutex_;
};

// One-shot conveniences over a transient CanonicalMap.
CanonicalCoords to_canonical(const SymmetrySpec& spec, double x, double y, double t);
std::pair<double, double> from_canonical(const SymmetrySpec& spec, const CanonicalCoords& c,
                                         double t);

// G f = tau f_t + eta1 f_x + eta2 f_y with central finite differences for
// the partials of f.
double generator_directional_derivative(const SymmetrySpec& spec,
                                        const std::function<double(double, double, double)>& f,
                                        double x, double y, double t);

}  // namespace noether2d
