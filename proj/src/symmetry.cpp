#include "noether2d/symmetry.hpp"

#include <cmath>
#include <limits>

namespace noether2d {

namespace {

const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

void check_time_only(const Expr& e, const std::string& name) {
    for (const auto& v : e.variables()) {
        if (v != "t")
            throw ValidationError("symmetry function '" + name +
                                  "' may depend only on t, found variable '" + v + "'");
    }
}

// min |f| over uniformly sampled window
double sampled_min_abs(const TimeFunction& f, const TimeWindow& w, int samples) {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = w.t_min + (w.t_max - w.t_min) * i / (samples - 1);
        lo = std::min(lo, std::abs(f(t)));
    }
    return lo;
}

}  // namespace

const char* to_string(SymmetryCase c) {
    switch (c) {
        case SymmetryCase::A: return "A";
        case SymmetryCase::B: return "B";
        case SymmetryCase::C: return "C";
    }
    return "?";
}

TimeFunction::TimeFunction(Expr f) {
    d_[0] = f.simplified();
    for (std::size_t k = 1; k < d_.size(); ++k) d_[k] = d_[k - 1].derivative("t").simplified();
}

double TimeFunction::d(int order, double t) const {
    Bindings<double> env;
    env.set("t", t);
    return expr(order).eval(env);
}

SymmetrySpec SymmetrySpec::case_a(Expr rho, Expr omega, Expr alpha1, Expr alpha2,
                                  TimeWindow window, double t_ref,
                                  const SymmetrySpecOptions& options) {
    check_time_only(rho, "rho");
    check_time_only(omega, "omega");
    check_time_only(alpha1, "alpha1");
    check_time_only(alpha2, "alpha2");
    if (!(window.t_min < window.t_max))
        throw ValidationError("time window is degenerate");

    SymmetrySpec s;
    s.kind_ = SymmetryCase::A;
    s.window_ = window;
    s.t_ref_ = t_ref;
    s.options_ = options;
    s.rho_ = TimeFunction(rho);
    s.omega_ = TimeFunction(omega);
    s.alpha1_ = TimeFunction(alpha1);
    s.alpha2_ = TimeFunction(alpha2);
    s.a1_ = TimeFunction(case_a_translation_coefficient(rho, alpha1));
    s.a2_ = TimeFunction(case_a_translation_coefficient(rho, alpha2));

    if (sampled_min_abs(s.rho_, window, options.validation_samples) < options.rho_min)
        throw ValidationError("case A requires |rho| >= rho_min on the whole time window");
    return s;
}

SymmetrySpec SymmetrySpec::case_b(Expr beta1, Expr beta2, TimeWindow window, double t_ref,
                                  const SymmetrySpecOptions& options) {
    check_time_only(beta1, "beta1");
    check_time_only(beta2, "beta2");
    if (!(window.t_min < window.t_max))
        throw ValidationError("time window is degenerate");

    SymmetrySpec s;
    s.kind_ = SymmetryCase::B;
    s.window_ = window;
    s.t_ref_ = t_ref;
    s.options_ = options;
    s.rho_ = TimeFunction(Expr::number(0.0));
    s.omega_ = TimeFunction(Expr::number(1.0));
    s.beta1_ = TimeFunction(beta1);
    s.beta2_ = TimeFunction(beta2);
    s.a1_ = s.beta2_;                       // a1 = Omega beta2, Omega = 1
    s.a2_ = TimeFunction(-beta1);           // a2 = -Omega beta1
    return s;
}

SymmetrySpec SymmetrySpec::case_c(Expr a1, Expr a2, TimeWindow window, double t_ref,
                                  const SymmetrySpecOptions& options) {
    check_time_only(a1, "a1");
    check_time_only(a2, "a2");
    if (!(window.t_min < window.t_max))
        throw ValidationError("time window is degenerate");

    SymmetrySpec s;
    s.kind_ = SymmetryCase::C;
    s.window_ = window;
    s.t_ref_ = t_ref;
    s.options_ = options;
    s.rho_ = TimeFunction(Expr::number(0.0));
    s.omega_ = TimeFunction(Expr::number(0.0));
    s.a1_ = TimeFunction(a1);
    s.a2_ = TimeFunction(a2);

    if (sampled_min_abs(s.a2_, window, options.validation_samples) < options.a_min) {
        if (sampled_min_abs(s.a1_, window, options.validation_samples) < options.a_min)
            throw ValidationError(
                "case C requires |a2| (or |a1| after axis swap) >= a_min on the window");
        s.axis_swapped_ = true;
    }
    return s;
}

const TimeFunction& SymmetrySpec::alpha1() const {
    if (kind_ != SymmetryCase::A) throw ValidationError("alpha1 is defined for case A only");
    return alpha1_;
}
const TimeFunction& SymmetrySpec::alpha2() const {
    if (kind_ != SymmetryCase::A) throw ValidationError("alpha2 is defined for case A only");
    return alpha2_;
}
const TimeFunction& SymmetrySpec::beta1() const {
    if (kind_ != SymmetryCase::B) throw ValidationError("beta1 is defined for case B only");
    return beta1_;
}
const TimeFunction& SymmetrySpec::beta2() const {
    if (kind_ != SymmetryCase::B) throw ValidationError("beta2 is defined for case B only");
    return beta2_;
}

void SymmetrySpec::require_in_window(double t) const {
    if (!window_.contains(t))
        throw ValidationError("time " + std::to_string(t) + " outside declared window [" +
                              std::to_string(window_.t_min) + ", " +
                              std::to_string(window_.t_max) + "]");
}

Expr case_a_translation_coefficient(const Expr& rho, const Expr& alpha) {
    return rho * (rho * alpha.derivative("t") - rho.derivative("t") * alpha);
}

GeneratorComponents generator_components(const SymmetrySpec& spec, double x, double y,
                                         double t) {
    spec.require_in_window(t);
    const double rho = spec.rho()(t);
    const double rho_dot = spec.rho().d(1, t);
    const double omega = spec.omega()(t);
    return {rho * rho,
            rho * rho_dot * x - omega * y + spec.a1()(t),
            rho * rho_dot * y + omega * x + spec.a2()(t)};
}

//------------------------------ CanonicalMap ------------------------------//

CanonicalMap::CanonicalMap(SymmetrySpec spec, double quad_tol)
    : spec_(std::move(spec)), quad_tol_(quad_tol) {
    if (spec_.kind() != SymmetryCase::A) return;

    const double t_ref = spec_.t_ref();
    tbar_ci_.emplace(
        [this](double u) {
            const double r = spec_.rho()(u);
            return 1.0 / (r * r);
        },
        t_ref, quad_tol_);
    angle_ci_.emplace(
        [this](double u) {
            const double r = spec_.rho()(u);
            return spec_.omega()(u) / (r * r);
        },
        t_ref, quad_tol_);
    // The drift integrands sample the rotation angle T(mu); angle_ci_ caches
    // make the nested evaluation cheap.  All access is serialized by mutex_.
    delta1_ci_.emplace(
        [this](double u) {
            const double r = spec_.rho()(u);
            const double T = angle_ci_->value(u);
            return spec_.omega()(u) / (r * r * r) *
                   (spec_.alpha2()(u) * std::cos(T) - spec_.alpha1()(u) * std::sin(T));
        },
        t_ref, quad_tol_);
    delta2_ci_.emplace(
        [this](double u) {
            const double r = spec_.rho()(u);
            const double T = angle_ci_->value(u);
            return -spec_.omega()(u) / (r * r * r) *
                   (spec_.alpha1()(u) * std::cos(T) + spec_.alpha2()(u) * std::sin(T));
        },
        t_ref, quad_tol_);
}

CanonicalMap::CaseATime CanonicalMap::case_a_time_unlocked(double t) const {
    const double rho = spec_.rho()(t);
    const double rho2 = rho * rho;
    const double omega = spec_.omega()(t);
    CaseATime out;
    out.tbar = tbar_ci_->value(t);
    out.angle = angle_ci_->value(t);
    // Omega = 0 means no rotation and no drift, exactly.
    const bool no_rotation = spec_.omega().is_zero();
    out.delta1 = no_rotation ? 0.0 : delta1_ci_->value(t);
    out.delta2 = no_rotation ? 0.0 : delta2_ci_->value(t);
    out.tbar_rate = 1.0 / rho2;
    out.angle_rate = omega / rho2;
    const double c = std::cos(out.angle), s = std::sin(out.angle);
    out.delta1_rate =
        omega / (rho2 * rho) * (spec_.alpha2()(t) * c - spec_.alpha1()(t) * s);
    out.delta2_rate =
        -omega / (rho2 * rho) * (spec_.alpha1()(t) * c + spec_.alpha2()(t) * s);
    return out;
}

CanonicalMap::CaseATime CanonicalMap::case_a_time(double t) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return case_a_time_unlocked(t);
}

double CanonicalMap::tbar(double t) const {
    if (spec_.kind() != SymmetryCase::A)
        throw ValidationError("tbar(t) is defined for case A; other cases need a spatial "
                              "point, use to_canonical");
    std::lock_guard<std::mutex> lock(mutex_);
    return tbar_ci_->value(t);
}

CanonicalCoords CanonicalMap::to_canonical_unlocked(double x, double y, double t) const {
    spec_.require_in_window(t);
    switch (spec_.kind()) {
        case SymmetryCase::A: {
            const CaseATime ct = case_a_time_unlocked(t);
            const double rho = spec_.rho()(t);
            const double u = (x - spec_.alpha1()(t)) / rho;
            const double v = (y - spec_.alpha2()(t)) / rho;
            const double c = std::cos(ct.angle), s = std::sin(ct.angle);
            return {u * c + v * s + ct.delta1, v * c - u * s + ct.delta2, ct.tbar};
        }
        case SymmetryCase::B: {
            const double dx = x - spec_.beta1()(t);
            const double dy = y - spec_.beta2()(t);
            const double r = std::hypot(dx, dy);
            if (r == 0.0)
                throw FieldDomainError("case B canonical map undefined at zero radius");
            // Omega = 1: tbar is the polar angle (principal branch).
            return {r, t, std::atan2(dy, dx)};
        }
        case SymmetryCase::C: {
            const double a1 = spec_.a1()(t);
            const double a2 = spec_.a2()(t);
            if (spec_.axis_swapped()) return {y - a2 * x / a1, t, x / a1};
            return {x - a1 * y / a2, t, y / a2};
        }
    }
    throw ValidationError("corrupt symmetry case");
}

CanonicalCoords CanonicalMap::to_canonical(double x, double y, double t) const {
    if (spec_.kind() == SymmetryCase::A) {
        std::lock_guard<std::mutex> lock(mutex_);
        return to_canonical_unlocked(x, y, t);
    }
    return to_canonical_unlocked(x, y, t);
}

std::pair<double, double> CanonicalMap::from_canonical(const CanonicalCoords& c,
                                                       double t) const {
    spec_.require_in_window(t);
    switch (spec_.kind()) {
        case SymmetryCase::A: {
            std::lock_guard<std::mutex> lock(mutex_);
            const CaseATime ct = case_a_time_unlocked(t);
            const double rho = spec_.rho()(t);
            const double u = c.xbar - ct.delta1;
            const double v = c.ybar - ct.delta2;
            const double co = std::cos(ct.angle), si = std::sin(ct.angle);
            return {spec_.alpha1()(t) + rho * (u * co - v * si),
                    spec_.alpha2()(t) + rho * (u * si + v * co)};
        }
        case SymmetryCase::B: {
            return {spec_.beta1()(t) + c.xbar * std::cos(c.tbar),
                    spec_.beta2()(t) + c.xbar * std::sin(c.tbar)};
        }
        case SymmetryCase::C: {
            const double a1 = spec_.a1()(t);
            const double a2 = spec_.a2()(t);
            if (spec_.axis_swapped()) return {a1 * c.tbar, c.xbar + a2 * c.tbar};
            return {c.xbar + a1 * c.tbar, a2 * c.tbar};
        }
    }
    throw ValidationError("corrupt symmetry case");
}

CanonicalCoords to_canonical(const SymmetrySpec& spec, double x, double y, double t) {
    return CanonicalMap(spec).to_canonical(x, y, t);
}

std::pair<double, double> from_canonical(const SymmetrySpec& spec, const CanonicalCoords& c,
                                         double t) {
    return CanonicalMap(spec).from_canonical(c, t);
}

double generator_directional_derivative(
    const SymmetrySpec& spec, const std::function<double(double, double, double)>& f,
    double x, double y, double t) {
    const GeneratorComponents g = generator_components(spec, x, y, t);
    const double hx = kFdStep * std::max(1.0, std::abs(x));
    const double hy = kFdStep * std::max(1.0, std::abs(y));
    const double ht = kFdStep * std::max(1.0, std::abs(t));
    const double fx = (f(x + hx, y, t) - f(x - hx, y, t)) / (2 * hx);
    const double fy = (f(x, y + hy, t) - f(x, y - hy, t)) / (2 * hy);
    const double ft = (f(x, y, t + ht) - f(x, y, t - ht)) / (2 * ht);
    return g.tau * ft + g.eta1 * fx + g.eta2 * fy;
}

}  // namespace noether2d
