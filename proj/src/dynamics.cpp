#include "noether2d/dynamics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace noether2d {
namespace {

using Vec4 = std::array<double, 4>;

Vec4 operator+(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
Vec4 operator*(double s, const Vec4& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// b - bhat: error estimator weights.
constexpr double kE[7] = {71.0 / 57600, 0.0,           -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

struct StepResult {
    Vec4 y;
    double err_norm;
};

template <class Rhs>
StepResult dp_step(const Rhs& f, double t, const Vec4& y, double h, const Vec4& k1,
                   Vec4& k_last, double tol) {
    Vec4 k[7];
    k[0] = k1;
    for (int stage = 1; stage < 7; ++stage) {
        Vec4 arg = y;
        for (int j = 0; j < stage; ++j) {
            if (kA[stage][j] != 0.0) arg = arg + (h * kA[stage][j]) * k[j];
        }
        k[stage] = f(t + kC[stage] * h, arg);
    }
    // stage 7 argument is the 5th-order solution (FSAL)
    Vec4 y1 = y;
    for (int j = 0; j < 6; ++j) {
        if (kA[6][j] != 0.0) y1 = y1 + (h * kA[6][j]) * k[j];
    }

    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
        e *= h;
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
    }
    k_last = k[6];
    return {y1, std::sqrt(err / 4.0)};
}

struct SampleSink {
    double t0, t_end, output_dt;
    std::function<void(double, const Vec4&)> emit;
};

// Shared driver: integrates y' = f(t, y) from t0 to t_end emitting samples at
// t0 + k*output_dt and at t_end.
template <class Rhs>
IntegratorStats drive(const Rhs& f, double t0, Vec4 y, double t_end, double tol,
                      double output_dt, double max_step, double fixed_step,
                      const std::function<void(double, const Vec4&)>& emit,
                      const std::function<void(double, const Vec4&)>& check) {
    if (!(tol > 0)) throw ValidationError("integrate: tol must be positive");
    if (!(t_end > t0)) throw ValidationError("integrate: t_end must exceed the initial time");
    if (!(output_dt > 0)) throw ValidationError("integrate: output_dt must be positive");

    IntegratorStats stats;
    stats.tol = tol;
    emit(t0, y);

    const double span = t_end - t0;
    double t = t0;
    double h = fixed_step > 0 ? fixed_step : std::min({1e-3 * span, output_dt, max_step});
    std::size_t next_output = 1;
    double t_target = std::min(t0 + output_dt, t_end);
    Vec4 k1 = f(t, y);

    while (t < t_end) {
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() *
                             std::max(1.0, std::abs(t));
        bool clipped = false;
        double h_try = std::min(h, max_step);
        if (t + h_try >= t_target - 1e-14 * std::max(1.0, std::abs(t_target))) {
            h_try = t_target - t;
            clipped = true;
        }
        // Underflow only matters when the controller chose h; a clipped step
        // may legitimately be tiny.
        if (h_try < h_min && !clipped)
            throw IntegrationError("step-size underflow during integration", t);

        Vec4 k_last;
        const StepResult r = dp_step(f, t, y, h_try, k1, k_last, tol);

        if (fixed_step <= 0 && r.err_norm > 1.0) {
            ++stats.rejected;
            h = h_try * std::max(0.2, 0.9 * std::pow(r.err_norm, -0.2));
            continue;
        }

        t = clipped ? t_target : t + h_try;
        y = r.y;
        k1 = k_last;  // FSAL
        ++stats.steps;
        check(t, y);

        if (clipped) {
            emit(t, y);
            if (t >= t_end) break;
            ++next_output;
            t_target = std::min(t0 + next_output * output_dt, t_end);
        }
        if (fixed_step <= 0) {
            const double grow = r.err_norm == 0.0
                                    ? 5.0
                                    : std::min(5.0, std::max(0.2, 0.9 * std::pow(r.err_norm, -0.2)));
            h = std::min(h_try * grow, span);
        }
    }
    return stats;
}

}  // namespace

Derivatives lorentz_rhs(const FieldModel& field, const State& s) {
    const FieldValue f = field.value(s.x, s.y, s.t);
    return {s.vx, s.vy, f.e1 + s.vy * f.b, f.e2 - s.vx * f.b};
}

Trajectory integrate(const FieldModel& field, const State& initial, double t_end, double tol,
                     double output_dt, const IntegrateOptions& options) {
    field.spec().require_in_window(initial.t);
    field.spec().require_in_window(t_end);

    Trajectory traj;
    auto rhs = [&field](double t, const Vec4& y) -> Vec4 {
        const FieldValue f = field.value(y[0], y[1], t);
        return {y[2], y[3], f.e1 + y[3] * f.b, f.e2 - y[2] * f.b};
    };
    auto emit = [&](double t, const Vec4& y) {
        TrajectorySample sample;
        sample.state = {t, y[0], y[1], y[2], y[3]};
        if (options.invariant) sample.invariant = options.invariant(sample.state);
        traj.samples.push_back(sample);
    };
    auto check = [&](double t, const Vec4& y) {
        if (options.bounds && !options.bounds->contains(y[0], y[1]))
            throw IntegrationError("trajectory left the declared spatial window", t);
    };

    traj.stats = drive(rhs, initial.t, Vec4{initial.x, initial.y, initial.vx, initial.vy},
                       t_end, tol, output_dt, options.max_step, options.fixed_step, emit,
                       check);
    return traj;
}

//------------------------------ invariants ------------------------------//

double invariant_a(const CanonicalMap& map, const FieldProfile& profile, const State& s) {
    const SymmetrySpec& spec = map.spec();
    if (spec.kind() != SymmetryCase::A)
        throw ValidationError("invariant_a requires a case A symmetry");
    const double rho = spec.rho()(s.t), rho_d = spec.rho().d(1, s.t);
    const double omega = spec.omega()(s.t);
    const double al1 = spec.alpha1()(s.t), al1_d = spec.alpha1().d(1, s.t);
    const double al2 = spec.alpha2()(s.t), al2_d = spec.alpha2().d(1, s.t);

    const double w1 = rho * (s.vx - al1_d) - rho_d * (s.x - al1) + omega * s.y / rho;
    const double w2 = rho * (s.vy - al2_d) - rho_d * (s.y - al2) - omega * s.x / rho;

    const CanonicalCoords c = map.to_canonical(s.x, s.y, s.t);
    Bindings<double> env;
    env.set("xbar", c.xbar).set("ybar", c.ybar);
    const double vbar = profile.Vbar ? profile.Vbar->eval(env) : 0.0;
    return 0.5 * (w1 * w1 + w2 * w2) + vbar;
}

double invariant_a(const SymmetrySpec& spec, const FieldProfile& profile, const State& s) {
    return invariant_a(CanonicalMap(spec), profile, s);
}

double invariant_b(const SymmetrySpec& spec, const FieldProfile& profile, const State& s) {
    if (spec.kind() != SymmetryCase::B)
        throw ValidationError("invariant_b requires a case B symmetry");
    const double b1 = spec.beta1()(s.t), b1_d = spec.beta1().d(1, s.t);
    const double b2 = spec.beta2()(s.t), b2_d = spec.beta2().d(1, s.t);
    const double dx = s.x - b1, dy = s.y - b2;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) throw FieldDomainError("invariant_b undefined at zero radius");
    Bindings<double> env;
    env.set("xbar", r).set("ybar", s.t);
    const double psi = profile.psi ? profile.psi->eval(env) : 0.0;
    return dy * (s.vx - b1_d) - dx * (s.vy - b2_d) + psi;
}

double invariant_c(const SymmetrySpec& spec, const FieldProfile& profile, const State& s) {
    if (spec.kind() != SymmetryCase::C)
        throw ValidationError("invariant_c requires a case C symmetry");
    const bool swapped = spec.axis_swapped();
    const double a1 = spec.a1()(s.t), a1_d = spec.a1().d(1, s.t);
    const double a2 = spec.a2()(s.t), a2_d = spec.a2().d(1, s.t);
    const double p = swapped ? s.y : s.x;
    const double q = swapped ? s.x : s.y;
    const double u1 = swapped ? a2 : a1;
    const double u2 = swapped ? a1 : a2;
    Bindings<double> env;
    env.set("xbar", p - u1 * q / u2).set("ybar", s.t);
    const double psi = profile.psi ? profile.psi->eval(env) : 0.0;
    return -(a1 * s.vx + a2 * s.vy - a1_d * s.x - a2_d * s.y + u2 * psi);
}

std::function<double(const State&)> make_invariant(const SymmetrySpec& spec,
                                                   const FieldProfile& profile,
                                                   std::shared_ptr<const CanonicalMap> map) {
    switch (spec.kind()) {
        case SymmetryCase::A: {
            if (!map) map = std::make_shared<CanonicalMap>(spec);
            return [map, profile](const State& s) { return invariant_a(*map, profile, s); };
        }
        case SymmetryCase::B:
            return [spec, profile](const State& s) { return invariant_b(spec, profile, s); };
        case SymmetryCase::C:
            return [spec, profile](const State& s) { return invariant_c(spec, profile, s); };
    }
    throw ValidationError("corrupt symmetry case");
}

double max_relative_drift(const Trajectory& trajectory) {
    if (trajectory.samples.empty()) return 0.0;
    const double i0 = trajectory.samples.front().invariant;
    const double scale = 1.0 + std::abs(i0);
    double worst = 0.0;
    for (const auto& s : trajectory.samples)
        worst = std::max(worst, std::abs(s.invariant - i0) / scale);
    return worst;
}

//------------------------- canonical dynamics (A) -------------------------//

namespace {

struct BarredSystem {
    Expr bbar, vbar_x, vbar_y, vbar;

    explicit BarredSystem(const FieldProfile& profile) {
        if (!profile.Bbar || !profile.Vbar)
            throw ValidationError("canonical dynamics needs Bbar and Vbar profiles");
        bbar = profile.Bbar->simplified();
        vbar = profile.Vbar->simplified();
        vbar_x = profile.Vbar->derivative("xbar").simplified();
        vbar_y = profile.Vbar->derivative("ybar").simplified();
    }

    Vec4 operator()(double /*tbar*/, const Vec4& y) const {
        Bindings<double> env;
        env.set("xbar", y[0]).set("ybar", y[1]);
        const double b = bbar.eval(env);
        return {y[2], y[3], -vbar_x.eval(env) + y[3] * b, -vbar_y.eval(env) - y[2] * b};
    }

    double energy(const Vec4& y) const {
        Bindings<double> env;
        env.set("xbar", y[0]).set("ybar", y[1]);
        return 0.5 * (y[2] * y[2] + y[3] * y[3]) + vbar.eval(env);
    }
};

}  // namespace

Trajectory canonical_dynamics_a(const SymmetrySpec& spec, const FieldProfile& profile,
                                const CanonicalState& initial, double tbar_end, double tol,
                                double output_dtbar) {
    if (spec.kind() != SymmetryCase::A)
        throw ValidationError("canonical_dynamics_a requires a case A symmetry");
    const BarredSystem sys(profile);
    if (output_dtbar <= 0) output_dtbar = (tbar_end - initial.tbar) / 200.0;

    Trajectory traj;
    auto emit = [&](double tb, const Vec4& y) {
        TrajectorySample s;
        s.state = {tb, y[0], y[1], y[2], y[3]};
        s.invariant = sys.energy(y);
        traj.samples.push_back(s);
    };
    traj.stats = drive(sys, initial.tbar,
                       Vec4{initial.xbar, initial.ybar, initial.dxbar, initial.dybar},
                       tbar_end, tol, output_dtbar, std::numeric_limits<double>::infinity(),
                       0.0, emit, [](double, const Vec4&) {});
    return traj;
}

Trajectory canonical_dynamics_a_at(const SymmetrySpec& spec, const FieldProfile& profile,
                                   const CanonicalState& initial,
                                   const std::vector<double>& tbar_samples, double tol) {
    if (spec.kind() != SymmetryCase::A)
        throw ValidationError("canonical_dynamics_a requires a case A symmetry");
    if (tbar_samples.size() < 2)
        throw ValidationError("canonical_dynamics_a_at needs at least two sample times");
    const BarredSystem sys(profile);

    Trajectory traj;
    traj.stats.tol = tol;
    Vec4 y{initial.xbar, initial.ybar, initial.dxbar, initial.dybar};
    auto emit_state = [&](double tb, const Vec4& v) {
        TrajectorySample s;
        s.state = {tb, v[0], v[1], v[2], v[3]};
        s.invariant = sys.energy(v);
        traj.samples.push_back(s);
    };
    emit_state(tbar_samples.front(), y);
    for (std::size_t i = 1; i < tbar_samples.size(); ++i) {
        const double from = tbar_samples[i - 1];
        const double to = tbar_samples[i];
        if (!(to > from))
            throw ValidationError("canonical sample times must be strictly increasing");
        Vec4 last = y;
        auto capture = [&](double, const Vec4& v) { last = v; };
        const IntegratorStats st =
            drive(sys, from, y, to, tol, to - from, std::numeric_limits<double>::infinity(),
                  0.0, capture, [](double, const Vec4&) {});
        traj.stats.steps += st.steps;
        traj.stats.rejected += st.rejected;
        y = last;
        emit_state(to, y);
    }
    return traj;
}

std::pair<double, double> canonical_velocity_a(const CanonicalMap& map, const State& s) {
    const SymmetrySpec& spec = map.spec();
    if (spec.kind() != SymmetryCase::A)
        throw ValidationError("canonical_velocity_a requires a case A symmetry");
    const double rho = spec.rho()(s.t), rho_d = spec.rho().d(1, s.t);
    const double omega = spec.omega()(s.t);
    const double al1 = spec.alpha1()(s.t), al1_d = spec.alpha1().d(1, s.t);
    const double al2 = spec.alpha2()(s.t), al2_d = spec.alpha2().d(1, s.t);
    const double rho2 = rho * rho;

    const double eta1 = rho * rho_d * (s.x - al1) + rho2 * al1_d - omega * s.y;
    const double eta2 = rho * rho_d * (s.y - al2) + rho2 * al2_d + omega * s.x;
    const double w1 = s.vx - eta1 / rho2;
    const double w2 = s.vy - eta2 / rho2;

    const double T = map.case_a_time(s.t).angle;
    const double c = std::cos(T), si = std::sin(T);
    return {rho * (w1 * c + w2 * si), rho * (-w1 * si + w2 * c)};
}

//-------------------------------- export --------------------------------//

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    os << "t,x,y,vx,vy,I\n";
    char buf[160];
    for (const auto& s : trajectory.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.state.t,
                      s.state.x, s.state.y, s.state.vx, s.state.vy, s.invariant);
        os << buf;
    }
}

}  // namespace noether2d
