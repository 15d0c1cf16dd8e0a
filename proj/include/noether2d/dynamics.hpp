#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "noether2d/fields.hpp"

namespace noether2d {

struct State {
    double t, x, y, vx, vy;
};

struct Derivatives {
    double vx, vy, ax, ay;
};

// Unit charge and mass: xddot = E1 + ydot B, yddot = E2 - xdot B.
Derivatives lorentz_rhs(const FieldModel& field, const State& s);

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double tol = 0.0;
};

struct TrajectorySample {
    State state;
    double invariant = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    IntegratorStats stats;
};

struct SpatialBounds {
    double x_min, x_max, y_min, y_max;
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

struct IntegrateOptions {
    double max_step = std::numeric_limits<double>::infinity();
    // > 0 switches off step-size control (used by convergence studies).
    double fixed_step = 0.0;
    std::optional<SpatialBounds> bounds;
    // Evaluated at every emitted sample, never at internal steps.
    std::function<double(const State&)> invariant;
};

// Adaptive embedded Dormand-Prince 5(4) pair, per-step error below tol
// (mixed absolute/relative), samples exactly at output_dt spacing plus the
// final time.  Throws IntegrationError on step-size underflow or when the
// trajectory leaves the declared bounds.
Trajectory integrate(const FieldModel& field, const State& initial, double t_end, double tol,
                     double output_dt, const IntegrateOptions& options = {});

//------------------------------ invariants ------------------------------//

// Case A (energy-like):
// I = 1/2 (rho (qdot - alpha') - rho' (q - alpha) - Omega x q / rho)^2 + Vbar.
double invariant_a(const CanonicalMap& map, const FieldProfile& profile, const State& s);
double invariant_a(const SymmetrySpec& spec, const FieldProfile& profile, const State& s);

// Case B (angular-momentum-like):
// I = (y - beta2)(xdot - beta1') - (x - beta1)(ydot - beta2') + psi.
double invariant_b(const SymmetrySpec& spec, const FieldProfile& profile, const State& s);

// Case C (linear-momentum-like):
// I = -(a1 xdot + a2 ydot - a1' x - a2' y + a2 psi)  (a1, a2 roles swap with
// the axis swap).
double invariant_c(const SymmetrySpec& spec, const FieldProfile& profile, const State& s);

// Case-dispatching evaluator; pass the field model's canonical map so case A
// reuses the cached quadratures.
std::function<double(const State&)> make_invariant(
    const SymmetrySpec& spec, const FieldProfile& profile,
    std::shared_ptr<const CanonicalMap> map = nullptr);

// max_k |I_k - I_0| / (1 + |I_0|)
double max_relative_drift(const Trajectory& trajectory);

//------------------------- canonical dynamics (A) -------------------------//

struct CanonicalState {
    double tbar, xbar, ybar, dxbar, dybar;  // primes are d/dtbar
};

// Integrates xbar'' = -Vbar_xbar + ybar' Bbar, ybar'' = -Vbar_ybar - xbar' Bbar
// in the autonomous barred frame.  The returned trajectory stores
// (tbar, xbar, ybar, xbar', ybar') in the State fields and the energy
// 1/2 qbar'^2 + Vbar as the invariant.
Trajectory canonical_dynamics_a(const SymmetrySpec& spec, const FieldProfile& profile,
                                const CanonicalState& initial, double tbar_end, double tol,
                                double output_dtbar = 0.0);

// Same, sampled exactly at the given increasing tbar values (first entry must
// match the initial state's tbar).
Trajectory canonical_dynamics_a_at(const SymmetrySpec& spec, const FieldProfile& profile,
                                   const CanonicalState& initial,
                                   const std::vector<double>& tbar_samples, double tol);

// Barred velocity qbar' = rho R(-T) (qdot - eta / rho^2) of a physical state.
std::pair<double, double> canonical_velocity_a(const CanonicalMap& map, const State& s);

//-------------------------------- export --------------------------------//

// CSV with header t,x,y,vx,vy,I and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace noether2d
