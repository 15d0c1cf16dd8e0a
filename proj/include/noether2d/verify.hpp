#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "noether2d/dynamics.hpp"
#include "noether2d/fields.hpp"

namespace noether2d {

struct GridSpec {
    int nx = 20, ny = 20, nt = 10;
    double x_min = -1, x_max = 1;
    double y_min = -1, y_max = 1;
    double t_min = 0, t_max = 1;
};

struct GridPoint {
    double x = 0, y = 0, t = 0;
};

// Grid statistics for one verified identity.  pass <=> max_abs <= tol * scale
// with scale = 1 + max |field component| over the same grid.
struct ResidualReport {
    std::string identity;
    std::string grid;
    std::size_t points = 0;   // evaluated points (excluded-disc points skipped)
    std::size_t skipped = 0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    GridPoint argmax{};
    double scale = 1.0;
    double tol = 1e-6;
    bool pass = false;
};

// 1 + max(|E1|, |E2|, |B|) over the grid.
double field_scale(const FieldModel& field, const GridSpec& grid);

// Residuals of the three first-order symmetry equations the constructed
// fields must satisfy:
//   G B  + 2 rho rho' B + 2 Omega'                                   = 0
//   G E1 + 3 rho rho' E1 + Omega E2 + ((rho rho'' + rho'^2) y
//        + Omega' x + a2') B - (rho rho''' + 3 rho' rho'') x
//        + Omega'' y - a1''                                          = 0
//   G E2 + 3 rho rho' E2 - Omega E1 - ((rho rho'' + rho'^2) x
//        - Omega' y + a1') B - (rho rho''' + 3 rho' rho'') y
//        - Omega'' x - a2''                                          = 0
// with G f = tau f_t + eta1 f_x + eta2 f_y.  All field partials come from
// exact jets; all time-function derivatives are symbolic.  Results are
// independent of the thread count.
std::array<ResidualReport, 3> noether_residuals(const FieldModel& field,
                                                const SymmetrySpec& spec, const GridSpec& grid,
                                                double tol = 1e-6, int threads = 1);

// | E2_x - E1_y + B_t | over the grid.
ResidualReport faraday_residual(const FieldModel& field, const GridSpec& grid,
                                double tol = 1e-6, int threads = 1);

// Case A vector-potential profile relation Abar2_xbar - Abar1_ybar = Bbar on
// a grid in canonical coordinates.
ResidualReport vector_potential_residual(const FieldProfile& profile, double xbar_min,
                                         double xbar_max, double ybar_min, double ybar_max,
                                         int n = 20, double tol = 1e-8);

// Finite-difference check that the potential set reproduces the field:
// E1 = -V_x - A1_t, E2 = -V_y - A2_t, B = A2_x - A1_y.
std::array<ResidualReport, 3> potential_field_residuals(const PotentialSet& potentials,
                                                        const FieldModel& field,
                                                        const GridSpec& grid,
                                                        double tol = 1e-5, int threads = 1);

// Evaluates the Noether invariant along the trajectory through the
// potentials-and-boundary-term route
//   I = tau (v^2/2 + V) - eta . (v + A) + F
// for two random gauge functions, and through the direct formula; reports the
// maximum pairwise discrepancy.  Scale is 1 + max |I_direct|.
ResidualReport gauge_independence_check(const SymmetrySpec& spec, const FieldProfile& profile,
                                        const Trajectory& trajectory, std::uint64_t seed = 1,
                                        double tol = 1e-8);

// Random low-degree polynomial + trigonometric expression in the given
// variables; used for gauge functions and property tests.
Expr random_smooth_expr(std::uint64_t seed, const std::vector<std::string>& vars);

}  // namespace noether2d
