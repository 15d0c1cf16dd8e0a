#include "noether2d/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>
#include <vector>

namespace noether2d {
namespace {

const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

std::string grid_description(const GridSpec& g) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%dx%dx%d over [%g,%g]x[%g,%g]x[%g,%g]", g.nx, g.ny, g.nt,
                  g.x_min, g.x_max, g.y_min, g.y_max, g.t_min, g.t_max);
    return buf;
}

double axis_value(double lo, double hi, int i, int n) {
    return n <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
}

struct PointData {
    GridPoint p{};
    bool skipped = false;
    std::array<double, 4> residual{};  // noether_B, noether_E1, noether_E2, faraday
    double field_mag = 0.0;
};

// Skip grid points inside the case B excluded disc around the moving centre.
bool point_excluded(const FieldModel& field, double x, double y, double t) {
    if (field.kind() != SymmetryCase::B) return false;
    const SymmetrySpec& spec = field.spec();
    const double dx = x - spec.beta1()(t);
    const double dy = y - spec.beta2()(t);
    return std::hypot(dx, dy) < field.excluded_radius();
}

// Evaluates every grid point into a fixed-size array.  Chunked over threads;
// per-point arithmetic is schedule independent, and the reduction below runs
// sequentially in index order, so the report does not depend on the thread
// count.
std::vector<PointData> evaluate_grid(const FieldModel& field, const SymmetrySpec* spec,
                                     const GridSpec& grid, int threads) {
    const std::size_t total = static_cast<std::size_t>(grid.nx) * grid.ny * grid.nt;
    std::vector<PointData> data(total);

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const int it = static_cast<int>(idx / (static_cast<std::size_t>(grid.nx) * grid.ny));
            const int rem = static_cast<int>(idx % (static_cast<std::size_t>(grid.nx) * grid.ny));
            const int iy = rem / grid.nx;
            const int ix = rem % grid.nx;
            PointData& out = data[idx];
            out.p.x = axis_value(grid.x_min, grid.x_max, ix, grid.nx);
            out.p.y = axis_value(grid.y_min, grid.y_max, iy, grid.ny);
            out.p.t = axis_value(grid.t_min, grid.t_max, it, grid.nt);
            if (point_excluded(field, out.p.x, out.p.y, out.p.t)) {
                out.skipped = true;
                continue;
            }
            const FieldJet jet = field.jet(out.p.x, out.p.y, out.p.t);
            out.field_mag = std::max({std::abs(jet.e1.v), std::abs(jet.e2.v), std::abs(jet.b.v)});
            out.residual[3] = jet.e2.dx - jet.e1.dy + jet.b.dt;

            if (!spec) continue;
            const double x = out.p.x, y = out.p.y, t = out.p.t;
            const double rho = spec->rho()(t);
            const double rho_d = spec->rho().d(1, t);
            const double rho_dd = spec->rho().d(2, t);
            const double rho_ddd = spec->rho().d(3, t);
            const double omega = spec->omega()(t);
            const double omega_d = spec->omega().d(1, t);
            const double omega_dd = spec->omega().d(2, t);
            const double a1_d = spec->a1().d(1, t), a1_dd = spec->a1().d(2, t);
            const double a2_d = spec->a2().d(1, t), a2_dd = spec->a2().d(2, t);

            const double tau = rho * rho;
            const double eta1 = rho * rho_d * x - omega * y + spec->a1()(t);
            const double eta2 = rho * rho_d * y + omega * x + spec->a2()(t);
            auto G = [&](const Dual3& f) { return tau * f.dt + eta1 * f.dx + eta2 * f.dy; };

            const double rr = rho * rho_d;
            const double cc = rho * rho_dd + rho_d * rho_d;
            const double ttt = rho * rho_ddd + 3.0 * rho_d * rho_dd;
            out.residual[0] = G(jet.b) + 2.0 * rr * jet.b.v + 2.0 * omega_d;
            out.residual[1] = G(jet.e1) + 3.0 * rr * jet.e1.v + omega * jet.e2.v +
                              (cc * y + omega_d * x + a2_d) * jet.b.v - ttt * x +
                              omega_dd * y - a1_dd;
            out.residual[2] = G(jet.e2) + 3.0 * rr * jet.e2.v - omega * jet.e1.v -
                              (cc * x - omega_d * y + a1_d) * jet.b.v - ttt * y -
                              omega_dd * x - a2_dd;
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || total < 64) {
        worker(0, total);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (total + threads - 1) / threads;
        for (int k = 0; k < threads; ++k) {
            const std::size_t begin = k * chunk;
            const std::size_t end = std::min(total, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return data;
}

ResidualReport reduce(const std::vector<PointData>& data, int which, std::string identity,
                      const GridSpec& grid, double tol) {
    ResidualReport r;
    r.identity = std::move(identity);
    r.grid = grid_description(grid);
    r.tol = tol;
    double sum = 0.0;
    double mag = 0.0;
    for (const auto& d : data) {
        if (d.skipped) {
            ++r.skipped;
            continue;
        }
        ++r.points;
        mag = std::max(mag, d.field_mag);
        const double a = std::abs(d.residual[static_cast<std::size_t>(which)]);
        sum += a;
        if (a > r.max_abs) {
            r.max_abs = a;
            r.argmax = d.p;
        }
    }
    r.mean_abs = r.points ? sum / static_cast<double>(r.points) : 0.0;
    r.scale = 1.0 + mag;
    r.pass = r.max_abs <= r.tol * r.scale;
    return r;
}

}  // namespace

double field_scale(const FieldModel& field, const GridSpec& grid) {
    double mag = 0.0;
    for (int it = 0; it < grid.nt; ++it) {
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                const double x = axis_value(grid.x_min, grid.x_max, ix, grid.nx);
                const double y = axis_value(grid.y_min, grid.y_max, iy, grid.ny);
                const double t = axis_value(grid.t_min, grid.t_max, it, grid.nt);
                if (point_excluded(field, x, y, t)) continue;
                const FieldValue f = field.value(x, y, t);
                mag = std::max({mag, std::abs(f.e1), std::abs(f.e2), std::abs(f.b)});
            }
        }
    }
    return 1.0 + mag;
}

std::array<ResidualReport, 3> noether_residuals(const FieldModel& field,
                                                const SymmetrySpec& spec, const GridSpec& grid,
                                                double tol, int threads) {
    const auto data = evaluate_grid(field, &spec, grid, threads);
    return {reduce(data, 0, "noether_B", grid, tol), reduce(data, 1, "noether_E1", grid, tol),
            reduce(data, 2, "noether_E2", grid, tol)};
}

ResidualReport faraday_residual(const FieldModel& field, const GridSpec& grid, double tol,
                                int threads) {
    const auto data = evaluate_grid(field, nullptr, grid, threads);
    return reduce(data, 3, "faraday", grid, tol);
}

ResidualReport vector_potential_residual(const FieldProfile& profile, double xbar_min,
                                         double xbar_max, double ybar_min, double ybar_max,
                                         int n, double tol) {
    if (!profile.Abar1 || !profile.Abar2 || !profile.Bbar)
        throw ValidationError("vector_potential_residual needs Abar1, Abar2 and Bbar");
    const Expr residual =
        (profile.Abar2->derivative("xbar") - profile.Abar1->derivative("ybar") - *profile.Bbar)
            .simplified();

    ResidualReport r;
    r.identity = "vector_potential_profile";
    char buf[120];
    std::snprintf(buf, sizeof buf, "%dx%d over [%g,%g]x[%g,%g] (canonical)", n, n, xbar_min,
                  xbar_max, ybar_min, ybar_max);
    r.grid = buf;
    r.tol = tol;
    double sum = 0.0, mag = 0.0;
    Bindings<double> env;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double xb = axis_value(xbar_min, xbar_max, i, n);
            const double yb = axis_value(ybar_min, ybar_max, j, n);
            env.set("xbar", xb).set("ybar", yb);
            mag = std::max(mag, std::abs(profile.Bbar->eval(env)));
            const double a = std::abs(residual.eval(env));
            sum += a;
            ++r.points;
            if (a > r.max_abs) {
                r.max_abs = a;
                r.argmax = {xb, yb, 0.0};
            }
        }
    }
    r.mean_abs = r.points ? sum / static_cast<double>(r.points) : 0.0;
    r.scale = 1.0 + mag;
    r.pass = r.max_abs <= r.tol * r.scale;
    return r;
}

std::array<ResidualReport, 3> potential_field_residuals(const PotentialSet& potentials,
                                                        const FieldModel& field,
                                                        const GridSpec& grid, double tol,
                                                        int threads) {
    (void)threads;  // cheap enough sequentially; kept for interface symmetry
    std::array<ResidualReport, 3> reports;
    const char* names[3] = {"potential_E1", "potential_E2", "potential_B"};
    for (int k = 0; k < 3; ++k) {
        reports[k].identity = names[k];
        reports[k].grid = grid_description(grid);
        reports[k].tol = tol;
    }

    double mag = 0.0;
    std::array<double, 3> sums{};
    for (int it = 0; it < grid.nt; ++it) {
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                const double x = axis_value(grid.x_min, grid.x_max, ix, grid.nx);
                const double y = axis_value(grid.y_min, grid.y_max, iy, grid.ny);
                const double t = axis_value(grid.t_min, grid.t_max, it, grid.nt);
                if (point_excluded(field, x, y, t)) {
                    for (auto& r : reports) ++r.skipped;
                    continue;
                }
                const double hx = kFdStep * std::max(1.0, std::abs(x));
                const double hy = kFdStep * std::max(1.0, std::abs(y));
                const double ht = kFdStep * std::max(1.0, std::abs(t));
                const PotentialValue px1 = potentials.value(x + hx, y, t);
                const PotentialValue px0 = potentials.value(x - hx, y, t);
                const PotentialValue py1 = potentials.value(x, y + hy, t);
                const PotentialValue py0 = potentials.value(x, y - hy, t);
                const PotentialValue pt1 = potentials.value(x, y, t + ht);
                const PotentialValue pt0 = potentials.value(x, y, t - ht);
                const FieldValue f = field.value(x, y, t);
                mag = std::max({mag, std::abs(f.e1), std::abs(f.e2), std::abs(f.b)});

                const double v_x = (px1.v - px0.v) / (2 * hx);
                const double v_y = (py1.v - py0.v) / (2 * hy);
                const double a1_t = (pt1.a1 - pt0.a1) / (2 * ht);
                const double a2_t = (pt1.a2 - pt0.a2) / (2 * ht);
                const double a2_x = (px1.a2 - px0.a2) / (2 * hx);
                const double a1_y = (py1.a1 - py0.a1) / (2 * hy);

                const std::array<double, 3> res = {std::abs(f.e1 + v_x + a1_t),
                                                   std::abs(f.e2 + v_y + a2_t),
                                                   std::abs(f.b - (a2_x - a1_y))};
                for (int k = 0; k < 3; ++k) {
                    ++reports[k].points;
                    sums[k] += res[k];
                    if (res[k] > reports[k].max_abs) {
                        reports[k].max_abs = res[k];
                        reports[k].argmax = {x, y, t};
                    }
                }
            }
        }
    }
    for (int k = 0; k < 3; ++k) {
        reports[k].mean_abs =
            reports[k].points ? sums[k] / static_cast<double>(reports[k].points) : 0.0;
        reports[k].scale = 1.0 + mag;
        reports[k].pass = reports[k].max_abs <= reports[k].tol * reports[k].scale;
    }
    return reports;
}

Expr random_smooth_expr(std::uint64_t seed, const std::vector<std::string>& vars) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()) - 1);
    std::uniform_int_distribution<int> degree(1, 2);
    std::uniform_int_distribution<int> trig(0, 2);

    Expr sum = Expr::number(coef(rng));
    // a few monomials
    for (int k = 0; k < 3; ++k) {
        Expr term = Expr::number(coef(rng));
        term = term * Expr::pow(Expr::variable(vars[static_cast<std::size_t>(pick(rng))]),
                                degree(rng));
        if (vars.size() > 1)
            term = term * Expr::variable(vars[static_cast<std::size_t>(pick(rng))]);
        sum = sum + term;
    }
    // one trigonometric factor keeps derivatives bounded
    const Expr arg = Expr::variable(vars[static_cast<std::size_t>(pick(rng))]);
    switch (trig(rng)) {
        case 0: sum = sum + Expr::number(coef(rng)) * Expr::call(detail::Func::Sin, arg); break;
        case 1: sum = sum + Expr::number(coef(rng)) * Expr::call(detail::Func::Cos, arg); break;
        default: break;
    }
    return sum.simplified();
}

ResidualReport gauge_independence_check(const SymmetrySpec& spec, const FieldProfile& profile,
                                        const Trajectory& trajectory, std::uint64_t seed,
                                        double tol) {
    auto direct = make_invariant(spec, profile);

    FieldProfile gauged1 = profile;
    FieldProfile gauged2 = profile;
    gauged1.lambda = random_smooth_expr(seed * 2654435761u + 1, {"x", "y", "t"});
    gauged2.lambda = random_smooth_expr(seed * 2654435761u + 2, {"x", "y", "t"});
    const PotentialSetPtr pot1 = build_potentials(spec, gauged1);
    const PotentialSetPtr pot2 = build_potentials(spec, gauged2);

    auto via_potentials = [&spec](const PotentialSet& pot, const State& s) {
        const GeneratorComponents g = generator_components(spec, s.x, s.y, s.t);
        const PotentialValue p = pot.value(s.x, s.y, s.t);
        const double v2 = s.vx * s.vx + s.vy * s.vy;
        return g.tau * (0.5 * v2 + p.v) - g.eta1 * (s.vx + p.a1) - g.eta2 * (s.vy + p.a2) +
               p.f;
    };

    ResidualReport r;
    r.identity = "gauge_independence";
    r.grid = "trajectory samples (" + std::to_string(trajectory.samples.size()) + ")";
    r.tol = tol;
    double sum = 0.0, mag = 0.0;
    for (const auto& sample : trajectory.samples) {
        const State& s = sample.state;
        const double i0 = direct(s);
        const double i1 = via_potentials(*pot1, s);
        const double i2 = via_potentials(*pot2, s);
        mag = std::max(mag, std::abs(i0));
        const double worst =
            std::max({std::abs(i1 - i0), std::abs(i2 - i0), std::abs(i1 - i2)});
        sum += worst;
        ++r.points;
        if (worst > r.max_abs) {
            r.max_abs = worst;
            r.argmax = {s.x, s.y, s.t};
        }
    }
    r.mean_abs = r.points ? sum / static_cast<double>(r.points) : 0.0;
    r.scale = 1.0 + mag;
    r.pass = r.max_abs <= r.tol * r.scale;
    return r;
}

}  // namespace noether2d
