#include "noether2d/scenario.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace noether2d {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ValidationError(field + ": " + what);
}

const json& require_key(const json& j, const std::string& ctx, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) fail(ctx + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) fail(ctx, "expected a number");
    return j.get<double>();
}

std::string as_string(const json& j, const std::string& ctx) {
    if (!j.is_string()) fail(ctx, "expected a string");
    return j.get<std::string>();
}

Expr parse_field_expr(const json& j, const std::string& ctx) {
    const std::string text = as_string(j, ctx);
    try {
        return parse_expression(text);
    } catch (const ExprParseError& e) {
        fail(ctx, std::string("malformed expression: ") + e.what());
    }
}

std::optional<Expr> optional_expr(const json& j, const std::string& ctx,
                                  const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    return parse_field_expr(*it, ctx + "." + key);
}

std::pair<double, double> as_range(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2) fail(ctx, "expected [lo, hi]");
    const double lo = as_number(j[0], ctx + "[0]");
    const double hi = as_number(j[1], ctx + "[1]");
    if (!(lo < hi)) fail(ctx, "range is degenerate");
    return {lo, hi};
}

json report_to_json(const ResidualReport& r) {
    return json{{"identity", r.identity},
                {"grid", r.grid},
                {"points", r.points},
                {"skipped", r.skipped},
                {"max_abs", r.max_abs},
                {"mean_abs", r.mean_abs},
                {"argmax", {{"x", r.argmax.x}, {"y", r.argmax.y}, {"t", r.argmax.t}}},
                {"scale", r.scale},
                {"tol", r.tol},
                {"pass", r.pass}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open output file " + path.string());
    os << text;
}

}  // namespace

GridSpec Scenario::grid() const {
    GridSpec g;
    g.nx = grid_nx;
    g.ny = grid_ny;
    g.nt = grid_nt;
    g.x_min = bounds.x_min;
    g.x_max = bounds.x_max;
    g.y_min = bounds.y_min;
    g.y_max = bounds.y_max;
    g.t_min = t_window.t_min;
    g.t_max = t_window.t_max;
    return g;
}

FieldModelPtr Scenario::build(bool apply_perturbation) const {
    FieldBuildOptions options;
    options.quad_tol = tolerances.quadrature;
    options.r_min = tolerances.r_min;
    FieldModelPtr field = build_field(spec(), profile, options);
    if (apply_perturbation && perturbation)
        field = perturb_field(field, perturbation->component, perturbation->epsilon,
                              perturbation->shape);
    return field;
}

double Scenario::effective_output_dt() const {
    return output_dt > 0 ? output_dt : t_window.length() / 200.0;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }

    Scenario s;
    s.name = path.stem().string();

    const std::string case_tag = as_string(require_key(j, "scenario", "case"), "case");
    if (case_tag == "A") s.kind = SymmetryCase::A;
    else if (case_tag == "B") s.kind = SymmetryCase::B;
    else if (case_tag == "C") s.kind = SymmetryCase::C;
    else fail("case", "expected \"A\", \"B\" or \"C\"");

    if (auto it = j.find("tolerances"); it != j.end()) {
        const json& tj = *it;
        auto opt = [&](const char* key, double& into) {
            if (auto f = tj.find(key); f != tj.end()) into = as_number(*f, std::string("tolerances.") + key);
        };
        opt("quadrature", s.tolerances.quadrature);
        opt("residual", s.tolerances.residual);
        opt("residual_fd", s.tolerances.residual_fd);
        opt("integrator", s.tolerances.integrator);
        opt("gauge", s.tolerances.gauge);
        opt("r_min", s.tolerances.r_min);
        opt("rho_min", s.tolerances.rho_min);
        opt("a_min", s.tolerances.a_min);
    }

    const json& wj = require_key(j, "scenario", "windows");
    const auto [t0, t1] = as_range(require_key(wj, "windows", "t"), "windows.t");
    const auto [x0, x1] = as_range(require_key(wj, "windows", "x"), "windows.x");
    const auto [y0, y1] = as_range(require_key(wj, "windows", "y"), "windows.y");
    s.t_window = {t0, t1};
    s.bounds = {x0, x1, y0, y1};
    s.t_ref = 0.0;
    if (auto it = wj.find("t_ref"); it != wj.end()) s.t_ref = as_number(*it, "windows.t_ref");

    SymmetrySpecOptions spec_options;
    spec_options.rho_min = s.tolerances.rho_min;
    spec_options.a_min = s.tolerances.a_min;

    const json& sj = require_key(j, "scenario", "symmetry");
    try {
        switch (s.kind) {
            case SymmetryCase::A:
                s.symmetry = SymmetrySpec::case_a(
                    parse_field_expr(require_key(sj, "symmetry", "rho"), "symmetry.rho"),
                    parse_field_expr(require_key(sj, "symmetry", "omega"), "symmetry.omega"),
                    parse_field_expr(require_key(sj, "symmetry", "alpha1"), "symmetry.alpha1"),
                    parse_field_expr(require_key(sj, "symmetry", "alpha2"), "symmetry.alpha2"),
                    s.t_window, s.t_ref, spec_options);
                break;
            case SymmetryCase::B:
                s.symmetry = SymmetrySpec::case_b(
                    parse_field_expr(require_key(sj, "symmetry", "beta1"), "symmetry.beta1"),
                    parse_field_expr(require_key(sj, "symmetry", "beta2"), "symmetry.beta2"),
                    s.t_window, s.t_ref, spec_options);
                break;
            case SymmetryCase::C:
                s.symmetry = SymmetrySpec::case_c(
                    parse_field_expr(require_key(sj, "symmetry", "a1"), "symmetry.a1"),
                    parse_field_expr(require_key(sj, "symmetry", "a2"), "symmetry.a2"),
                    s.t_window, s.t_ref, spec_options);
                break;
        }
    } catch (const ValidationError&) {
        throw;
    }

    const json& pj = require_key(j, "scenario", "profile");
    s.profile.Bbar = optional_expr(pj, "profile", "Bbar");
    s.profile.Vbar = optional_expr(pj, "profile", "Vbar");
    s.profile.psi = optional_expr(pj, "profile", "psi");
    s.profile.Abar1 = optional_expr(pj, "profile", "Abar1");
    s.profile.Abar2 = optional_expr(pj, "profile", "Abar2");
    s.profile.lambda = optional_expr(pj, "profile", "lambda");

    if (auto it = j.find("grid"); it != j.end()) {
        auto dim = [&](const char* key, int& into) {
            if (auto f = it->find(key); f != it->end()) {
                const double v = as_number(*f, std::string("grid.") + key);
                if (v < 2 || v != std::floor(v)) fail(std::string("grid.") + key, "expected an integer >= 2");
                into = static_cast<int>(v);
            }
        };
        dim("nx", s.grid_nx);
        dim("ny", s.grid_ny);
        dim("nt", s.grid_nt);
    }

    if (auto it = j.find("initial_conditions"); it != j.end()) {
        if (!it->is_array()) fail("initial_conditions", "expected an array");
        int k = 0;
        for (const auto& ic : *it) {
            const std::string ctx = "initial_conditions[" + std::to_string(k++) + "]";
            State st;
            st.t = as_number(require_key(ic, ctx, "t"), ctx + ".t");
            st.x = as_number(require_key(ic, ctx, "x"), ctx + ".x");
            st.y = as_number(require_key(ic, ctx, "y"), ctx + ".y");
            st.vx = as_number(require_key(ic, ctx, "vx"), ctx + ".vx");
            st.vy = as_number(require_key(ic, ctx, "vy"), ctx + ".vy");
            if (!s.t_window.contains(st.t)) fail(ctx + ".t", "outside the time window");
            s.initial_conditions.push_back(st);
        }
    }

    if (auto it = j.find("output_dt"); it != j.end())
        s.output_dt = as_number(*it, "output_dt");
    if (auto it = j.find("seed"); it != j.end())
        s.seed = static_cast<std::uint64_t>(as_number(*it, "seed"));

    if (auto it = j.find("outputs"); it != j.end()) {
        if (auto f = it->find("report"); f != it->end())
            s.report_path = as_string(*f, "outputs.report");
        if (auto f = it->find("trajectory_prefix"); f != it->end())
            s.trajectory_prefix = as_string(*f, "outputs.trajectory_prefix");
    }

    if (auto it = j.find("perturbation"); it != j.end()) {
        ScenarioPerturbation p;
        p.component = parse_field_component(
            as_string(require_key(*it, "perturbation", "component"), "perturbation.component"));
        p.epsilon = as_number(require_key(*it, "perturbation", "epsilon"), "perturbation.epsilon");
        p.shape = parse_perturbation_shape(
            as_string(require_key(*it, "perturbation", "shape"), "perturbation.shape"));
        s.perturbation = p;
    }
    return s;
}

int run_verify(const Scenario& scenario, const std::filesystem::path& out_dir, int threads,
               std::ostream& log) {
    const FieldModelPtr field = scenario.build();
    const GridSpec grid = scenario.grid();
    const double tol = scenario.tolerances.residual;

    std::vector<ResidualReport> reports;
    const auto noether = noether_residuals(*field, scenario.spec(), grid, tol, threads);
    reports.insert(reports.end(), noether.begin(), noether.end());
    reports.push_back(faraday_residual(*field, grid, tol, threads));

    if (scenario.kind == SymmetryCase::A && scenario.profile.Abar1 && scenario.profile.Abar2) {
        // Check the vector-potential relation over the canonical image of the
        // spatial window corners.
        const auto map = field->canonical_map();
        double xb_min = 1e300, xb_max = -1e300, yb_min = 1e300, yb_max = -1e300;
        for (double tx : {grid.x_min, grid.x_max}) {
            for (double ty : {grid.y_min, grid.y_max}) {
                for (double tt : {grid.t_min, 0.5 * (grid.t_min + grid.t_max), grid.t_max}) {
                    const CanonicalCoords c = map->to_canonical(tx, ty, tt);
                    xb_min = std::min(xb_min, c.xbar);
                    xb_max = std::max(xb_max, c.xbar);
                    yb_min = std::min(yb_min, c.ybar);
                    yb_max = std::max(yb_max, c.ybar);
                }
            }
        }
        reports.push_back(vector_potential_residual(scenario.profile, xb_min, xb_max, yb_min,
                                                    yb_max, 20, tol));
    }

    bool all_pass = true;
    json out;
    out["scenario"] = scenario.name;
    out["case"] = to_string(scenario.kind);
    out["reports"] = json::array();
    for (const auto& r : reports) {
        all_pass = all_pass && r.pass;
        out["reports"].push_back(report_to_json(r));
        log << (r.pass ? "[pass] " : "[FAIL] ") << r.identity << ": max " << r.max_abs
            << " (tol " << r.tol * r.scale << ")\n";
    }
    out["pass"] = all_pass;

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / scenario.report_path, out.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

int run_simulate(const Scenario& scenario, const std::filesystem::path& out_dir, int threads,
                 std::ostream& log) {
    if (scenario.initial_conditions.empty())
        throw ValidationError("initial_conditions: empty list, nothing to simulate");

    const FieldModelPtr field = scenario.build();
    const auto invariant =
        make_invariant(scenario.spec(), scenario.profile, field->canonical_map());
    const double t_end = scenario.t_window.t_max;
    const double output_dt = scenario.effective_output_dt();

    IntegrateOptions options;
    options.bounds = scenario.bounds;
    options.invariant = invariant;

    struct Result {
        Trajectory trajectory;
        std::string error;
    };
    const std::size_t n = scenario.initial_conditions.size();
    std::vector<Result> results(n);

    auto run_one = [&](std::size_t k) {
        try {
            results[k].trajectory =
                integrate(*field, scenario.initial_conditions[k], t_end,
                          scenario.tolerances.integrator, output_dt, options);
        } catch (const Error& e) {
            results[k].error = e.what();
        }
    };
    if (threads <= 1) {
        for (std::size_t k = 0; k < n; ++k) run_one(k);
    } else {
        std::vector<std::future<void>> futures;
        for (std::size_t k = 0; k < n; ++k)
            futures.push_back(std::async(std::launch::async, run_one, k));
        for (auto& f : futures) f.get();
    }

    std::filesystem::create_directories(out_dir);
    bool ok = true;
    json summary;
    summary["scenario"] = scenario.name;
    summary["trajectories"] = json::array();
    for (std::size_t k = 0; k < n; ++k) {
        if (!results[k].error.empty()) {
            ok = false;
            log << "trajectory " << k << ": ERROR " << results[k].error << "\n";
            summary["trajectories"].push_back(json{{"index", k}, {"error", results[k].error}});
            continue;
        }
        const std::string file =
            scenario.trajectory_prefix + "_" + std::to_string(k) + ".csv";
        std::ofstream os(out_dir / file);
        if (!os) throw ValidationError("cannot open output file " + (out_dir / file).string());
        write_trajectory_csv(os, results[k].trajectory);
        const double drift = max_relative_drift(results[k].trajectory);
        log << "trajectory " << k << ": samples "
            << results[k].trajectory.samples.size() << ", max relative drift " << drift
            << "\n";
        summary["trajectories"].push_back(json{{"index", k},
                                               {"file", file},
                                               {"samples", results[k].trajectory.samples.size()},
                                               {"steps", results[k].trajectory.stats.steps},
                                               {"rejected", results[k].trajectory.stats.rejected},
                                               {"max_relative_drift", drift}});
    }
    write_text_file(out_dir / (scenario.trajectory_prefix + "_drift.json"),
                    summary.dump(2) + "\n");
    return ok ? 0 : 1;
}

int run_transform(const Scenario& scenario, double x, double y, double t, std::ostream& log) {
    CanonicalMap map(scenario.spec(), scenario.tolerances.quadrature);
    const CanonicalCoords c = map.to_canonical(x, y, t);
    const GeneratorComponents g = generator_components(scenario.spec(), x, y, t);
    char buf[360];
    std::snprintf(buf, sizeof buf,
                  "xbar = %.17g\nybar = %.17g\ntbar = %.17g\n"
                  "tau = %.17g\neta1 = %.17g\neta2 = %.17g\n",
                  c.xbar, c.ybar, c.tbar, g.tau, g.eta1, g.eta2);
    log << buf;
    return 0;
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Planar electromagnetic fields with exact invariants: "
                 "construction, verification and particle tracing"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    int threads = 1;
    double tx = 0, ty = 0, tt = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--threads", threads, "worker threads (default 1, reproducible)");
        cmd->add_option("--out", out_dir, "output directory");
    };
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the residual checks");
    add_common(verify_cmd);
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate the trajectories");
    add_common(simulate_cmd);
    CLI::App* transform_cmd =
        app.add_subcommand("transform", "print canonical coordinates and generator");
    add_common(transform_cmd);
    transform_cmd->add_option("x", tx, "x coordinate")->required();
    transform_cmd->add_option("y", ty, "y coordinate")->required();
    transform_cmd->add_option("t", tt, "time")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Scenario scenario = load_scenario(scenario_path);
        if (verify_cmd->parsed())
            return run_verify(scenario, out_dir, threads, std::cout);
        if (simulate_cmd->parsed())
            return run_simulate(scenario, out_dir, threads, std::cout);
        return run_transform(scenario, tx, ty, tt, std::cout);
    } catch (const ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ExprParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace noether2d
