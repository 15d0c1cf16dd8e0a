#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "noether2d/dynamics.hpp"
#include "noether2d/verify.hpp"

namespace noether2d {

struct ScenarioTolerances {
    double quadrature = 1e-10;
    double residual = 1e-6;     // identities with exact derivative paths
    double residual_fd = 1e-5;  // identities checked through finite differences
    double integrator = 1e-10;
    double gauge = 1e-8;
    double r_min = 1e-6;
    double rho_min = 1e-6;
    double a_min = 1e-6;
};

struct ScenarioPerturbation {
    FieldComponent component = FieldComponent::B;
    double epsilon = 0.0;
    PerturbationShape shape = PerturbationShape::T;
};

// One self-contained experiment: symmetry data, field profiles, windows,
// tolerances, grid sizes, initial conditions and output paths, loaded from a
// single JSON file whose expression values use the expression grammar.
struct Scenario {
    std::string name;
    SymmetryCase kind = SymmetryCase::A;
    std::optional<SymmetrySpec> symmetry;
    FieldProfile profile;
    TimeWindow t_window;
    double t_ref = 0.0;
    SpatialBounds bounds{-1, 1, -1, 1};
    ScenarioTolerances tolerances;
    int grid_nx = 20, grid_ny = 20, grid_nt = 10;
    std::vector<State> initial_conditions;
    double output_dt = 0.0;  // 0: window length / 200
    std::uint64_t seed = 1;
    std::string report_path = "report.json";
    std::string trajectory_prefix = "trajectory";
    std::optional<ScenarioPerturbation> perturbation;

    const SymmetrySpec& spec() const { return *symmetry; }
    GridSpec grid() const;
    FieldModelPtr build(bool apply_perturbation = true) const;
    double effective_output_dt() const;
};

// Throws ValidationError with the offending field name on malformed input.
Scenario load_scenario(const std::filesystem::path& path);

// Exit codes: 0 all checks pass, 1 checks ran and failed, 2 input error.
int run_verify(const Scenario& scenario, const std::filesystem::path& out_dir, int threads,
               std::ostream& log);
int run_simulate(const Scenario& scenario, const std::filesystem::path& out_dir, int threads,
                 std::ostream& log);
int run_transform(const Scenario& scenario, double x, double y, double t, std::ostream& log);

// Full command-line front end (verify|simulate|transform).
int cli_main(int argc, const char* const* argv);

}  // namespace noether2d
