#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "noether2d/dual.hpp"
#include "noether2d/expr.hpp"
#include "noether2d/symmetry.hpp"

namespace noether2d {

// The free functions of one field class.  The barred profiles are functions
// of the canonical coordinates (variables "xbar", "ybar"); the gauge
// function lambda is a function of the physical coordinates (x, y, t).
struct FieldProfile {
    std::optional<Expr> Bbar;            // case A magnetic profile
    std::optional<Expr> Vbar;            // scalar profile (all cases)
    std::optional<Expr> psi;             // cases B and C
    std::optional<Expr> Abar1, Abar2;    // case A vector-potential profile
    std::optional<Expr> lambda;          // gauge function, defaults to 0
};

struct FieldValue {
    double e1, e2, b;
};

// Values together with exact first partials in (x, y, t).
struct FieldJet {
    Dual3 e1, e2, b;
};

class FieldModel {
public:
    virtual ~FieldModel() = default;
    virtual SymmetryCase kind() const = 0;
    virtual const SymmetrySpec& spec() const = 0;
    virtual const FieldProfile& profile() const = 0;
    virtual FieldValue value(double x, double y, double t) const = 0;
    virtual FieldJet jet(double x, double y, double t) const = 0;

    // Radius of the excluded disc around the case B translation centre;
    // zero for the other cases.
    virtual double excluded_radius() const { return 0.0; }

    // Case A models own a canonical map (quadrature caches); null otherwise.
    virtual std::shared_ptr<const CanonicalMap> canonical_map() const { return nullptr; }
};

using FieldModelPtr = std::shared_ptr<const FieldModel>;

struct FieldBuildOptions {
    double quad_tol = kDefaultQuadTol;
    double r_min = 1e-6;  // case B excluded-disc radius
};

// B = (Bbar - 2 Omega)/rho^2; E from the component formulas with
// Ebar = -grad Vbar evaluated at the canonical coordinates.
FieldModelPtr build_field_a(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options = {});
// B = Bbar = -psi_xbar/xbar; Ebar2 = psi_ybar/xbar^2, Ebar1 = -Vbar_xbar/xbar.
FieldModelPtr build_field_b(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options = {});
// B = Bbar = psi_xbar; Ebar1 = -Vbar_xbar, Ebar2 from the Faraday solution.
FieldModelPtr build_field_c(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options = {});

// Dispatch on spec.kind().
FieldModelPtr build_field(const SymmetrySpec& spec, const FieldProfile& profile,
                          const FieldBuildOptions& options = {});

// Case A electric field through the compact rotation-matrix form; agrees
// with the component form to rounding.
std::pair<double, double> electric_field_vector_form_a(const FieldModel& model, double x,
                                                       double y, double t);
std::pair<double, double> electric_field_vector_form_a(const SymmetrySpec& spec,
                                                       const FieldProfile& profile, double x,
                                                       double y, double t);

//------------------------- perturbation injection -------------------------//

enum class FieldComponent { E1, E2, B };
enum class PerturbationShape { Constant, X, Y, T };

FieldComponent parse_field_component(const std::string& name);
PerturbationShape parse_perturbation_shape(const std::string& name);

// Adds epsilon * shape(x, y, t) to one component; used as a negative control
// to show that the residual checks and the invariant drift test detect a
// field that no longer satisfies the construction.
FieldModelPtr perturb_field(FieldModelPtr base, FieldComponent component, double epsilon,
                            PerturbationShape shape);

//------------------------------ potentials ------------------------------//

struct PotentialValue {
    double a1, a2, v, f;
};

class PotentialSet {
public:
    virtual ~PotentialSet() = default;
    virtual SymmetryCase kind() const = 0;
    virtual const SymmetrySpec& spec() const = 0;
    virtual PotentialValue value(double x, double y, double t) const = 0;
};

using PotentialSetPtr = std::shared_ptr<const PotentialSet>;

struct PotentialBuildOptions {
    double quad_tol = kDefaultQuadTol;
    // Case A acceptance grid for the vector-potential profile relation
    // Abar2_xbar - Abar1_ybar = Bbar.
    double check_tol = 1e-6;
    double xbar_min = -2.0, xbar_max = 2.0;
    double ybar_min = -2.0, ybar_max = 2.0;
    int check_n = 16;
};

PotentialSetPtr build_potentials(const SymmetrySpec& spec, const FieldProfile& profile,
                                 const PotentialBuildOptions& options = {});

}  // namespace noether2d
