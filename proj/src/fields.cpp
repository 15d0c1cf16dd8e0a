#include "noether2d/fields.hpp"

#include <cmath>
#include <string>

namespace noether2d {
namespace {

const Expr& require_profile(const std::optional<Expr>& e, const char* name,
                            const char* case_name) {
    if (!e)
        throw ValidationError(std::string("field case ") + case_name +
                              " requires profile function '" + name + "'");
    return *e;
}

void check_profile_vars(const Expr& e, const char* name) {
    for (const auto& v : e.variables()) {
        if (v != "xbar" && v != "ybar")
            throw ValidationError(std::string("profile function '") + name +
                                  "' may depend only on xbar, ybar; found '" + v + "'");
    }
}

void check_gauge_vars(const Expr& e) {
    for (const auto& v : e.variables()) {
        if (v != "x" && v != "y" && v != "t")
            throw ValidationError("gauge function may depend only on x, y, t; found '" + v +
                                  "'");
    }
}

// Injects a cached canonical-time value with its exact rate into the Real
// arithmetic: doubles keep the value, duals also carry d/dt.
inline double with_rate(double value, double /*rate*/, const double& /*tag*/) { return value; }
inline Dual3 with_rate(double value, double rate, const Dual3& /*tag*/) {
    return Dual3(value, 0.0, 0.0, rate);
}

template <class Real>
struct Coords {
    Real x, y, t;
};

inline Coords<double> value_coords(double x, double y, double t) { return {x, y, t}; }
inline Coords<Dual3> jet_coords(double x, double y, double t) {
    return {Dual3::var_x(x), Dual3::var_y(y), Dual3::var_t(t)};
}

template <class Real>
struct EM {
    Real e1, e2, b;
};

//------------------------------- case A --------------------------------//

class FieldModelA final : public FieldModel {
public:
    FieldModelA(const SymmetrySpec& spec, const FieldProfile& profile,
                const FieldBuildOptions& options)
        : spec_(spec), profile_(profile) {
        if (spec.kind() != SymmetryCase::A)
            throw ValidationError("build_field_a requires a case A symmetry");
        const Expr& bbar = require_profile(profile.Bbar, "Bbar", "A");
        const Expr& vbar = require_profile(profile.Vbar, "Vbar", "A");
        check_profile_vars(bbar, "Bbar");
        check_profile_vars(vbar, "Vbar");
        bbar_ = bbar.simplified();
        ebar1_ = (-vbar.derivative("xbar")).simplified();
        ebar2_ = (-vbar.derivative("ybar")).simplified();
        map_ = std::make_shared<CanonicalMap>(spec, options.quad_tol);
    }

    SymmetryCase kind() const override { return SymmetryCase::A; }
    const SymmetrySpec& spec() const override { return spec_; }
    const FieldProfile& profile() const override { return profile_; }
    std::shared_ptr<const CanonicalMap> canonical_map() const override { return map_; }

    FieldValue value(double x, double y, double t) const override {
        const auto em = eval(value_coords(x, y, t), map_->case_a_time(t));
        return {em.e1, em.e2, em.b};
    }
    FieldJet jet(double x, double y, double t) const override {
        const auto em = eval(jet_coords(x, y, t), map_->case_a_time(t));
        return {em.e1, em.e2, em.b};
    }

    std::pair<double, double> vector_form(double x, double y, double t) const {
        const CanonicalMap::CaseATime ct = map_->case_a_time(t);
        const auto& spec = spec_;
        const double rho = spec.rho()(t), rho_d = spec.rho().d(1, t),
                     rho_dd = spec.rho().d(2, t);
        const double omega = spec.omega()(t), omega_d = spec.omega().d(1, t);
        const double al1 = spec.alpha1()(t), al1_d = spec.alpha1().d(1, t),
                     al1_dd = spec.alpha1().d(2, t);
        const double al2 = spec.alpha2()(t), al2_d = spec.alpha2().d(1, t),
                     al2_dd = spec.alpha2().d(2, t);
        const double rho2 = rho * rho, rho3 = rho2 * rho, rho4 = rho2 * rho2;

        const double c = std::cos(ct.angle), s = std::sin(ct.angle);
        const double u = (x - al1) / rho, v = (y - al2) / rho;
        const double xb = u * c + v * s + ct.delta1;
        const double yb = v * c - u * s + ct.delta2;
        Bindings<double> env;
        env.set("xbar", xb).set("ybar", yb);
        const double Bb = bbar_.eval(env);
        const double Eb1 = ebar1_.eval(env), Eb2 = ebar2_.eval(env);

        // eta = rho rho' (q - alpha) + rho^2 alpha' + Omega x q, and its
        // partial time derivative at fixed q.
        const double eta1 = rho * rho_d * (x - al1) + rho2 * al1_d - omega * y;
        const double eta2 = rho * rho_d * (y - al2) + rho2 * al2_d + omega * x;
        const double dd = rho_d * rho_d + rho * rho_dd;
        const double eta1_t = dd * (x - al1) + rho * rho_d * al1_d + rho2 * al1_dd -
                              omega_d * y;
        const double eta2_t = dd * (y - al2) + rho * rho_d * al2_d + rho2 * al2_dd +
                              omega_d * x;

        const double e1 = (rho * (rho * eta1_t - rho_d * eta1) + eta2 * omega) / rho4 +
                          (Eb1 * c - Eb2 * s) / rho3 - Bb * eta2 / rho4;
        const double e2 = (rho * (rho * eta2_t - rho_d * eta2) - eta1 * omega) / rho4 +
                          (Eb2 * c + Eb1 * s) / rho3 + Bb * eta1 / rho4;
        return {e1, e2};
    }

private:
    template <class Real>
    EM<Real> eval(const Coords<Real>& c, const CanonicalMap::CaseATime& ct) const {
        using std::cos;
        using std::sin;
        const Real rho = spec_.rho().eval(0, c.t);
        const Real rho_d = spec_.rho().eval(1, c.t);
        const Real rho_dd = spec_.rho().eval(2, c.t);
        const Real omega = spec_.omega().eval(0, c.t);
        const Real omega_d = spec_.omega().eval(1, c.t);
        const Real al1 = spec_.alpha1().eval(0, c.t);
        const Real al1_d = spec_.alpha1().eval(1, c.t);
        const Real al1_dd = spec_.alpha1().eval(2, c.t);
        const Real al2 = spec_.alpha2().eval(0, c.t);
        const Real al2_d = spec_.alpha2().eval(1, c.t);
        const Real al2_dd = spec_.alpha2().eval(2, c.t);

        const Real T = with_rate(ct.angle, ct.angle_rate, c.t);
        const Real d1 = with_rate(ct.delta1, ct.delta1_rate, c.t);
        const Real d2 = with_rate(ct.delta2, ct.delta2_rate, c.t);

        const Real rho2 = rho * rho;
        const Real rho3 = rho2 * rho;
        const Real rho4 = rho2 * rho2;
        const Real cosT = cos(T), sinT = sin(T);
        const Real u = (c.x - al1) / rho, v = (c.y - al2) / rho;
        const Real xb = u * cosT + v * sinT + d1;
        const Real yb = v * cosT - u * sinT + d2;

        Bindings<Real> env;
        env.set("xbar", xb).set("ybar", yb);
        const Real Bb = bbar_.eval(env);
        const Real Eb1 = ebar1_.eval(env);
        const Real Eb2 = ebar2_.eval(env);

        EM<Real> out;
        out.b = (Bb - 2.0 * omega) / rho2;
        out.e1 = al1_dd + rho_dd / rho * (c.x - al1) + omega * omega * c.x / rho4 -
                 (rho * omega_d - 2.0 * rho_d * omega) * c.y / rho3 +
                 omega / rho3 * (rho * al2_d - rho_d * al2) +
                 (Eb1 * cosT - Eb2 * sinT) / rho3 -
                 (rho * rho_d * (c.y - al2) + rho2 * al2_d + omega * c.x) * Bb / rho4;
        out.e2 = al2_dd + rho_dd / rho * (c.y - al2) + omega * omega * c.y / rho4 +
                 (rho * omega_d - 2.0 * rho_d * omega) * c.x / rho3 -
                 omega / rho3 * (rho * al1_d - rho_d * al1) +
                 (Eb2 * cosT + Eb1 * sinT) / rho3 +
                 (rho * rho_d * (c.x - al1) + rho2 * al1_d - omega * c.y) * Bb / rho4;
        return out;
    }

    SymmetrySpec spec_;
    FieldProfile profile_;
    Expr bbar_, ebar1_, ebar2_;
    std::shared_ptr<CanonicalMap> map_;
};

//------------------------------- case B --------------------------------//

class FieldModelB final : public FieldModel {
public:
    FieldModelB(const SymmetrySpec& spec, const FieldProfile& profile,
                const FieldBuildOptions& options)
        : spec_(spec), profile_(profile), r_min_(options.r_min) {
        if (spec.kind() != SymmetryCase::B)
            throw ValidationError("build_field_b requires a case B symmetry");
        const Expr& psi = require_profile(profile.psi, "psi", "B");
        const Expr& vbar = require_profile(profile.Vbar, "Vbar", "B");
        check_profile_vars(psi, "psi");
        check_profile_vars(vbar, "Vbar");
        const Expr xbar = Expr::variable("xbar");
        bbar_ = (-psi.derivative("xbar") / xbar).simplified();
        ebar2_ = (psi.derivative("ybar") / (xbar * xbar)).simplified();
        ebar1_ = (-vbar.derivative("xbar") / xbar).simplified();
    }

    SymmetryCase kind() const override { return SymmetryCase::B; }
    const SymmetrySpec& spec() const override { return spec_; }
    const FieldProfile& profile() const override { return profile_; }
    double excluded_radius() const override { return r_min_; }

    FieldValue value(double x, double y, double t) const override {
        const auto em = eval(value_coords(x, y, t));
        return {em.e1, em.e2, em.b};
    }
    FieldJet jet(double x, double y, double t) const override {
        const auto em = eval(jet_coords(x, y, t));
        return {em.e1, em.e2, em.b};
    }

private:
    template <class Real>
    EM<Real> eval(const Coords<Real>& c) const {
        using std::sqrt;
        spec_.require_in_window(scalar_value(c.t));
        const Real b1 = spec_.beta1().eval(0, c.t);
        const Real b1_d = spec_.beta1().eval(1, c.t);
        const Real b1_dd = spec_.beta1().eval(2, c.t);
        const Real b2 = spec_.beta2().eval(0, c.t);
        const Real b2_d = spec_.beta2().eval(1, c.t);
        const Real b2_dd = spec_.beta2().eval(2, c.t);

        const Real dx = c.x - b1, dy = c.y - b2;
        const Real xb = sqrt(dx * dx + dy * dy);
        if (scalar_value(xb) < r_min_)
            throw FieldDomainError("case B field evaluated inside the excluded disc");
        Bindings<Real> env;
        env.set("xbar", xb).set("ybar", c.t);
        const Real Bb = bbar_.eval(env);
        const Real Eb1 = ebar1_.eval(env);
        const Real Eb2 = ebar2_.eval(env);

        EM<Real> out;
        out.b = Bb;
        out.e1 = b1_dd - b2_d * Bb + dx * Eb1 - dy * Eb2;
        out.e2 = b2_dd + b1_d * Bb + dx * Eb2 + dy * Eb1;
        return out;
    }

    SymmetrySpec spec_;
    FieldProfile profile_;
    Expr bbar_, ebar1_, ebar2_;
    double r_min_;
};

//------------------------------- case C --------------------------------//

class FieldModelC final : public FieldModel {
public:
    FieldModelC(const SymmetrySpec& spec, const FieldProfile& profile)
        : spec_(spec), profile_(profile) {
        if (spec.kind() != SymmetryCase::C)
            throw ValidationError("build_field_c requires a case C symmetry");
        const Expr& psi = require_profile(profile.psi, "psi", "C");
        const Expr& vbar = require_profile(profile.Vbar, "Vbar", "C");
        check_profile_vars(psi, "psi");
        check_profile_vars(vbar, "Vbar");
        psi_ = psi.simplified();
        psi_xb_ = psi.derivative("xbar").simplified();  // Bbar in the primed frame
        psi_yb_ = psi.derivative("ybar").simplified();
        vbar_xb_ = vbar.derivative("xbar").simplified();
    }

    SymmetryCase kind() const override { return SymmetryCase::C; }
    const SymmetrySpec& spec() const override { return spec_; }
    const FieldProfile& profile() const override { return profile_; }

    FieldValue value(double x, double y, double t) const override {
        const auto em = eval(value_coords(x, y, t));
        return {em.e1, em.e2, em.b};
    }
    FieldJet jet(double x, double y, double t) const override {
        const auto em = eval(jet_coords(x, y, t));
        return {em.e1, em.e2, em.b};
    }

private:
    // With a2 vanishing the axes swap roles: the primed frame (p, q) has a
    // nonzero translation coefficient along q, and the physical field is the
    // mirrored primed field with reversed magnetic sign.
    template <class Real>
    EM<Real> eval(const Coords<Real>& c) const {
        spec_.require_in_window(scalar_value(c.t));
        const bool swapped = spec_.axis_swapped();
        const Real p = swapped ? c.y : c.x;
        const Real q = swapped ? c.x : c.y;
        const TimeFunction& u1f = swapped ? spec_.a2() : spec_.a1();
        const TimeFunction& u2f = swapped ? spec_.a1() : spec_.a2();

        const Real u1 = u1f.eval(0, c.t), u1_d = u1f.eval(1, c.t), u1_dd = u1f.eval(2, c.t);
        const Real u2 = u2f.eval(0, c.t), u2_d = u2f.eval(1, c.t), u2_dd = u2f.eval(2, c.t);

        const Real xb = p - u1 * q / u2;
        Bindings<Real> env;
        env.set("xbar", xb).set("ybar", c.t);
        const Real Bb = psi_xb_.eval(env);
        const Real psi_v = psi_.eval(env);
        const Real psi_y = psi_yb_.eval(env);
        const Real vx = vbar_xb_.eval(env);

        const Real Eb1 = -vx;
        const Real Eb2 = u1_dd / u2 * xb - u2_d / u2 * psi_v - psi_y + u1 / u2 * vx;
        const Real e1p = u1_dd * q / u2 - u2_d * q / u2 * Bb + Eb1;
        const Real e2p = u2_dd * q / u2 + u1_d * q / u2 * Bb + Eb2;

        EM<Real> out;
        if (swapped) {
            out.e1 = e2p;
            out.e2 = e1p;
            out.b = -Bb;
        } else {
            out.e1 = e1p;
            out.e2 = e2p;
            out.b = Bb;
        }
        return out;
    }

    SymmetrySpec spec_;
    FieldProfile profile_;
    Expr psi_, psi_xb_, psi_yb_, vbar_xb_;
};

//---------------------------- perturbed model ----------------------------//

class PerturbedFieldModel final : public FieldModel {
public:
    PerturbedFieldModel(FieldModelPtr base, FieldComponent component, double epsilon,
                        PerturbationShape shape)
        : base_(std::move(base)), component_(component), epsilon_(epsilon), shape_(shape) {}

    SymmetryCase kind() const override { return base_->kind(); }
    const SymmetrySpec& spec() const override { return base_->spec(); }
    const FieldProfile& profile() const override { return base_->profile(); }
    double excluded_radius() const override { return base_->excluded_radius(); }
    std::shared_ptr<const CanonicalMap> canonical_map() const override {
        return base_->canonical_map();
    }

    FieldValue value(double x, double y, double t) const override {
        FieldValue v = base_->value(x, y, t);
        const double d = epsilon_ * shape_value(x, y, t).v;
        apply(v.e1, v.e2, v.b, d);
        return v;
    }
    FieldJet jet(double x, double y, double t) const override {
        FieldJet j = base_->jet(x, y, t);
        Dual3 d = shape_value(x, y, t);
        d = Dual3(epsilon_) * d;
        switch (component_) {
            case FieldComponent::E1: j.e1 += d; break;
            case FieldComponent::E2: j.e2 += d; break;
            case FieldComponent::B: j.b += d; break;
        }
        return j;
    }

private:
    Dual3 shape_value(double x, double y, double t) const {
        switch (shape_) {
            case PerturbationShape::Constant: return Dual3(1.0);
            case PerturbationShape::X: return Dual3::var_x(x);
            case PerturbationShape::Y: return Dual3::var_y(y);
            case PerturbationShape::T: return Dual3::var_t(t);
        }
        return Dual3(0.0);
    }
    void apply(double& e1, double& e2, double& b, double d) const {
        switch (component_) {
            case FieldComponent::E1: e1 += d; break;
            case FieldComponent::E2: e2 += d; break;
            case FieldComponent::B: b += d; break;
        }
    }

    FieldModelPtr base_;
    FieldComponent component_;
    double epsilon_;
    PerturbationShape shape_;
};

}  // namespace

FieldModelPtr build_field_a(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options) {
    return std::make_shared<FieldModelA>(spec, profile, options);
}

FieldModelPtr build_field_b(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options) {
    return std::make_shared<FieldModelB>(spec, profile, options);
}

FieldModelPtr build_field_c(const SymmetrySpec& spec, const FieldProfile& profile,
                            const FieldBuildOptions& options) {
    (void)options;
    return std::make_shared<FieldModelC>(spec, profile);
}

FieldModelPtr build_field(const SymmetrySpec& spec, const FieldProfile& profile,
                          const FieldBuildOptions& options) {
    switch (spec.kind()) {
        case SymmetryCase::A: return build_field_a(spec, profile, options);
        case SymmetryCase::B: return build_field_b(spec, profile, options);
        case SymmetryCase::C: return build_field_c(spec, profile, options);
    }
    throw ValidationError("corrupt symmetry case");
}

std::pair<double, double> electric_field_vector_form_a(const FieldModel& model, double x,
                                                       double y, double t) {
    const auto* a = dynamic_cast<const FieldModelA*>(&model);
    if (!a)
        throw ValidationError("electric_field_vector_form_a requires an unperturbed "
                              "case A field model");
    return a->vector_form(x, y, t);
}

std::pair<double, double> electric_field_vector_form_a(const SymmetrySpec& spec,
                                                       const FieldProfile& profile, double x,
                                                       double y, double t) {
    FieldModelA model(spec, profile, FieldBuildOptions{});
    return model.vector_form(x, y, t);
}

FieldComponent parse_field_component(const std::string& name) {
    if (name == "E1") return FieldComponent::E1;
    if (name == "E2") return FieldComponent::E2;
    if (name == "B") return FieldComponent::B;
    throw ValidationError("unknown field component '" + name + "' (expected E1, E2 or B)");
}

PerturbationShape parse_perturbation_shape(const std::string& name) {
    if (name == "const") return PerturbationShape::Constant;
    if (name == "x") return PerturbationShape::X;
    if (name == "y") return PerturbationShape::Y;
    if (name == "t") return PerturbationShape::T;
    throw ValidationError("unknown perturbation shape '" + name +
                          "' (expected const, x, y or t)");
}

FieldModelPtr perturb_field(FieldModelPtr base, FieldComponent component, double epsilon,
                            PerturbationShape shape) {
    return std::make_shared<PerturbedFieldModel>(std::move(base), component, epsilon, shape);
}

//------------------------------ potentials ------------------------------//

namespace {

struct GaugeTerms {
    Expr lambda, lx, ly, lt;
    bool present = false;
};

GaugeTerms prepare_gauge(const FieldProfile& profile) {
    GaugeTerms g;
    if (!profile.lambda) return g;
    check_gauge_vars(*profile.lambda);
    g.lambda = profile.lambda->simplified();
    g.lx = g.lambda.derivative("x").simplified();
    g.ly = g.lambda.derivative("y").simplified();
    g.lt = g.lambda.derivative("t").simplified();
    g.present = true;
    return g;
}

struct GaugeValue {
    double lx = 0, ly = 0, lt = 0;
};

GaugeValue gauge_at(const GaugeTerms& g, double x, double y, double t) {
    if (!g.present) return {};
    Bindings<double> env;
    env.set("x", x).set("y", y).set("t", t);
    return {g.lx.eval(env), g.ly.eval(env), g.lt.eval(env)};
}

class PotentialSetA final : public PotentialSet {
public:
    PotentialSetA(const SymmetrySpec& spec, const FieldProfile& profile,
                  const PotentialBuildOptions& options)
        : spec_(spec), gauge_(prepare_gauge(profile)) {
        if (!profile.Abar1 || !profile.Abar2)
            throw ValidationError(
                "case A potentials need the vector-potential profile Abar1, Abar2");
        check_profile_vars(*profile.Abar1, "Abar1");
        check_profile_vars(*profile.Abar2, "Abar2");
        const Expr& bbar = require_profile(profile.Bbar, "Bbar", "A");
        abar1_ = profile.Abar1->simplified();
        abar2_ = profile.Abar2->simplified();
        vbar_ = require_profile(profile.Vbar, "Vbar", "A").simplified();

        // Reject a vector-potential profile whose curl does not match Bbar.
        const Expr residual =
            (abar2_.derivative("xbar") - abar1_.derivative("ybar") - bbar).simplified();
        double worst = 0.0;
        for (int i = 0; i < options.check_n; ++i) {
            for (int j = 0; j < options.check_n; ++j) {
                Bindings<double> env;
                env.set("xbar", options.xbar_min + (options.xbar_max - options.xbar_min) * i /
                                                       (options.check_n - 1));
                env.set("ybar", options.ybar_min + (options.ybar_max - options.ybar_min) * j /
                                                       (options.check_n - 1));
                worst = std::max(worst, std::abs(residual.eval(env)));
            }
        }
        if (worst > options.check_tol)
            throw ValidationError("Abar does not reproduce Bbar: max curl residual " +
                                  std::to_string(worst));
        map_ = std::make_shared<CanonicalMap>(spec, options.quad_tol);
    }

    SymmetryCase kind() const override { return SymmetryCase::A; }
    const SymmetrySpec& spec() const override { return spec_; }

    PotentialValue value(double x, double y, double t) const override {
        const CanonicalMap::CaseATime ct = map_->case_a_time(t);
        const double rho = spec_.rho()(t), rho_d = spec_.rho().d(1, t),
                     rho_dd = spec_.rho().d(2, t);
        const double omega = spec_.omega()(t);
        const double al1 = spec_.alpha1()(t), al1_d = spec_.alpha1().d(1, t),
                     al1_dd = spec_.alpha1().d(2, t);
        const double al2 = spec_.alpha2()(t), al2_d = spec_.alpha2().d(1, t),
                     al2_dd = spec_.alpha2().d(2, t);
        const double rho2 = rho * rho, rho3 = rho2 * rho, rho4 = rho2 * rho2;

        const double c = std::cos(ct.angle), s = std::sin(ct.angle);
        const double u = (x - al1) / rho, v = (y - al2) / rho;
        const double xb = u * c + v * s + ct.delta1;
        const double yb = v * c - u * s + ct.delta2;
        Bindings<double> env;
        env.set("xbar", xb).set("ybar", yb);
        const double Ab1 = abar1_.eval(env), Ab2 = abar2_.eval(env);
        const double Vb = vbar_.eval(env);
        const GaugeValue g = gauge_at(gauge_, x, y, t);

        const double rot1 = Ab1 * c - Ab2 * s;  // R(T) Abar
        const double rot2 = Ab1 * s + Ab2 * c;

        const double w1 = rho * al1_d - rho_d * al1;  // rho alpha' - rho' alpha
        const double w2 = rho * al2_d - rho_d * al2;
        const double z1 = rho * al1_dd - rho_dd * al1;  // rho alpha'' - rho'' alpha
        const double z2 = rho * al2_dd - rho_dd * al2;

        const double eta1 = rho * rho_d * (x - al1) + rho2 * al1_d - omega * y;
        const double eta2 = rho * rho_d * (y - al2) + rho2 * al2_d + omega * x;
        const double q2 = x * x + y * y;

        PotentialValue out;
        out.a1 = y * omega / rho2 + rot1 / rho + g.lx;
        out.a2 = -x * omega / rho2 + rot2 / rho + g.ly;
        out.v = -(z1 * x + z2 * y) / rho - rho_dd / (2.0 * rho) * q2 -
                omega * (w2 * x - w1 * y) / rho3 - omega * omega * q2 / (2.0 * rho4) +
                Vb / rho2 + (eta1 * rot1 + eta2 * rot2) / rho3 - g.lt;
        out.f = 0.5 * (w1 * w1 + w2 * w2) + rho_d * (w1 * x + w2 * y) +
                rho * (z1 * x + z2 * y) + 0.5 * (rho_d * rho_d + rho * rho_dd) * q2 +
                omega * (w2 * x - w1 * y) / rho +
                (rho2 * g.lt + eta1 * g.lx + eta2 * g.ly);
        return out;
    }

private:
    SymmetrySpec spec_;
    Expr abar1_, abar2_, vbar_;
    GaugeTerms gauge_;
    std::shared_ptr<CanonicalMap> map_;
};

class PotentialSetB final : public PotentialSet {
public:
    PotentialSetB(const SymmetrySpec& spec, const FieldProfile& profile)
        : spec_(spec), gauge_(prepare_gauge(profile)) {
        psi_ = require_profile(profile.psi, "psi", "B").simplified();
        vbar_ = require_profile(profile.Vbar, "Vbar", "B").simplified();
        check_profile_vars(psi_, "psi");
        check_profile_vars(vbar_, "Vbar");
    }

    SymmetryCase kind() const override { return SymmetryCase::B; }
    const SymmetrySpec& spec() const override { return spec_; }

    PotentialValue value(double x, double y, double t) const override {
        const double b1 = spec_.beta1()(t), b1_d = spec_.beta1().d(1, t),
                     b1_dd = spec_.beta1().d(2, t);
        const double b2 = spec_.beta2()(t), b2_d = spec_.beta2().d(1, t),
                     b2_dd = spec_.beta2().d(2, t);
        const double dx = x - b1, dy = y - b2;
        const double r2 = dx * dx + dy * dy;
        if (r2 == 0.0)
            throw FieldDomainError("case B potentials undefined at zero radius");
        Bindings<double> env;
        env.set("xbar", std::sqrt(r2)).set("ybar", t);
        const double psi = psi_.eval(env);
        const double Vb = vbar_.eval(env);
        const GaugeValue g = gauge_at(gauge_, x, y, t);

        PotentialValue out;
        out.a1 = dy * psi / r2 + g.lx;
        out.a2 = -dx * psi / r2 + g.ly;
        out.v = -b1_dd * dx - b2_dd * dy + Vb + (b1_d * dy - b2_d * dx) * psi / r2 - g.lt;
        // tau = 0; eta = (-dy, dx)
        out.f = b2_d * dx - b1_d * dy + (-dy * g.lx + dx * g.ly);
        return out;
    }

private:
    SymmetrySpec spec_;
    Expr psi_, vbar_;
    GaugeTerms gauge_;
};

class PotentialSetC final : public PotentialSet {
public:
    PotentialSetC(const SymmetrySpec& spec, const FieldProfile& profile)
        : spec_(spec), gauge_(prepare_gauge(profile)) {
        psi_ = require_profile(profile.psi, "psi", "C").simplified();
        vbar_ = require_profile(profile.Vbar, "Vbar", "C").simplified();
        check_profile_vars(psi_, "psi");
        check_profile_vars(vbar_, "Vbar");
    }

    SymmetryCase kind() const override { return SymmetryCase::C; }
    const SymmetrySpec& spec() const override { return spec_; }

    PotentialValue value(double x, double y, double t) const override {
        const bool swapped = spec_.axis_swapped();
        const double p = swapped ? y : x;
        const double q = swapped ? x : y;
        const TimeFunction& u1f = swapped ? spec_.a2() : spec_.a1();
        const TimeFunction& u2f = swapped ? spec_.a1() : spec_.a2();
        const double u1 = u1f(t), u1_dd = u1f.d(2, t);
        const double u2 = u2f(t), u2_d = u2f.d(1, t), u2_dd = u2f.d(2, t);

        Bindings<double> env;
        env.set("xbar", p - u1 * q / u2).set("ybar", t);
        const double psi = psi_.eval(env);
        const double Vb = vbar_.eval(env);
        const GaugeValue g = gauge_at(gauge_, x, y, t);

        const double a1 = spec_.a1()(t), a2 = spec_.a2()(t);
        const double a1_d = spec_.a1().d(1, t), a2_d = spec_.a2().d(1, t);

        PotentialValue out;
        // primed frame carries A = (0, psi); mirroring swaps the components
        out.a1 = (swapped ? psi : 0.0) + g.lx;
        out.a2 = (swapped ? 0.0 : psi) + g.ly;
        out.v = -u1_dd / u2 * p * q + (u1 * u1_dd - u2 * u2_dd) / (2.0 * u2 * u2) * q * q +
                Vb + u2_d * q / u2 * psi - g.lt;
        out.f = a1_d * x + a2_d * y + (a1 * g.lx + a2 * g.ly);
        return out;
    }

private:
    SymmetrySpec spec_;
    Expr psi_, vbar_;
    GaugeTerms gauge_;
};

}  // namespace

PotentialSetPtr build_potentials(const SymmetrySpec& spec, const FieldProfile& profile,
                                 const PotentialBuildOptions& options) {
    switch (spec.kind()) {
        case SymmetryCase::A:
            return std::make_shared<PotentialSetA>(spec, profile, options);
        case SymmetryCase::B:
            return std::make_shared<PotentialSetB>(spec, profile);
        case SymmetryCase::C:
            return std::make_shared<PotentialSetC>(spec, profile);
    }
    throw ValidationError("corrupt symmetry case");
}

}  // namespace noether2d
