#include "noether2d/quadrature.hpp"

#include <cmath>
#include <cstdlib>

namespace noether2d {
namespace {

// Gauss(7)/Kronrod(15) nodes and weights on [-1, 1].  Even-index Kronrod
// nodes coincide with the embedded 7-point Gauss rule.
constexpr double kNodes[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWeights[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kGaussWeights[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(mid);
    double kronrod = kWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double sum = f(mid - dx) + f(mid + dx);
        kronrod += kWeights[i] * sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double local_tol,
             int depth) {
    const PanelResult r = gauss_kronrod(f, a, b);
    // Force one refinement level so a deceptively smooth top-level estimate
    // cannot be accepted untested.
    if (r.err <= local_tol && depth >= 1) return r.kronrod;
    if (depth >= kMaxQuadDepth)
        throw QuadratureError("quadrature did not converge after max subdivisions "
                              "(near-singular integrand?)",
                              a, b);
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * local_tol, depth + 1) +
           adapt(f, mid, b, 0.5 * local_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    if (tol <= 0) throw ValidationError("integrate: tol must be positive");
    if (b < a) return -integrate(f, b, a, tol);

    const PanelResult first = gauss_kronrod(f, a, b);
    const double budget = tol * std::max(1.0, std::abs(first.kronrod));
    return adapt(f, a, b, budget, 0);
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double t_ref,
                                       double tol)
    : f_(std::move(f)), t_ref_(t_ref), tol_(tol) {
    checkpoints_.emplace(t_ref, 0.0);
}

double CumulativeIntegral::value(double t) const {
    auto hi = checkpoints_.lower_bound(t);
    if (hi != checkpoints_.end() && hi->first == t) return hi->second;

    // Nearest checkpoint on either side.
    auto nearest = hi;
    if (hi == checkpoints_.end()) {
        nearest = std::prev(hi);
    } else if (hi != checkpoints_.begin()) {
        auto lo = std::prev(hi);
        nearest = (t - lo->first <= hi->first - t) ? lo : hi;
    }

    const double v = nearest->second + integrate(f_, nearest->first, t, tol_);
    checkpoints_.emplace_hint(hi, t, v);
    return v;
}

}  // namespace noether2d
