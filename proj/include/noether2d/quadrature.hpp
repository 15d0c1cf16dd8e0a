#pragma once

#include <functional>
#include <map>

#include "noether2d/errors.hpp"

namespace noether2d {

inline constexpr double kDefaultQuadTol = 1e-10;
inline constexpr int kMaxQuadDepth = 60;

// Adaptive definite integral of f over [a, b] (signed when b < a) by
// recursive bisection of an embedded Gauss(7)/Kronrod(15) pair.  The
// estimated error is kept below tol * max(1, |result|).  Exceeding the
// subdivision depth limit throws QuadratureError: a near-singular integrand
// (for instance 1/rho^2 with rho crossing zero) must surface loudly rather
// than return a silent value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = kDefaultQuadTol);

// Evaluator of F(t) = integral of f from t_ref to t, anchored at
// F(t_ref) = 0, with checkpoint caching: each answered query becomes a
// checkpoint, and later queries integrate only from the nearest checkpoint.
// Monotone re-evaluation along a trajectory therefore costs O(step), not
// O(t - t_ref).  The cache is mutable; concurrent queries must be serialized
// externally or use per-thread instances.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::function<double(double)> f, double t_ref,
                       double tol = kDefaultQuadTol);

    double value(double t) const;
    double t_ref() const { return t_ref_; }
    double tol() const { return tol_; }
    std::size_t checkpoint_count() const { return checkpoints_.size(); }

private:
    std::function<double(double)> f_;
    double t_ref_;
    double tol_;
    mutable std::map<double, double> checkpoints_;
};

}  // namespace noether2d
