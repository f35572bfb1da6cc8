#pragma once

#include "irs/ci_geometry.hpp"
#include "irs/types.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace irs::manifold {

/// Tangent projection on the complex circle: g - Re{g .* conj(theta)} .* theta.
template <typename DerivedT, typename DerivedG>
VectorXcd project_tangent(const Eigen::MatrixBase<DerivedT>& theta, const Eigen::MatrixBase<DerivedG>& g)
{
    if (theta.size() != g.size()) throw std::invalid_argument("project_tangent: length mismatch");
    const VectorXd radial = (g.array() * theta.array().conjugate()).real();
    return (g.array() - radial.array().template cast<cdouble>() * theta.array()).matrix();
}

/// Elementwise normalization of theta + step back onto the circle.
template <typename DerivedT, typename DerivedS>
VectorXcd retract(const Eigen::MatrixBase<DerivedT>& theta, const Eigen::MatrixBase<DerivedS>& step)
{
    if (theta.size() != step.size()) throw std::invalid_argument("retract: length mismatch");
    VectorXcd out = theta + step;
    for (Index n = 0; n < out.size(); ++n) {
        const double mag = std::abs(out(n));
        if (!(mag > 0.0)) throw std::domain_error("retract: step lands on the origin");
        out(n) /= mag;
    }
    return out;
}

inline CirclePoint retract(const CirclePoint& theta, const VectorXcd& step)
{
    return CirclePoint(retract(theta.values(), step));
}

/// Real inner product Re{x^H y} used on the tangent space.
inline double inner(const VectorXcd& x, const VectorXcd& y) { return x.dot(y).real(); }

struct LseValue {
    double value = 0.0;
    VectorXcd gradient; // Euclidean gradient w.r.t. Re{<., d theta>}
};

/// eps * log sum_i [exp(f_i/eps) + exp(g_i/eps)] and its gradient, evaluated
/// with the running maximum subtracted before exponentiation.
LseValue lse_objective(const VectorXcd& theta, const ci::CoefficientBundle& bundle, double eps);

struct RcgOptions {
    /// Absolute smoothing parameter; when unset, relative_smoothing * row_scale() is used.
    std::optional<double> smoothing_eps;
    double relative_smoothing = 0.05;
    int max_iters = 1000;
    /// Riemannian gradient tolerance, relative to the bundle row scale.
    double grad_tol = 1e-6;
    double armijo_shrink = 0.5;
    double armijo_slope = 1e-4;
    /// First trial step, as a fraction of one radian per element along the direction.
    double initial_step = 0.5;
    bool record_trace = false;

    void validate() const;
    double resolve_smoothing(const ci::CoefficientBundle& bundle) const;
};

struct RcgTraceRow {
    int iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

struct RcgResult {
    CirclePoint theta;
    double value = 0.0;     // smoothed objective at theta
    double grad_norm = 0.0; // Riemannian gradient norm at theta
    double smoothing = 0.0;
    int iterations = 0;     // accepted steps
    bool converged = false;
    std::vector<RcgTraceRow> trace;
};

/// Riemannian conjugate gradient with Polak-Ribiere (clamped at zero) directions,
/// projection-based vector transport and Armijo backtracking.
RcgResult rcg_minimize(const ci::CoefficientBundle& bundle, const CirclePoint& start, const RcgOptions& opts = {});

void write_trace_csv(std::ostream& out, const std::vector<RcgTraceRow>& trace);

struct MinimaxOptions {
    RcgOptions rcg;
    /// Number of RCG passes; pass s uses smoothing eps * shrink^s, warm-started from pass s-1.
    int stages = 3;
    double shrink = 0.1;
};

struct MinimaxResult {
    CirclePoint theta;
    double value = 0.0; // true max_i max(f_i, g_i) at theta
    int iterations = 0;
    bool converged = false;
};

/// Minimizes the unsmoothed max objective by smoothing continuation. The start is
/// itself a candidate, so the returned value never exceeds the starting value.
MinimaxResult minimize_max(const ci::CoefficientBundle& bundle, const CirclePoint& start,
                           const MinimaxOptions& opts = {});

} // namespace irs::manifold
