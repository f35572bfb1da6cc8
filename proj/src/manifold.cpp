#include "irs/manifold.hpp"

#include <limits>
#include <ostream>

namespace irs::manifold {

LseValue lse_objective(const VectorXcd& theta, const ci::CoefficientBundle& bundle, double eps)
{
    if (!(eps > 0.0)) throw std::invalid_argument("lse_objective: eps must be positive");
    VectorXd f, g;
    ci::evaluate(bundle, theta, f, g);
    const double top = std::max(f.maxCoeff(), g.maxCoeff());
    const VectorXd wf = ((f.array() - top) / eps).exp();
    const VectorXd wg = ((g.array() - top) / eps).exp();
    const double total = wf.sum() + wg.sum();

    LseValue out;
    out.value = top + eps * std::log(total);
    out.gradient = (bundle.b_rows.adjoint() * wf.cast<cdouble>() + bundle.c_rows.adjoint() * wg.cast<cdouble>()) / total;
    return out;
}

void RcgOptions::validate() const
{
    if (smoothing_eps && !(*smoothing_eps > 0.0)) throw std::invalid_argument("RcgOptions: smoothing_eps must be > 0");
    if (!(relative_smoothing > 0.0)) throw std::invalid_argument("RcgOptions: relative_smoothing must be > 0");
    if (max_iters < 0) throw std::invalid_argument("RcgOptions: max_iters must be >= 0");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("RcgOptions: grad_tol must be > 0");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw std::invalid_argument("RcgOptions: armijo_shrink in (0,1)");
    if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw std::invalid_argument("RcgOptions: armijo_slope in (0,1)");
    if (!(initial_step > 0.0)) throw std::invalid_argument("RcgOptions: initial_step must be > 0");
}

double RcgOptions::resolve_smoothing(const ci::CoefficientBundle& bundle) const
{
    if (smoothing_eps) return *smoothing_eps;
    const double scale = bundle.row_scale();
    return scale > 0.0 ? relative_smoothing * scale : relative_smoothing;
}

RcgResult rcg_minimize(const ci::CoefficientBundle& bundle, const CirclePoint& start, const RcgOptions& opts)
{
    opts.validate();
    if (start.size() != bundle.dim()) throw std::invalid_argument("rcg_minimize: start has wrong length");

    constexpr int max_backtracks = 60;
    const double eps = opts.resolve_smoothing(bundle);
    const double scale = bundle.row_scale();
    const double tol = opts.grad_tol * (scale > 0.0 ? scale : 1.0);

    VectorXcd theta = start.values();
    LseValue cur = lse_objective(theta, bundle, eps);
    VectorXcd grad = project_tangent(theta, cur.gradient);
    double grad_norm = grad.norm();
    VectorXcd dir = -grad;
    double last_angle = 0.0;

    RcgResult out;
    out.smoothing = eps;
    if (opts.record_trace) out.trace.push_back({0, cur.value, grad_norm, 0.0});

    for (int it = 0; it < opts.max_iters; ++it) {
        if (grad_norm <= tol) break;

        double slope = inner(grad, dir);
        if (!(slope < 0.0)) {
            dir = -grad;
            slope = -grad_norm * grad_norm;
        }
        const double dir_max = dir.cwiseAbs().maxCoeff();
        const double angle = last_angle > 0.0 ? std::min(2.0 * last_angle, pi / 2.0) : opts.initial_step;
        double step = angle / dir_max;

        bool accepted = false;
        VectorXcd trial;
        LseValue next;
        for (int bt = 0; bt < max_backtracks; ++bt) {
            trial = retract(theta, step * dir);
            next = lse_objective(trial, bundle, eps);
            if (next.value <= cur.value + opts.armijo_slope * step * slope && next.value < cur.value) {
                accepted = true;
                break;
            }
            step *= opts.armijo_shrink;
        }
        if (!accepted) break;

        const VectorXcd grad_next = project_tangent(trial, next.gradient);
        const VectorXcd dir_t = project_tangent(trial, dir);
        const VectorXcd grad_t = project_tangent(trial, grad);
        const double eta = std::max(0.0, inner(grad_next, grad_next - grad_t) / (grad_norm * grad_norm));

        dir = -grad_next + eta * dir_t;
        theta = std::move(trial);
        cur = std::move(next);
        grad = grad_next;
        grad_norm = grad.norm();
        last_angle = step * dir_max;
        ++out.iterations;
        if (opts.record_trace) out.trace.push_back({out.iterations, cur.value, grad_norm, step});
    }

    out.theta = CirclePoint(std::move(theta));
    out.value = cur.value;
    out.grad_norm = grad_norm;
    out.converged = grad_norm <= tol;
    return out;
}

MinimaxResult minimize_max(const ci::CoefficientBundle& bundle, const CirclePoint& start, const MinimaxOptions& opts)
{
    if (opts.stages < 1) throw std::invalid_argument("minimize_max: stages must be >= 1");
    if (!(opts.shrink > 0.0 && opts.shrink <= 1.0)) throw std::invalid_argument("minimize_max: shrink in (0, 1]");

    MinimaxResult out;
    out.theta = start;
    out.value = ci::max_objective(bundle, start.values());

    RcgOptions stage = opts.rcg;
    stage.record_trace = false;
    double eps = opts.rcg.resolve_smoothing(bundle);
    CirclePoint from = start;
    for (int s = 0; s < opts.stages; ++s) {
        stage.smoothing_eps = eps;
        RcgResult r = rcg_minimize(bundle, from, stage);
        out.iterations += r.iterations;
        out.converged = r.converged;
        const double value = ci::max_objective(bundle, r.theta.values());
        if (value < out.value) {
            out.value = value;
            out.theta = r.theta;
        }
        from = std::move(r.theta);
        eps *= opts.shrink;
    }
    return out;
}

void write_trace_csv(std::ostream& out, const std::vector<RcgTraceRow>& trace)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "iteration,value,grad_norm,step\n";
    for (const auto& r : trace) out << r.iteration << ',' << r.value << ',' << r.grad_norm << ',' << r.step << '\n';
    out.precision(old);
}

} // namespace irs::manifold
