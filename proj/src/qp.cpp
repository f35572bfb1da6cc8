#include "irs/qp.hpp"

#include <Eigen/QR>

#include <limits>

namespace irs::qp {

void QpOptions::validate() const
{
    if (max_iters < 1) throw std::invalid_argument("QpOptions: max_iters must be >= 1");
    if (!(feas_tol > 0.0)) throw std::invalid_argument("QpOptions: feas_tol must be > 0");
}

double kkt_residual(const MatrixXd& A, const VectorXd& r, const VectorXd& u, const VectorXd& lambda)
{
    if (A.rows() == 0) return u.norm();
    const VectorXd slack = A * u - r;
    const double primal = std::max(0.0, -slack.minCoeff());
    const double dual = std::max(0.0, -lambda.minCoeff());
    const double comp = lambda.cwiseProduct(slack).cwiseAbs().maxCoeff();
    const double stationarity = (u - A.transpose() * lambda).cwiseAbs().maxCoeff();
    return std::max({primal, dual, comp, stationarity});
}

QpResult solve_min_norm(const MatrixXd& A, const VectorXd& r, const QpOptions& opts)
{
    opts.validate();
    if (A.rows() != r.size()) throw std::invalid_argument("solve_min_norm: A and r disagree in length");
    if (!A.allFinite() || !r.allFinite()) throw std::invalid_argument("solve_min_norm: non-finite input");
    const Index rows = A.rows(), cols = A.cols();

    VectorXd row_norm = A.rowwise().norm();
    for (Index i = 0; i < rows; ++i)
        if (row_norm(i) == 0.0) {
            if (r(i) > 0.0)
                throw InfeasibleRow(i, "solve_min_norm: row " + std::to_string(i) + " is zero but demands a positive margin");
            row_norm(i) = 1.0;
        }
    const MatrixXd An = row_norm.cwiseInverse().asDiagonal() * A;
    VectorXd rn = r.cwiseQuotient(row_norm);

    QpResult out;
    out.u = VectorXd::Zero(cols);
    out.lambda = VectorXd::Zero(rows);
    const double scale = rows > 0 ? rn.maxCoeff() : 0.0;
    if (!(scale > 0.0)) return out;
    rn /= scale;

    constexpr double tiny = 1e-12;
    std::vector<Index> active;
    VectorXd mu; // multipliers of the active set, in order
    VectorXd u = VectorXd::Zero(cols);

    auto factor = [&](VectorXd& z, VectorXd& dual_dir, const VectorXd& np) {
        if (active.empty()) {
            z = np;
            dual_dir.resize(0);
            return;
        }
        MatrixXd N(cols, static_cast<Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) N.col(static_cast<Index>(i)) = An.row(active[i]).transpose();
        const Eigen::HouseholderQR<MatrixXd> qr(N);
        const Index q = N.cols();
        const MatrixXd Q1 = qr.householderQ() * MatrixXd::Identity(cols, q);
        const MatrixXd R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
        const VectorXd d = Q1.transpose() * np;
        z = np - Q1 * d;
        dual_dir = R.triangularView<Eigen::Upper>().solve(d);
    };

    for (;;) {
        Index p;
        if ((An * u - rn).minCoeff(&p) >= -opts.feas_tol) break;
        const VectorXd np = An.row(p).transpose();
        double mu_p = 0.0;
        for (;;) {
            if (++out.iterations > opts.max_iters)
                throw std::runtime_error("solve_min_norm: no KKT point within " + std::to_string(opts.max_iters) +
                                         " active-set changes");
            VectorXd z, dir;
            factor(z, dir, np);

            double t1 = std::numeric_limits<double>::infinity();
            Index drop = -1;
            for (Index i = 0; i < dir.size(); ++i)
                if (dir(i) > tiny && mu(i) / dir(i) < t1) {
                    t1 = mu(i) / dir(i);
                    drop = i;
                }
            const double zz = z.squaredNorm();
            const double sp = np.dot(u) - rn(p);
            const double t2 = zz > tiny * tiny ? -sp / zz : std::numeric_limits<double>::infinity();

            if (drop < 0 && !std::isfinite(t2))
                throw InfeasibleRow(p, "solve_min_norm: row " + std::to_string(p) + " conflicts with the active constraints");
            const double t = std::min(t1, t2);
            if (std::isfinite(t2)) u += t * z;
            if (dir.size() > 0) mu -= t * dir;
            mu_p += t;
            if (t2 <= t1) {
                active.push_back(p);
                mu.conservativeResize(mu.size() + 1);
                mu(mu.size() - 1) = mu_p;
                break;
            }
            active.erase(active.begin() + drop);
            const Index q = mu.size();
            mu.segment(drop, q - drop - 1) = mu.tail(q - drop - 1).eval();
            mu.conservativeResize(q - 1);
        }
    }

    VectorXd lambda = VectorXd::Zero(rows);
    for (std::size_t i = 0; i < active.size(); ++i) lambda(active[i]) = std::max(0.0, mu(static_cast<Index>(i)));
    out.kkt_residual = kkt_residual(An, rn, u, lambda);
    out.u = u * scale;
    out.lambda = (lambda * scale).cwiseQuotient(row_norm);
    return out;
}

} // namespace irs::qp
