#pragma once

#include "irs/types.hpp"

namespace irs::qp {

/// Infeasibility pinned to the constraint row that could not be met.
class InfeasibleRow : public InfeasibleError {
public:
    InfeasibleRow(Index row, const std::string& message) : InfeasibleError(message), row_(row) {}
    Index row() const { return row_; }

private:
    Index row_;
};

struct QpOptions {
    /// Cap on active-set changes.
    int max_iters = 10000;
    /// Constraint violation accepted at termination, in normalized units.
    double feas_tol = 1e-12;
    void validate() const;
};

struct QpResult {
    VectorXd u;
    VectorXd lambda;           // multipliers of A u >= r
    double kkt_residual = 0.0; // in units where rows are normalized and max r_i = 1
    int iterations = 0;        // active-set changes
};

/// min ||u||^2 subject to A u >= r.
///
/// Goldfarb-Idnani dual active-set method: starting from the unconstrained optimum
/// u = 0, the most violated constraint is added at each step and constraints whose
/// multipliers would turn negative are dropped on the way. Rows are normalized
/// first. A violated constraint that can be neither reached nor traded for an
/// active one proves the system infeasible and raises InfeasibleRow.
QpResult solve_min_norm(const MatrixXd& A, const VectorXd& r, const QpOptions& opts = {});

/// KKT residual of (u, lambda) for the normalized system.
double kkt_residual(const MatrixXd& A, const VectorXd& r, const VectorXd& u, const VectorXd& lambda);

} // namespace irs::qp
