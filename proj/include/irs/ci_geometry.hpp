#pragma once

#include "irs/channel.hpp"
#include "irs/types.hpp"

#include <vector>

namespace irs::ci {

/// Omega-PSK with points at e^{j(2i+1)pi/Omega} (BPSK: +1, -1).
///
/// For Omega >= 4 every decision boundary is a multiple of 2pi/Omega, which
/// puts the QPSK boundaries on the coordinate axes.
struct PskConstellation {
    int order = 4;
    double half_angle = pi / 4.0;
    double phase_offset = pi / 4.0;
    VectorXcd points;

    explicit PskConstellation(int order);

    cdouble point(int i) const { return points(i); }
};

/// All Omega^K symbol vectors. Row m holds s_m; user 0 is the most significant digit.
struct SymbolBook {
    static constexpr Index max_vectors = Index(1) << 20;

    PskConstellation constellation;
    Eigen::MatrixXi indices; // Omega^K x K
    MatrixXcd symbols;       // Omega^K x K

    Index size() const { return symbols.rows(); }
    Index users() const { return symbols.cols(); }
    double half_angle() const { return constellation.half_angle; }
    VectorXcd vector(Index m) const { return symbols.row(m).transpose(); }
};

SymbolBook enumerate_symbol_vectors(int order, int users);

/// Signed distance of a rotated noise-free sample to the nearest decision boundary.
template <typename Real>
Real ci_distance(std::complex<Real> rotated, Real half_angle)
{
    return rotated.real() * std::sin(half_angle) - std::abs(rotated.imag()) * std::cos(half_angle);
}

/// r e^{-j angle(s)}.
template <typename Real>
std::complex<Real> rotate(std::complex<Real> r, std::complex<Real> s)
{
    return r * std::conj(s) / std::abs(s);
}

/// What a row represents: user k (k == users() means SIR) of symbol vector m
/// under reflection state `state` (-1 when there is a single reflection).
struct RowTag {
    int m = 0;
    int k = 0;
    int state = -1;
};

/// Linearized max-min subproblem: f_i = Re(b_i^H theta) + w_i, g_i = Re(c_i^H theta) + z_i.
/// Row i of b_rows stores b_i^H, so f = Re(b_rows * theta) + w.
struct CoefficientBundle {
    MatrixXcd b_rows;
    MatrixXcd c_rows;
    VectorXd offsets_w;
    VectorXd offsets_z;
    std::vector<RowTag> tags;

    Index pairs() const { return b_rows.rows(); }
    Index dim() const { return b_rows.cols(); }
    /// Largest row norm over all b and c rows; the natural scale of the objective.
    double row_scale() const;
};

/// max_i max(f_i, g_i) at theta; -1 times the weighted CI margin of the subproblem.
double max_objective(const CoefficientBundle& bundle, const VectorXcd& theta);

/// Row values f and g at theta.
void evaluate(const CoefficientBundle& bundle, const VectorXcd& theta, VectorXd& f, VectorXd& g);

/// Subproblem m of the standalone design. `rows` holds h_k^H per user (K x N).
CoefficientBundle build_coefficients_standalone(const MatrixXcd& rows, const VectorXcd& symbols,
                                                const VectorXd& alpha, double half_angle, int m = 0);

/// Stacked reflection subproblem of the joint system.
///
/// With the SIR, theta = [theta_0; theta_1] (length 2N) and the pair layout is:
/// i = 2j (state 0) and 2j + 1 (state 1) for j = K m + k, followed by
/// i = 2 K Omega^K + m for the SIR, whose f row carries state 0 and g row state 1.
/// Without the SIR a single N-length reflection is used and pair i = j.
CoefficientBundle build_coefficients_joint(const std::vector<VectorXcd>& precoders,
                                           const channel::ChannelSet& channels, const SymbolBook& book,
                                           const VectorXd& alpha, double beta, bool with_sir);

} // namespace irs::ci
