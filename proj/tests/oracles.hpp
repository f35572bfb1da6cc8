#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include "irs/channel.hpp"
#include "irs/ci_geometry.hpp"
#include "irs/rng.hpp"
#include "irs/types.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using namespace irs;

// max_i max(Re(b_i^H theta) + w_i, Re(c_i^H theta) + z_i), written out element by element.
inline double max_objective(const ci::CoefficientBundle& b, const VectorXcd& theta)
{
    double top = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < b.pairs(); ++i) {
        cdouble f = 0.0, g = 0.0;
        for (Index n = 0; n < b.dim(); ++n) {
            f += b.b_rows(i, n) * theta(n);
            g += b.c_rows(i, n) * theta(n);
        }
        top = std::max({top, f.real() + b.offsets_w(i), g.real() + b.offsets_z(i)});
    }
    return top;
}

inline double lse(const ci::CoefficientBundle& b, const VectorXcd& theta, double eps)
{
    VectorXd f = (b.b_rows * theta).real() + b.offsets_w;
    VectorXd g = (b.c_rows * theta).real() + b.offsets_z;
    const double top = std::max(f.maxCoeff(), g.maxCoeff());
    double s = 0.0;
    for (Index i = 0; i < f.size(); ++i) s += std::exp((f(i) - top) / eps) + std::exp((g(i) - top) / eps);
    return top + eps * std::log(s);
}

// Grid phase e^{j (slot + 1) 2 pi / 2^B}.
inline cdouble grid_point(int slot, int bits)
{
    return std::polar(1.0, (slot + 1) * 2.0 * pi / static_cast<double>(1 << bits));
}

struct GridOptimum {
    double value = std::numeric_limits<double>::infinity();
    std::vector<int> slots;
};

// Every one of the 2^{B N} grid assignments.
inline GridOptimum exhaustive_grid(const ci::CoefficientBundle& b, int bits)
{
    const int N = static_cast<int>(b.dim()), Q = 1 << bits;
    GridOptimum best;
    std::vector<int> slots(N, 0);
    VectorXcd theta(N);
    for (;;) {
        for (int n = 0; n < N; ++n) theta(n) = grid_point(slots[n], bits);
        const double v = oracle::max_objective(b, theta);
        if (v < best.value) {
            best.value = v;
            best.slots = slots;
        }
        int n = 0;
        while (n < N && ++slots[n] == Q) slots[n++] = 0;
        if (n == N) break;
    }
    return best;
}

struct GridSearch2 {
    double value = std::numeric_limits<double>::infinity();
    double phase0 = 0.0, phase1 = 0.0;
};

// Dense search over two phases, points x points, of fn(theta).
template <typename Fn>
GridSearch2 grid_search_2d(int points, Fn&& fn)
{
    GridSearch2 best;
    VectorXcd theta(2);
    for (int a = 0; a < points; ++a)
        for (int c = 0; c < points; ++c) {
            const double p0 = 2.0 * pi * a / points, p1 = 2.0 * pi * c / points;
            theta << std::polar(1.0, p0), std::polar(1.0, p1);
            const double v = fn(theta);
            if (v < best.value) best = {v, p0, p1};
        }
    return best;
}

// min |u|^2 s.t. A u >= r by trying every working set: the optimum is the unique
// feasible equality-constrained solution with non-negative multipliers.
inline std::optional<VectorXd> min_norm_by_active_sets(const MatrixXd& A, const VectorXd& r, double tol = 1e-9)
{
    const int rows = static_cast<int>(A.rows());
    std::optional<VectorXd> best;
    double best_norm = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << rows); ++mask) {
        std::vector<int> set;
        for (int i = 0; i < rows; ++i)
            if (mask & (1u << i)) set.push_back(i);
        if (static_cast<Index>(set.size()) > A.cols()) continue;
        VectorXd u = VectorXd::Zero(A.cols());
        if (!set.empty()) {
            MatrixXd As(set.size(), A.cols());
            VectorXd rs(set.size());
            for (std::size_t i = 0; i < set.size(); ++i) {
                As.row(i) = A.row(set[i]);
                rs(i) = r(set[i]);
            }
            const MatrixXd gram = As * As.transpose();
            Eigen::FullPivLU<MatrixXd> lu(gram);
            if (lu.rank() < static_cast<Index>(set.size())) continue;
            const VectorXd mu = lu.solve(rs);
            if (mu.minCoeff() < -tol) continue;
            u = As.transpose() * mu;
        }
        const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
        if (((A * u - r).array() < -tol * scale).any()) continue;
        if (u.squaredNorm() < best_norm) {
            best_norm = u.squaredNorm();
            best = u;
        }
    }
    return best;
}

// Tail of the standard normal.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Gray-free QPSK over AWGN at Es/N0 = snr: independent quadrature decisions.
inline double qpsk_ser(double snr)
{
    const double q = q_function(std::sqrt(snr));
    return 2.0 * q - q * q;
}

// Central differences of a real function of a complex vector, returned as the complex
// Euclidean gradient d/dRe + j d/dIm.
template <typename Fn>
VectorXcd numeric_gradient(Fn&& fn, const VectorXcd& x, double h = 1e-6)
{
    VectorXcd g(x.size());
    for (Index n = 0; n < x.size(); ++n) {
        VectorXcd xp = x, xm = x;
        xp(n) += h;
        xm(n) -= h;
        const double dr = (fn(xp) - fn(xm)) / (2.0 * h);
        xp = x;
        xm = x;
        xp(n) += cdouble(0.0, h);
        xm(n) -= cdouble(0.0, h);
        const double di = (fn(xp) - fn(xm)) / (2.0 * h);
        g(n) = {dr, di};
    }
    return g;
}

inline VectorXcd random_complex(Index n, CounterRng& rng)
{
    VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
    return v;
}

inline MatrixXcd random_complex(Index rows, Index cols, CounterRng& rng)
{
    MatrixXcd v(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) v(i, j) = rng.complex_normal();
    return v;
}

inline CirclePoint random_circle(Index n, CounterRng& rng)
{
    VectorXd p(n);
    for (Index i = 0; i < n; ++i) p(i) = 2.0 * pi * rng.uniform();
    return CirclePoint::from_phases(p);
}

// Standalone bundle for random K x N channel rows and symbol vector m of QPSK.
inline ci::CoefficientBundle random_standalone(Index K, Index N, CounterRng& rng, double alpha = 1.0)
{
    const MatrixXcd rows = random_complex(K, N, rng);
    const ci::SymbolBook book = ci::enumerate_symbol_vectors(4, static_cast<int>(K));
    const Index m = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(book.size())));
    return ci::build_coefficients_standalone(rows, book.vector(m), VectorXd::Constant(K, alpha), book.half_angle(),
                                             static_cast<int>(m));
}

// Joint-system channels with unit-variance entries; the direct paths are weakened
// so that reflection matters.
inline channel::ChannelSet random_joint_channels(Index K, Index N, Index M, CounterRng& rng, double direct = 0.3)
{
    channel::ChannelSet ch;
    ch.direct = direct * random_complex(K, M, rng);
    ch.irs_user = random_complex(K, N, rng);
    ch.bs_irs = random_complex(N, M, rng);
    ch.generator_irs = VectorXcd::Ones(N);
    ch.sir_direct = direct * random_complex(M, rng);
    ch.sir_irs = random_complex(N, rng);
    return ch;
}

// Unweighted CI margin of user k at power `power` in the standalone system.
inline double passive_margin(const MatrixXcd& rows, const ci::SymbolBook& book, const CirclePoint& theta, Index m,
                             Index k, double power)
{
    const cdouble r = std::sqrt(power) * (rows.row(k) * theta.values())(0);
    return ci::ci_distance(ci::rotate(r, book.symbols(m, k)), book.half_angle());
}

struct JointMargins {
    double worst_user = std::numeric_limits<double>::infinity(); // min over m, k, states of margin / alpha_k
    double worst_sir = std::numeric_limits<double>::infinity();  // min over m of the signed SIR margin / beta
};

// Margins of a joint design recomputed from the per-receiver compound channels.
inline JointMargins joint_margins(const channel::ChannelSet& ch, const ci::SymbolBook& book,
                                  const std::vector<VectorXcd>& x, const CirclePoint& theta0,
                                  const CirclePoint& theta1, bool with_sir, const VectorXd& alpha, double beta)
{
    JointMargins out;
    std::vector<const CirclePoint*> states{&theta0};
    if (with_sir) states.push_back(&theta1);
    for (Index m = 0; m < book.size(); ++m) {
        for (const CirclePoint* th : states)
            for (Index k = 0; k < book.users(); ++k) {
                const VectorXcd h = channel::compound_channel_joint(ch.direct.row(k).transpose(),
                                                                    ch.irs_user.row(k).transpose(), ch.bs_irs,
                                                                    th->values());
                const cdouble r = (h.adjoint() * x[m])(0);
                out.worst_user = std::min(out.worst_user,
                                          ci::ci_distance(ci::rotate(r, book.symbols(m, k)), book.half_angle()) / alpha(k));
            }
        if (with_sir) {
            const cdouble y0 =
                (channel::compound_channel_joint(ch.sir_direct, ch.sir_irs, ch.bs_irs, theta0.values()).adjoint() * x[m])(0);
            const cdouble y1 =
                (channel::compound_channel_joint(ch.sir_direct, ch.sir_irs, ch.bs_irs, theta1.values()).adjoint() * x[m])(0);
            out.worst_sir = std::min({out.worst_sir, -y0.real() / beta, y1.real() / beta});
        }
    }
    return out;
}

// Constraint rows on u = [Re x; Im x], written out from the margin definitions:
// two half-planes per user and state, then -Re(y_s0) >= beta and Re(y_s1) >= beta.
inline void precoder_constraints(const std::vector<RowVectorXcd>& users_state0,
                                 const std::vector<RowVectorXcd>& users_state1, const RowVectorXcd* sir0,
                                 const RowVectorXcd* sir1, const VectorXcd& s, const VectorXd& alpha, double beta,
                                 double psi, MatrixXd& A, VectorXd& r)
{
    const Index M = users_state0.front().size();
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    auto re_row = [M](const RowVectorXcd& q) {
        Eigen::RowVectorXd v(2 * M);
        v << q.real(), -q.imag();
        return v;
    };
    auto im_row = [M](const RowVectorXcd& q) {
        Eigen::RowVectorXd v(2 * M);
        v << q.imag(), q.real();
        return v;
    };
    for (const auto* state : {&users_state0, &users_state1})
        for (std::size_t k = 0; k < state->size(); ++k) {
            const RowVectorXcd q = (*state)[k] * (std::conj(s(static_cast<Index>(k))) / std::abs(s(static_cast<Index>(k))));
            rows.push_back(std::sin(psi) * re_row(q) - std::cos(psi) * im_row(q));
            rows.push_back(std::sin(psi) * re_row(q) + std::cos(psi) * im_row(q));
            rhs.push_back(alpha(static_cast<Index>(k)));
            rhs.push_back(alpha(static_cast<Index>(k)));
        }
    if (sir0 && sir1) {
        rows.push_back(-re_row(*sir0));
        rows.push_back(re_row(*sir1));
        rhs.push_back(beta);
        rhs.push_back(beta);
    }
    A.resize(static_cast<Index>(rows.size()), 2 * M);
    r.resize(A.rows());
    for (Index i = 0; i < A.rows(); ++i) {
        A.row(i) = rows[static_cast<std::size_t>(i)];
        r(i) = rhs[static_cast<std::size_t>(i)];
    }
}

} // namespace oracle
