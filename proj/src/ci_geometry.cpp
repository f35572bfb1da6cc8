#include "irs/ci_geometry.hpp"

namespace irs::ci {

PskConstellation::PskConstellation(int order_) : order(order_)
{
    if (order < 2 || (order & (order - 1)) != 0)
        throw std::invalid_argument("PskConstellation: order must be a power of two >= 2");
    half_angle = pi / order;
    phase_offset = order == 2 ? 0.0 : pi / order;
    points.resize(order);
    for (int i = 0; i < order; ++i) points(i) = std::polar(1.0, phase_offset + 2.0 * pi * i / order);
    if (order == 2) points << 1.0, -1.0;
    if (order == 4) {
        const double h = std::numbers::sqrt2 / 2.0;
        points << cdouble(h, h), cdouble(-h, h), cdouble(-h, -h), cdouble(h, -h);
    }
}

SymbolBook enumerate_symbol_vectors(int order, int users)
{
    if (users < 1) throw std::invalid_argument("enumerate_symbol_vectors: need at least one user");
    PskConstellation constellation(order);
    Index count = 1;
    for (int k = 0; k < users; ++k) {
        count *= order;
        if (count > SymbolBook::max_vectors)
            throw CapacityError("enumerate_symbol_vectors: Omega^K exceeds " +
                                std::to_string(SymbolBook::max_vectors) + " symbol vectors");
    }
    SymbolBook book{constellation, Eigen::MatrixXi(count, users), MatrixXcd(count, users)};
    for (Index m = 0; m < count; ++m) {
        Index rest = m;
        for (int k = users - 1; k >= 0; --k) {
            const int idx = static_cast<int>(rest % order);
            rest /= order;
            book.indices(m, k) = idx;
            book.symbols(m, k) = constellation.point(idx);
        }
    }
    return book;
}

double CoefficientBundle::row_scale() const
{
    if (pairs() == 0) return 0.0;
    return std::max(b_rows.rowwise().norm().maxCoeff(), c_rows.rowwise().norm().maxCoeff());
}

void evaluate(const CoefficientBundle& bundle, const VectorXcd& theta, VectorXd& f, VectorXd& g)
{
    if (theta.size() != bundle.dim()) throw std::invalid_argument("evaluate: theta length mismatch");
    f = (bundle.b_rows * theta).real() + bundle.offsets_w;
    g = (bundle.c_rows * theta).real() + bundle.offsets_z;
}

double max_objective(const CoefficientBundle& bundle, const VectorXcd& theta)
{
    VectorXd f, g;
    evaluate(bundle, theta, f, g);
    return std::max(f.maxCoeff(), g.maxCoeff());
}

namespace {

// b_i^H = a_i^H (-sin psi - j cos psi), c_i^H = a_i^H (-sin psi + j cos psi).
cdouble f_factor(double psi) { return {-std::sin(psi), -std::cos(psi)}; }
cdouble g_factor(double psi) { return {-std::sin(psi), std::cos(psi)}; }

} // namespace

CoefficientBundle build_coefficients_standalone(const MatrixXcd& rows, const VectorXcd& symbols,
                                                const VectorXd& alpha, double half_angle, int m)
{
    const Index K = rows.rows(), N = rows.cols();
    if (symbols.size() != K || alpha.size() != K)
        throw std::invalid_argument("build_coefficients_standalone: dimension mismatch");
    if ((alpha.array() <= 0.0).any())
        throw std::invalid_argument("build_coefficients_standalone: alpha must be positive");

    CoefficientBundle out;
    out.b_rows.resize(K, N);
    out.c_rows.resize(K, N);
    out.offsets_w = VectorXd::Zero(K);
    out.offsets_z = VectorXd::Zero(K);
    out.tags.resize(K);
    const cdouble fb = f_factor(half_angle), fc = g_factor(half_angle);
    for (Index k = 0; k < K; ++k) {
        const cdouble rot = std::conj(symbols(k)) / std::abs(symbols(k)) / alpha(k);
        const RowVectorXcd a = rows.row(k) * rot;
        out.b_rows.row(k) = a * fb;
        out.c_rows.row(k) = a * fc;
        out.tags[k] = {m, static_cast<int>(k), -1};
    }
    return out;
}

CoefficientBundle build_coefficients_joint(const std::vector<VectorXcd>& precoders,
                                           const channel::ChannelSet& ch, const SymbolBook& book,
                                           const VectorXd& alpha, double beta, bool with_sir)
{
    const Index K = ch.users(), N = ch.elements(), M = ch.antennas();
    const Index count = book.size();
    if (static_cast<Index>(precoders.size()) != count || book.users() != K || alpha.size() != K)
        throw std::invalid_argument("build_coefficients_joint: dimension mismatch");
    for (const auto& x : precoders)
        if (x.size() != M) throw std::invalid_argument("build_coefficients_joint: precoder length mismatch");
    if ((alpha.array() <= 0.0).any()) throw std::invalid_argument("build_coefficients_joint: alpha must be positive");
    if (with_sir && !(beta > 0.0)) throw std::invalid_argument("build_coefficients_joint: beta must be positive");

    const double psi = book.half_angle();
    const cdouble fb = f_factor(psi), fc = g_factor(psi);
    const Index states = with_sir ? 2 : 1;
    const Index dim = states * N;
    const Index pir_pairs = states * K * count;
    const Index pairs = pir_pairs + (with_sir ? count : 0);

    CoefficientBundle out;
    out.b_rows = MatrixXcd::Zero(pairs, dim);
    out.c_rows = MatrixXcd::Zero(pairs, dim);
    out.offsets_w.resize(pairs);
    out.offsets_z.resize(pairs);
    out.tags.resize(pairs);

    for (Index m = 0; m < count; ++m) {
        const VectorXcd gx = ch.bs_irs * precoders[m]; // G x_m
        for (Index k = 0; k < K; ++k) {
            const cdouble rot = std::conj(book.symbols(m, k)) / std::abs(book.symbols(m, k));
            const cdouble a = (ch.direct.row(k).conjugate() * precoders[m])(0) * rot;
            const RowVectorXcd bvec = ch.irs_user.row(k).conjugate().cwiseProduct(gx.transpose()) * rot;
            const Index j = K * m + k;
            for (Index s = 0; s < states; ++s) {
                const Index i = states * j + s;
                out.b_rows.block(i, s * N, 1, N) = bvec * (fb / alpha(k));
                out.c_rows.block(i, s * N, 1, N) = bvec * (fc / alpha(k));
                out.offsets_w(i) = (a * fb).real() / alpha(k);
                out.offsets_z(i) = (a * fc).real() / alpha(k);
                out.tags[i] = {static_cast<int>(m), static_cast<int>(k), with_sir ? static_cast<int>(s) : -1};
            }
        }
        if (with_sir) {
            const cdouble a_s = (ch.sir_direct.adjoint() * precoders[m])(0);
            const RowVectorXcd bs = ch.sir_irs.adjoint().cwiseProduct(gx.transpose());
            const Index i = pir_pairs + m;
            // state 0: Re(y_s0) / beta <= -t ; state 1: -Re(y_s1) / beta <= -t
            out.b_rows.block(i, 0, 1, N) = bs / beta;
            out.c_rows.block(i, N, 1, N) = -bs / beta;
            out.offsets_w(i) = a_s.real() / beta;
            out.offsets_z(i) = -a_s.real() / beta;
            out.tags[i] = {static_cast<int>(m), static_cast<int>(K), 0};
        }
    }
    return out;
}

} // namespace irs::ci
