#include "irs/joint_tx.hpp"

#include "irs/discrete.hpp"
#include "irs/rng.hpp"

#include <limits>
#include <ostream>

namespace irs::joint {

namespace {

constexpr std::uint64_t init_tag = 0x6a6f696e74696e69ULL;
constexpr std::uint64_t restart_tag = 0x6a6f696e74727374ULL;

CirclePoint random_phases(Index n, CounterRng& rng)
{
    VectorXd phases(n);
    for (Index i = 0; i < n; ++i) phases(i) = 2.0 * pi * rng.uniform();
    return CirclePoint::from_phases(phases);
}

std::vector<CirclePoint> states_of(const CirclePoint& theta0, const CirclePoint& theta1, bool with_sir)
{
    if (with_sir) return {theta0, theta1};
    return {theta0};
}

// [Re q, -Im q] and [Im q, Re q]: rows giving Re(q x) and Im(q x) on u = [Re x; Im x].
void real_rows(const RowVectorXcd& q, Eigen::Ref<Eigen::RowVectorXd> re, Eigen::Ref<Eigen::RowVectorXd> im)
{
    const Index M = q.size();
    re.head(M) = q.real();
    re.tail(M) = -q.imag();
    im.head(M) = q.imag();
    im.tail(M) = q.real();
}

void check_weights(const VectorXd& w, Index K, const char* what)
{
    if (w.size() != K) throw std::invalid_argument(std::string(what) + ": one weight per user required");
    if (!((w.array() > 0.0).all() && w.allFinite())) throw std::invalid_argument(std::string(what) + " must be positive");
}

} // namespace

double PrecoderBook::total_power() const
{
    double total = 0.0;
    for (const auto& x : precoders) total += x.squaredNorm();
    return total;
}

CompoundChannels compound_channels(const channel::ChannelSet& ch, const std::vector<CirclePoint>& reflections,
                                   bool with_sir)
{
    const Index states = with_sir ? 2 : 1;
    if (static_cast<Index>(reflections.size()) != states)
        throw std::invalid_argument("compound_channels: expected " + std::to_string(states) + " reflection(s)");
    CompoundChannels out;
    for (const auto& theta : reflections) {
        if (theta.size() != ch.elements()) throw std::invalid_argument("compound_channels: reflection length mismatch");
        const RowVectorXcd t = theta.values().transpose();
        MatrixXcd rows(ch.users(), ch.antennas());
        for (Index k = 0; k < ch.users(); ++k)
            rows.row(k) = ch.direct.row(k).conjugate() + ch.irs_user.row(k).conjugate().cwiseProduct(t) * ch.bs_irs;
        out.users.push_back(std::move(rows));
        if (with_sir) out.sir.push_back(ch.sir_direct.adjoint() + ch.sir_irs.adjoint().cwiseProduct(t) * ch.bs_irs);
    }
    return out;
}

PrecoderSolution solve_precoder_pm(const CompoundChannels& ch, const VectorXcd& symbols, const VectorXd& alpha,
                                   double beta, double half_angle, const qp::QpOptions& opts)
{
    const Index states = ch.states();
    if (states < 1) throw std::invalid_argument("solve_precoder_pm: no channels");
    const Index K = ch.users[0].rows(), M = ch.users[0].cols();
    if (symbols.size() != K) throw std::invalid_argument("solve_precoder_pm: one symbol per user required");
    check_weights(alpha, K, "solve_precoder_pm: alpha");
    if (ch.with_sir() && !(beta > 0.0)) throw std::invalid_argument("solve_precoder_pm: beta must be positive");
    if (ch.with_sir() && (states != 2 || ch.sir.size() != 2))
        throw std::invalid_argument("solve_precoder_pm: the SIR needs exactly two reflection states");

    const double sn = std::sin(half_angle), cs = std::cos(half_angle);
    const Index rows = states * 2 * K + (ch.with_sir() ? 2 : 0);
    MatrixXd A(rows, 2 * M);
    VectorXd r(rows);
    Eigen::RowVectorXd re(2 * M), im(2 * M);
    Index i = 0;
    for (Index s = 0; s < states; ++s) {
        for (Index k = 0; k < K; ++k) {
            const RowVectorXcd q = ch.users[s].row(k) * (std::conj(symbols(k)) / std::abs(symbols(k)));
            real_rows(q, re, im);
            A.row(i) = sn * re - cs * im;
            r(i++) = alpha(k);
            A.row(i) = sn * re + cs * im;
            r(i++) = alpha(k);
        }
    }
    if (ch.with_sir()) {
        real_rows(ch.sir[0], re, im);
        A.row(i) = -re;
        r(i++) = beta;
        real_rows(ch.sir[1], re, im);
        A.row(i) = re;
        r(i++) = beta;
    }

    qp::QpResult sol;
    try {
        sol = qp::solve_min_norm(A, r, opts);
    } catch (const qp::InfeasibleRow& e) {
        const Index pir_rows = states * 2 * K;
        std::string what;
        if (e.row() < pir_rows)
            what = "CI margin of user " + std::to_string((e.row() % (2 * K)) / 2) + " under reflection state " +
                   std::to_string(e.row() / (2 * K));
        else
            what = "SIR bit " + std::to_string(e.row() - pir_rows);
        throw InfeasibleError("precoder infeasible at the " + what + " (" + e.what() + ")");
    }
    PrecoderSolution out;
    out.x.resize(M);
    for (Index n = 0; n < M; ++n) out.x(n) = {sol.u(n), sol.u(M + n)};
    out.kkt_residual = sol.kkt_residual;
    out.iterations = sol.iterations;
    return out;
}

PrecoderBook solve_precoders(const CompoundChannels& ch, const ci::SymbolBook& book, const VectorXd& alpha,
                             double beta, const qp::QpOptions& opts, int threads)
{
    PrecoderBook out;
    out.precoders.resize(book.size());
    parallel_for(static_cast<std::size_t>(book.size()), threads, [&](std::size_t m) {
        try {
            out.precoders[m] = solve_precoder_pm(ch, book.vector(static_cast<Index>(m)), alpha, beta, book.half_angle(), opts).x;
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("symbol vector " + std::to_string(m) + ": " + e.what());
        }
    });
    return out;
}

MatrixXd receiver_margins(const CompoundChannels& ch, const PrecoderBook& precoders, const ci::SymbolBook& book)
{
    const Index states = ch.states(), K = book.users();
    const double psi = book.half_angle();
    MatrixXd out(book.size() * states, K + (ch.with_sir() ? 1 : 0));
    for (Index m = 0; m < book.size(); ++m) {
        const VectorXcd& x = precoders.precoders[m];
        for (Index s = 0; s < states; ++s) {
            const Index row = m * states + s;
            const VectorXcd y = ch.users[s] * x;
            for (Index k = 0; k < K; ++k) out(row, k) = ci::ci_distance(ci::rotate(y(k), book.symbols(m, k)), psi);
            if (ch.with_sir()) {
                const double v = (ch.sir[s] * x)(0).real();
                out(row, K) = s == 0 ? -v : v;
            }
        }
    }
    return out;
}

ReflectionResult solve_reflection(const PrecoderBook& precoders, const channel::ChannelSet& channels,
                                  const ci::SymbolBook& book, const VectorXd& alpha, double beta, bool with_sir,
                                  const CirclePoint& theta0, const CirclePoint& theta1, const ReflectionOptions& opts)
{
    const Index N = channels.elements();
    if (theta0.size() != N || (with_sir && theta1.size() != N))
        throw std::invalid_argument("solve_reflection: incumbent length mismatch");
    if (opts.extra_starts < 0) throw std::invalid_argument("solve_reflection: extra_starts must be >= 0");
    const ci::CoefficientBundle bundle =
        ci::build_coefficients_joint(precoders.precoders, channels, book, alpha, beta, with_sir);
    const CirclePoint start = with_sir ? CirclePoint::stack(theta0, theta1) : theta0;

    ReflectionResult out;
    manifold::MinimaxResult best;
    if (bundle.dim() == 0) {
        best.theta = start;
        best.value = ci::max_objective(bundle, start.values());
    } else {
        best = manifold::minimize_max(bundle, start, opts.solver);
        CounterRng rng(derive_key(opts.seed, restart_tag));
        for (int s = 0; s < opts.extra_starts; ++s) {
            manifold::MinimaxResult r = manifold::minimize_max(bundle, random_phases(bundle.dim(), rng), opts.solver);
            best.iterations += r.iterations;
            if (r.value < best.value) {
                r.iterations = best.iterations;
                best = std::move(r);
            }
        }
    }
    out.iterations = best.iterations;
    out.t = -best.value;
    out.theta0 = best.theta.segment(0, N);
    out.theta1 = with_sir ? best.theta.segment(N, N) : out.theta0;
    return out;
}

VectorXd allocate_power(const VectorXd& norms, double t0, double total_power)
{
    if (norms.size() == 0) throw std::invalid_argument("allocate_power: empty norms");
    if (!((norms.array() > 0.0).all() && norms.allFinite()))
        throw std::invalid_argument("allocate_power: every norm must be positive (symbol vector unreachable)");
    if (!(t0 > 0.0)) throw std::invalid_argument("allocate_power: t0 must be positive");
    if (!(total_power > 0.0)) throw std::invalid_argument("allocate_power: total power must be positive");
    const VectorXd sq = norms.cwiseAbs2();
    return sq * (total_power / sq.sum());
}

void JointOptions::validate() const
{
    qp.validate();
    if (max_outer < 0) throw std::invalid_argument("JointOptions: max_outer must be >= 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("JointOptions: rel_tol must be > 0");
    if (init_retries < 1) throw std::invalid_argument("JointOptions: init_retries must be >= 1");
    if (bits && (*bits < 1 || *bits > 16)) throw std::invalid_argument("JointOptions: bits must be in [1, 16]");
    if (!(t0 > 0.0)) throw std::invalid_argument("JointOptions: t0 must be > 0");
}

namespace {

struct Iterate {
    CirclePoint theta0;
    CirclePoint theta1;
    PrecoderBook precoders;
    double value = 0.0;
};

CirclePoint snap(const CirclePoint& theta, const JointOptions& opts)
{
    return opts.bits ? discrete::quantize(theta, *opts.bits) : theta;
}

// First reflections whose precoder stage is feasible.
template <typename Stage>
Iterate initialize(const channel::ChannelSet& channels, bool with_sir, const JointOptions& opts, Stage&& stage)
{
    const Index N = channels.elements();
    if (opts.initial) {
        Iterate it{snap(opts.initial->first, opts), snap(with_sir ? opts.initial->second : opts.initial->first, opts), {}, 0.0};
        if (it.theta0.size() != N || it.theta1.size() != N)
            throw std::invalid_argument("joint design: initial reflection length mismatch");
        stage(it);
        return it;
    }
    for (int attempt = 0; attempt < opts.init_retries; ++attempt) {
        CounterRng rng(derive_key(opts.seed, init_tag), static_cast<std::uint32_t>(attempt));
        Iterate it;
        it.theta0 = snap(random_phases(N, rng), opts);
        it.theta1 = with_sir ? snap(random_phases(N, rng), opts) : it.theta0;
        try {
            stage(it);
            return it;
        } catch (const InfeasibleError&) {
        }
    }
    throw InfeasibleError("joint design: no feasible initialization after " + std::to_string(opts.init_retries) +
                          " random draws");
}

void check_inputs(const channel::ChannelSet& channels, const ci::SymbolBook& book, const VectorXd& weights,
                  double sir_weight, bool with_sir, const JointOptions& opts, const char* what)
{
    opts.validate();
    channels.validate();
    if (book.users() != channels.users()) throw std::invalid_argument(std::string(what) + ": symbol book user count mismatch");
    check_weights(weights, channels.users(), what);
    if (with_sir && !(sir_weight > 0.0)) throw std::invalid_argument(std::string(what) + ": SIR weight must be positive");
    if (with_sir && channels.elements() == 0)
        throw std::invalid_argument(std::string(what) + ": the SIR needs reflecting elements");
}

JointDesignResult finish(Iterate best, bool with_sir, std::vector<double> trace, int iterations, bool converged)
{
    JointDesignResult out;
    out.precoders = std::move(best.precoders);
    out.theta0 = std::move(best.theta0);
    out.theta1 = std::move(best.theta1);
    out.with_sir = with_sir;
    out.trace = std::move(trace);
    out.iterations = iterations;
    out.converged = converged;
    out.feasible = true;
    out.average_power = out.precoders.average_power();
    return out;
}

} // namespace

JointDesignResult joint_power_min(const channel::ChannelSet& channels, const ci::SymbolBook& book,
                                  const VectorXd& alpha, double beta, bool with_sir, const JointOptions& opts)
{
    check_inputs(channels, book, alpha, beta, with_sir, opts, "joint_power_min");

    auto stage = [&](Iterate& it) {
        const CompoundChannels cc = compound_channels(channels, states_of(it.theta0, it.theta1, with_sir), with_sir);
        it.precoders = solve_precoders(cc, book, alpha, beta, opts.qp, opts.threads);
        it.value = it.precoders.average_power();
    };

    Iterate current = initialize(channels, with_sir, opts, stage);
    std::vector<double> trace{current.value};
    if (channels.elements() == 0) {
        JointDesignResult out = finish(std::move(current), with_sir, std::move(trace), 0, true);
        out.balanced_t = 1.0;
        return out;
    }

    Iterate best = current;
    int iterations = 0;
    bool converged = false;
    for (int outer = 1; outer <= opts.max_outer; ++outer) {
        const ReflectionResult refl = solve_reflection(current.precoders, channels, book, alpha, beta, with_sir,
                                                       current.theta0, current.theta1, opts.reflection);
        Iterate next{snap(refl.theta0, opts), snap(refl.theta1, opts), {}, 0.0};
        try {
            stage(next);
        } catch (const InfeasibleError&) {
            break;
        }
        trace.push_back(next.value);
        iterations = outer;
        const double change = std::abs(next.value - current.value) / current.value;
        current = std::move(next);
        if (current.value < best.value) best = current;
        if (change < opts.rel_tol) {
            converged = true;
            break;
        }
    }
    JointDesignResult out = finish(std::move(best), with_sir, std::move(trace), iterations, converged);
    out.balanced_t = 1.0;
    return out;
}

JointDesignResult joint_qos_balance(const channel::ChannelSet& channels, const ci::SymbolBook& book,
                                    const VectorXd& rho, double sir_weight, double power, bool with_sir,
                                    const JointOptions& opts)
{
    check_inputs(channels, book, rho, sir_weight, with_sir, opts, "joint_qos_balance");
    if (!(power > 0.0)) throw std::invalid_argument("joint_qos_balance: power must be positive");

    const VectorXd refl_alpha = rho.cwiseInverse();
    const double refl_beta = with_sir ? 1.0 / sir_weight : 0.0;
    const double total = power * static_cast<double>(book.size());

    // The stage targets t0 / rho_k and t0 / sir_weight. Minimum-norm precoders are
    // homogeneous in the targets and the allocation only sees norm ratios, so the
    // unit-target solve is used directly and t0 cancels exactly, not up to rounding.
    auto stage = [&](Iterate& it) {
        const CompoundChannels cc = compound_channels(channels, states_of(it.theta0, it.theta1, with_sir), with_sir);
        PrecoderBook raw = solve_precoders(cc, book, refl_alpha, refl_beta, opts.qp, opts.threads);
        VectorXd unit_norms(raw.size());
        for (Index m = 0; m < raw.size(); ++m) unit_norms(m) = raw.precoders[m].norm();
        const VectorXd p = allocate_power(unit_norms, opts.t0, total);
        for (Index m = 0; m < raw.size(); ++m) raw.precoders[m] *= std::sqrt(p(m)) / unit_norms(m);
        it.precoders = std::move(raw);
        it.value = std::sqrt(p(0)) / unit_norms(0);
    };

    Iterate current = initialize(channels, with_sir, opts, stage);
    std::vector<double> trace{current.value};
    Iterate best = current;
    int iterations = 0;
    bool converged = channels.elements() == 0;
    for (int outer = 1; outer <= opts.max_outer && !converged; ++outer) {
        const ReflectionResult refl = solve_reflection(current.precoders, channels, book, refl_alpha, refl_beta,
                                                       with_sir, current.theta0, current.theta1, opts.reflection);
        Iterate next{snap(refl.theta0, opts), snap(refl.theta1, opts), {}, 0.0};
        try {
            stage(next);
        } catch (const InfeasibleError&) {
            break;
        }
        trace.push_back(next.value);
        iterations = outer;
        const double change = std::abs(next.value - current.value) / std::abs(current.value);
        current = std::move(next);
        if (current.value > best.value) best = current;
        if (change < opts.rel_tol) converged = true;
    }
    const double t = best.value;
    JointDesignResult out = finish(std::move(best), with_sir, std::move(trace), iterations, converged);
    out.balanced_t = t;
    return out;
}

void write_trace_csv(std::ostream& out, const JointDesignResult& result)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "iteration,value\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) out << i << ',' << result.trace[i] << '\n';
    out.precision(old);
}

void write_phases_csv(std::ostream& out, const JointDesignResult& result)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "element,theta0_rad,theta1_rad\n";
    const VectorXd p0 = result.theta0.phases(), p1 = result.theta1.phases();
    for (Index n = 0; n < p0.size(); ++n) out << n << ',' << p0(n) << ',' << p1(n) << '\n';
    out.precision(old);
}

} // namespace irs::joint
