#include "irs/passive_tx.hpp"

#include "irs/rng.hpp"

#include <iomanip>
#include <limits>
#include <ostream>

namespace irs::passive {

namespace {

constexpr std::uint64_t start_tag = 0x7061737369766531ULL;

int parse_bits(const std::string& text, std::size_t from)
{
    std::size_t used = 0;
    int bits = 0;
    try {
        bits = std::stoi(text.substr(from), &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || from + used != text.size() || bits < 1 || bits > 16)
        throw std::invalid_argument("Strategy: bad bit count in '" + text + "'");
    return bits;
}

// Phase-aligned start: theta_n cancels the phase of the summed weighted rows.
CirclePoint matched_start(const ci::CoefficientBundle& bundle)
{
    const RowVectorXcd sum = bundle.b_rows.colwise().sum() + bundle.c_rows.colwise().sum();
    VectorXcd v(sum.size());
    for (Index n = 0; n < sum.size(); ++n) {
        // f and g share -sin(psi) on the real part; minimizing Re(b theta) wants b theta on the negative axis.
        const double mag = std::abs(sum(n));
        v(n) = mag > 0.0 ? -std::conj(sum(n)) / mag : cdouble(1.0);
    }
    return CirclePoint(std::move(v));
}

CirclePoint random_start(Index n, CounterRng& rng)
{
    VectorXd phases(n);
    for (Index i = 0; i < n; ++i) phases(i) = 2.0 * pi * rng.uniform();
    return CirclePoint::from_phases(phases);
}

} // namespace

Strategy Strategy::parse(const std::string& text)
{
    if (text == "continuous") return {Kind::continuous, 0};
    const auto dash = text.find('-');
    if (dash == std::string::npos) throw std::invalid_argument("Strategy: unknown strategy '" + text + "'");
    const std::string head = text.substr(0, dash);
    const int bits = parse_bits(text, dash + 1);
    if (head == "quantize") return {Kind::quantize, bits};
    if (head == "heuristic") return {Kind::heuristic, bits};
    if (head == "bnb") return {Kind::bnb, bits};
    throw std::invalid_argument("Strategy: unknown strategy '" + text + "'");
}

std::string Strategy::name() const
{
    switch (kind) {
    case Kind::continuous: return "continuous";
    case Kind::quantize: return "quantize-" + std::to_string(bits);
    case Kind::heuristic: return "heuristic-" + std::to_string(bits);
    case Kind::bnb: return "bnb-" + std::to_string(bits);
    }
    return "continuous";
}

VectorXd user_margins(const ci::CoefficientBundle& bundle, const VectorXcd& theta)
{
    VectorXd f, g;
    ci::evaluate(bundle, theta, f, g);
    return -f.cwiseMax(g);
}

VectorXd qos_alpha(const VectorXd& rho, double power)
{
    if (!(power > 0.0)) throw std::invalid_argument("qos_alpha: power must be > 0");
    if ((rho.array() <= 0.0).any()) throw std::invalid_argument("qos_alpha: rho must be positive");
    return (rho.array() * std::sqrt(power)).inverse().matrix();
}

std::vector<PassiveDesignResult> design_power_min(const MatrixXcd& rows, const VectorXd& alpha,
                                                  const ci::SymbolBook& book, const std::vector<Strategy>& strategies,
                                                  const PassiveOptions& opts)
{
    const Index K = rows.rows(), N = rows.cols();
    if (K != book.users() || alpha.size() != K) throw std::invalid_argument("design_power_min: dimension mismatch");
    if (N < 1) throw std::invalid_argument("design_power_min: need at least one reflecting element");
    for (Index k = 0; k < K; ++k)
        if (rows.row(k).norm() == 0.0)
            throw std::invalid_argument("design_power_min: channel of user " + std::to_string(k) + " is zero");
    for (const auto& strategy : strategies)
        if (strategy.kind != Strategy::Kind::continuous && strategy.bits < 1)
            throw std::invalid_argument("design_power_min: discrete strategy needs bits >= 1");
    if (opts.extra_starts < 0) throw std::invalid_argument("design_power_min: extra_starts must be >= 0");
    const Index count = book.size();
    if (opts.warm_start && static_cast<Index>(opts.warm_start->size()) != count)
        throw std::invalid_argument("design_power_min: warm_start needs one reflection per symbol vector");

    const std::size_t S = strategies.size();
    std::vector<PassiveDesignResult> out(S);
    for (std::size_t s = 0; s < S; ++s) {
        out[s].strategy = strategies[s];
        out[s].reflections.resize(count);
        out[s].user_margins.resize(count, K);
    }
    std::vector<int> iterations(count, 0);
    std::vector<std::vector<char>> certified(S, std::vector<char>(count, 1));

    parallel_for(static_cast<std::size_t>(count), opts.threads, [&](std::size_t idx) {
        const Index m = static_cast<Index>(idx);
        const ci::CoefficientBundle bundle =
            ci::build_coefficients_standalone(rows, book.vector(m), alpha, book.half_angle(), static_cast<int>(m));

        std::vector<CirclePoint> starts;
        if (opts.warm_start) starts.push_back((*opts.warm_start)[m]);
        starts.push_back(matched_start(bundle));
        CounterRng rng(derive_key(opts.seed, start_tag), static_cast<std::uint32_t>(m));
        for (int s = 0; s < opts.extra_starts; ++s) starts.push_back(random_start(N, rng));

        manifold::MinimaxResult best;
        best.value = std::numeric_limits<double>::infinity();
        for (const auto& start : starts) {
            manifold::MinimaxResult r = manifold::minimize_max(bundle, start, opts.solver);
            iterations[m] += r.iterations;
            if (r.value < best.value) best = std::move(r);
        }

        for (std::size_t s = 0; s < S; ++s) {
            const Strategy& strategy = strategies[s];
            CirclePoint theta = best.theta;
            switch (strategy.kind) {
            case Strategy::Kind::continuous: break;
            case Strategy::Kind::quantize: theta = discrete::quantize(theta, strategy.bits); break;
            case Strategy::Kind::heuristic: theta = discrete::coordinate_refine(theta, bundle, strategy.bits).theta; break;
            case Strategy::Kind::bnb: {
                discrete::BnbOptions bnb;
                bnb.node_budget = opts.node_budget;
                bnb.incumbent = discrete::coordinate_refine(theta, bundle, strategy.bits).theta;
                const discrete::BnbResult r = discrete::branch_and_bound(bundle, strategy.bits, bnb);
                certified[s][m] = r.certified;
                theta = r.theta;
                break;
            }
            }
            out[s].user_margins.row(m) = user_margins(bundle, theta.values()).transpose();
            out[s].reflections[m] = std::move(theta);
        }
    });

    for (std::size_t s = 0; s < S; ++s) {
        PassiveDesignResult& r = out[s];
        r.per_m = r.user_margins.rowwise().minCoeff();
        r.margin_t = r.per_m.minCoeff();
        r.feasible = r.margin_t > 0.0;
        r.min_power = r.feasible ? 1.0 / (r.margin_t * r.margin_t) : std::numeric_limits<double>::infinity();
        for (Index m = 0; m < count; ++m) {
            r.iterations += iterations[m];
            r.certified = r.certified && certified[s][m];
        }
    }
    return out;
}

PassiveDesignResult design_power_min(const MatrixXcd& rows, const VectorXd& alpha, const ci::SymbolBook& book,
                                     const Strategy& strategy, const PassiveOptions& opts)
{
    return std::move(design_power_min(rows, alpha, book, std::vector<Strategy>{strategy}, opts).front());
}

std::vector<PassiveDesignResult> design_qos_balance(const MatrixXcd& rows, const VectorXd& rho, double power,
                                                    const ci::SymbolBook& book, const std::vector<Strategy>& strategies,
                                                    const PassiveOptions& opts)
{
    return design_power_min(rows, qos_alpha(rho, power), book, strategies, opts);
}

PassiveDesignResult design_qos_balance(const MatrixXcd& rows, const VectorXd& rho, double power,
                                       const ci::SymbolBook& book, const Strategy& strategy,
                                       const PassiveOptions& opts)
{
    return design_power_min(rows, qos_alpha(rho, power), book, strategy, opts);
}

void write_margins_csv(std::ostream& out, const PassiveDesignResult& result)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "m,k,margin\n";
    for (Index m = 0; m < result.user_margins.rows(); ++m)
        for (Index k = 0; k < result.user_margins.cols(); ++k)
            out << m << ',' << k << ',' << result.user_margins(m, k) << '\n';
    out.precision(old);
}

} // namespace irs::passive
