#include "irs/sim.hpp"

#include "irs/rng.hpp"

#include <iomanip>
#include <ostream>

namespace irs::sim {

namespace {

constexpr std::uint64_t noise_tag = 0x6e6f697365736572ULL;
constexpr std::uint64_t chunk = 4096;

struct Counts {
    std::vector<std::uint64_t> user;
    std::uint64_t sir = 0;
};

// Splits trials into fixed chunks so counts never depend on the worker count.
template <typename Trial>
Counts accumulate(Index users, const SimOptions& opts, Trial&& trial)
{
    const std::uint64_t chunks = (opts.trials + chunk - 1) / chunk;
    std::vector<Counts> parts(chunks, Counts{std::vector<std::uint64_t>(users, 0), 0});
    const std::uint64_t key = derive_key(opts.seed, noise_tag);
    parallel_for(static_cast<std::size_t>(chunks), opts.threads, [&](std::size_t c) {
        const std::uint64_t begin = c * chunk, end = std::min(opts.trials, begin + chunk);
        for (std::uint64_t t = begin; t < end; ++t) {
            CounterRng rng(key ^ (t >> 32), opts.grid_index, static_cast<std::uint32_t>(t));
            trial(rng, parts[c]);
        }
    });
    Counts total{std::vector<std::uint64_t>(users, 0), 0};
    for (const auto& p : parts) {
        for (Index k = 0; k < users; ++k) total.user[k] += p.user[k];
        total.sir += p.sir;
    }
    return total;
}

SerResult summarize(const Counts& counts, std::uint64_t decisions, std::uint64_t sir_trials)
{
    const Index K = static_cast<Index>(counts.user.size());
    SerResult out;
    out.trials = decisions;
    out.user_ser.resize(K);
    out.user_half_width.resize(K);
    for (Index k = 0; k < K; ++k) {
        out.user_ser(k) = static_cast<double>(counts.user[k]) / static_cast<double>(decisions);
        out.user_half_width(k) = half_width(out.user_ser(k), decisions);
    }
    out.average = out.user_ser.mean();
    out.maximum = out.user_ser.maxCoeff();
    out.half_width = half_width(out.average, decisions * static_cast<std::uint64_t>(K));
    if (sir_trials > 0) {
        out.sir_trials = sir_trials;
        out.sir_ser = static_cast<double>(counts.sir) / static_cast<double>(sir_trials);
        out.sir_half_width = half_width(out.sir_ser, sir_trials);
    }
    return out;
}

void check_common(double noise_power, const SimOptions& opts)
{
    if (!(noise_power >= 0.0)) throw std::invalid_argument("simulate: noise power must be >= 0");
    if (opts.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
}

} // namespace

int detect_psk(cdouble r, const ci::PskConstellation& constellation)
{
    int best = 0;
    double score = (r * std::conj(constellation.point(0))).real();
    for (int i = 1; i < constellation.order; ++i) {
        const double s = (r * std::conj(constellation.point(i))).real();
        if (s > score) {
            score = s;
            best = i;
        }
    }
    return best;
}

int detect_psk(cdouble r, int order)
{
    if (order < 2) throw std::invalid_argument("detect_psk: order must be >= 2");
    return detect_psk(r, ci::PskConstellation(order));
}

int detect_sir(const VectorXcd& received)
{
    if (received.size() < 1) throw std::invalid_argument("detect_sir: need at least one sample");
    return received.mean().real() > 0.0 ? 1 : 0;
}

double half_width(double rate, std::uint64_t n)
{
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

SerResult simulate_passive(const passive::PassiveDesignResult& design, const MatrixXcd& rows,
                           const ci::SymbolBook& book, double power, double noise_power, const SimOptions& opts)
{
    check_common(noise_power, opts);
    if (!(power > 0.0)) throw std::invalid_argument("simulate_passive: power must be > 0");
    const Index K = rows.rows(), count = book.size();
    if (static_cast<Index>(design.reflections.size()) != count || K != book.users())
        throw std::invalid_argument("simulate_passive: design does not match the symbol book");

    MatrixXcd clean(count, K);
    for (Index m = 0; m < count; ++m) clean.row(m) = (rows * design.reflections[m].values()).transpose() * std::sqrt(power);
    const double sigma = std::sqrt(noise_power);
    const ci::PskConstellation& psk = book.constellation;

    const Counts counts = accumulate(K, opts, [&](CounterRng& rng, Counts& c) {
        const Index m = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(count)));
        for (Index k = 0; k < K; ++k) {
            const cdouble r = clean(m, k) + sigma * rng.complex_normal();
            if (detect_psk(r, psk) != book.indices(m, k)) ++c.user[k];
        }
    });
    SerResult out = summarize(counts, opts.trials, 0);
    out.power_dbm = watts_to_dbm(power);
    return out;
}

SerResult simulate_joint(const joint::JointDesignResult& design, const channel::ChannelSet& channels,
                         const ci::SymbolBook& book, int embedding_length, double noise_power,
                         const SimOptions& opts)
{
    check_common(noise_power, opts);
    if (embedding_length < 1) throw std::invalid_argument("simulate_joint: embedding length must be >= 1");
    const Index K = book.users(), count = book.size();
    if (design.precoders.size() != count) throw std::invalid_argument("simulate_joint: design does not match the symbol book");
    const bool sir = design.with_sir;
    const joint::CompoundChannels cc = joint::compound_channels(
        channels, sir ? std::vector<CirclePoint>{design.theta0, design.theta1} : std::vector<CirclePoint>{design.theta0}, sir);

    // clean[s](m, k): noiseless sample of receiver k (k == K is the SIR) under state s.
    std::vector<MatrixXcd> clean(cc.states(), MatrixXcd(count, K + 1));
    for (Index s = 0; s < cc.states(); ++s)
        for (Index m = 0; m < count; ++m) {
            const VectorXcd& x = design.precoders.precoders[m];
            clean[s].row(m).head(K) = (cc.users[s] * x).transpose();
            clean[s](m, K) = sir ? (cc.sir[s] * x)(0) : cdouble(0.0);
        }
    const double sigma = std::sqrt(noise_power);
    const ci::PskConstellation& psk = book.constellation;
    const Index L = embedding_length;

    const Counts counts = accumulate(K, opts, [&](CounterRng& rng, Counts& c) {
        const int bit = sir ? static_cast<int>(rng.uniform_index(2)) : 0;
        const MatrixXcd& y = clean[bit];
        cdouble sum = 0.0;
        for (Index l = 0; l < L; ++l) {
            const Index m = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(count)));
            for (Index k = 0; k < K; ++k) {
                const cdouble r = y(m, k) + sigma * rng.complex_normal();
                if (detect_psk(r, psk) != book.indices(m, k)) ++c.user[k];
            }
            if (sir) sum += y(m, K) + sigma * rng.complex_normal();
        }
        if (sir && (sum.real() > 0.0 ? 1 : 0) != bit) ++c.sir;
    });
    SerResult out = summarize(counts, opts.trials * static_cast<std::uint64_t>(L), sir ? opts.trials : 0);
    out.power_dbm = watts_to_dbm(design.precoders.average_power());
    return out;
}

std::vector<SerResult> run_ser(const passive::PassiveDesignResult& design, const MatrixXcd& rows,
                               const ci::SymbolBook& book, const std::vector<double>& power_grid_dbm,
                               double noise_power, const SimOptions& opts)
{
    std::vector<SerResult> out;
    for (std::size_t i = 0; i < power_grid_dbm.size(); ++i) {
        SimOptions o = opts;
        o.grid_index = static_cast<std::uint32_t>(i);
        out.push_back(simulate_passive(design, rows, book, dbm_to_watts(power_grid_dbm[i]), noise_power, o));
    }
    return out;
}

std::vector<SerResult> run_ser(const joint::JointDesignResult& design, const channel::ChannelSet& channels,
                               const ci::SymbolBook& book, const std::vector<double>& power_grid_dbm,
                               int embedding_length, double noise_power, const SimOptions& opts)
{
    const double base = design.precoders.average_power();
    if (!(base > 0.0)) throw std::invalid_argument("run_ser: design has zero power");
    std::vector<SerResult> out;
    for (std::size_t i = 0; i < power_grid_dbm.size(); ++i) {
        joint::JointDesignResult scaled = design;
        const double g = std::sqrt(dbm_to_watts(power_grid_dbm[i]) / base);
        for (auto& x : scaled.precoders.precoders) x *= g;
        SimOptions o = opts;
        o.grid_index = static_cast<std::uint32_t>(i);
        SerResult r = simulate_joint(scaled, channels, book, embedding_length, noise_power, o);
        r.power_dbm = power_grid_dbm[i];
        out.push_back(std::move(r));
    }
    return out;
}

SerResult simulate_awgn_psk(int order, double snr, const SimOptions& opts)
{
    check_common(1.0, opts);
    if (!(snr > 0.0)) throw std::invalid_argument("simulate_awgn_psk: snr must be > 0");
    const ci::PskConstellation psk(order);
    const double sigma = std::sqrt(1.0 / snr);
    const Counts counts = accumulate(1, opts, [&](CounterRng& rng, Counts& c) {
        const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(order)));
        if (detect_psk(psk.point(i) + sigma * rng.complex_normal(), psk) != i) ++c.user[0];
    });
    SerResult out = summarize(counts, opts.trials, 0);
    out.power_dbm = linear_to_db(snr);
    return out;
}

void write_ser_csv(std::ostream& out, const std::vector<SerResult>& results, bool header)
{
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    if (header) out << "power_dBm,user_id,ser,half_width,trials\n";
    for (const auto& r : results) {
        for (Index k = 0; k < r.user_ser.size(); ++k)
            out << r.power_dbm << ',' << k << ',' << r.user_ser(k) << ',' << r.user_half_width(k) << ',' << r.trials << '\n';
        out << r.power_dbm << ",avg," << r.average << ',' << r.half_width << ',' << r.trials << '\n';
        out << r.power_dbm << ",max," << r.maximum << ',' << r.user_half_width.maxCoeff() << ',' << r.trials << '\n';
        if (r.has_sir()) out << r.power_dbm << ",sir," << r.sir_ser << ',' << r.sir_half_width << ',' << r.sir_trials << '\n';
    }
    out.precision(old);
}

} // namespace irs::sim
