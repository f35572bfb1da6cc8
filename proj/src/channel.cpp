#include "irs/channel.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace irs::channel {

ScenarioConfig ScenarioConfig::standalone()
{
    ScenarioConfig c;
    c.irs_user = {3.0, db_to_linear(3.0)};
    c.generator_irs = {2.0, db_to_linear(3.0)};
    return c;
}

ScenarioConfig ScenarioConfig::joint()
{
    ScenarioConfig c;
    c.bs_irs = {2.5, db_to_linear(3.0)};
    c.irs_user = {3.0, 0.0};
    c.bs_user = {3.0, 0.0};
    c.irs_sir = {3.0, 0.0};
    c.bs_sir = {3.0, 0.0};
    return c;
}

void ScenarioConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("ScenarioConfig: ") + what);
    };
    require(n_bs_antennas >= 1, "n_bs_antennas must be >= 1");
    require(n_irs_elements >= 0, "n_irs_elements must be >= 0");
    require(n_users >= 1, "n_users must be >= 1");
    require(constellation_order >= 2 && (constellation_order & (constellation_order - 1)) == 0,
            "constellation_order must be a power of two >= 2");
    require(noise_power > 0.0, "noise_power must be > 0");
    require(pathloss_ref_gain > 0.0, "pathloss_ref_gain must be > 0");
    require(pathloss_ref_distance > 0.0, "pathloss_ref_distance must be > 0");
    require(generator_distance > 0.0 && user_distance > 0.0 && sir_distance > 0.0,
            "distances must be > 0");
    require(distance(bs, irs) > 0.0, "BS and IRS must not coincide");
    for (const LinkModel* l : {&bs_irs, &irs_user, &bs_user, &generator_irs, &irs_sir, &bs_sir})
        require(l->rician_factor >= 0.0, "rician_factor must be >= 0");
    require(embedding_length >= 1, "embedding_length must be >= 1");
}

void ChannelSet::validate() const
{
    const Index k = irs_user.rows(), n = irs_user.cols(), m = direct.cols();
    if (direct.rows() != k || bs_irs.rows() != n || bs_irs.cols() != m ||
        generator_irs.size() != n || sir_direct.size() != m || sir_irs.size() != n)
        throw std::invalid_argument("ChannelSet: inconsistent dimensions");
    auto finite = [](const auto& x) { return x.allFinite(); };
    if (!finite(direct) || !finite(irs_user) || !finite(bs_irs) || !finite(generator_irs) ||
        !finite(sir_direct) || !finite(sir_irs))
        throw std::invalid_argument("ChannelSet: non-finite entry");
}

double path_loss(double d, double exponent, double ref_gain, double ref_distance)
{
    if (!(d > 0.0) || !(ref_distance > 0.0))
        throw std::domain_error("path_loss: distances must be positive");
    return ref_gain * std::pow(ref_distance / d, exponent);
}

VectorXcd ula_steering(Index n, double angle)
{
    VectorXcd a(n);
    const double s = std::sin(angle);
    for (Index i = 0; i < n; ++i) a(i) = std::polar(1.0, pi * static_cast<double>(i) * s);
    return a;
}

MatrixXcd draw_rician(Index rows, Index cols, double rician_factor, const MatrixXcd& los,
                      double avg_gain, CounterRng rng)
{
    if (los.rows() != rows || los.cols() != cols)
        throw std::invalid_argument("draw_rician: LoS dimensions do not match");
    if (!(rician_factor >= 0.0)) throw std::invalid_argument("draw_rician: rician_factor must be >= 0");
    double w_los = 1.0, w_nlos = 0.0;
    if (std::isfinite(rician_factor)) {
        w_los = std::sqrt(rician_factor / (rician_factor + 1.0));
        w_nlos = std::sqrt(1.0 / (rician_factor + 1.0));
    }
    const double amp = std::sqrt(avg_gain);
    MatrixXcd out(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            out(r, c) = amp * (w_los * los(r, c) + w_nlos * rng.complex_normal());
    return out;
}

MatrixXcd draw_rician(Index rows, Index cols, double rician_factor, const MatrixXcd& los,
                      double avg_gain, std::uint64_t seed)
{
    return draw_rician(rows, cols, rician_factor, los, avg_gain, CounterRng(seed));
}

VectorXcd effective_channel_standalone(const VectorXcd& h_rk, const VectorXcd& h_g)
{
    if (h_rk.size() != h_g.size())
        throw std::invalid_argument("effective_channel_standalone: length mismatch");
    // (h_rk^H diag(h_g))^H = diag(conj(h_g)) h_rk
    return h_g.conjugate().cwiseProduct(h_rk);
}

MatrixXcd standalone_rows(const ChannelSet& channels)
{
    MatrixXcd rows(channels.users(), channels.elements());
    for (Index k = 0; k < channels.users(); ++k) {
        const VectorXcd h_k =
            effective_channel_standalone(channels.irs_user.row(k).transpose(), channels.generator_irs);
        rows.row(k) = h_k.adjoint();
    }
    return rows;
}

VectorXcd compound_channel_joint(const VectorXcd& h_k, const VectorXcd& h_rk, const MatrixXcd& G,
                                 const VectorXcd& theta)
{
    if (G.rows() != h_rk.size() || G.cols() != h_k.size() || theta.size() != h_rk.size())
        throw std::invalid_argument("compound_channel_joint: dimension mismatch");
    // h~ = h + G^H diag(conj(theta)) h_rk
    return h_k + G.adjoint() * theta.conjugate().cwiseProduct(h_rk);
}

namespace {

double bearing(const Point2& from, const Point2& to) { return std::atan2(to.y - from.y, to.x - from.x); }

CounterRng link_stream(const ScenarioConfig& c, Link link, std::uint64_t trial, std::uint64_t sub = 0)
{
    return CounterRng(derive_key(c.rng_seed, (static_cast<std::uint64_t>(link) << 32) | sub),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32));
}

double gain(const ScenarioConfig& c, double d, const LinkModel& l)
{
    return path_loss(d, l.exponent, c.pathloss_ref_gain, c.pathloss_ref_distance);
}

} // namespace

ChannelSet generate(const ScenarioConfig& c, std::uint64_t trial)
{
    c.validate();
    const Index M = c.n_bs_antennas, N = c.n_irs_elements, K = c.n_users;

    CounterRng geo = link_stream(c, Link::geometry, trial);
    std::vector<Point2> users(K);
    for (Index k = 0; k < K; ++k) {
        const double phi = (2.0 * geo.uniform() - 1.0) * c.user_sector;
        users[k] = {c.irs.x + c.user_distance * std::cos(phi), c.irs.y + c.user_distance * std::sin(phi)};
    }
    const double phi_s = (2.0 * geo.uniform() - 1.0) * c.user_sector;
    const Point2 sir{c.irs.x + c.sir_distance * std::cos(phi_s), c.irs.y + c.sir_distance * std::sin(phi_s)};
    const Point2 generator{c.irs.x + c.generator_distance, c.irs.y};

    ChannelSet ch;

    const MatrixXcd g_los = ula_steering(N, bearing(c.irs, c.bs)) * ula_steering(M, bearing(c.bs, c.irs)).adjoint();
    ch.bs_irs = draw_rician(N, M, c.bs_irs.rician_factor, g_los, gain(c, distance(c.bs, c.irs), c.bs_irs),
                            link_stream(c, Link::bs_irs, trial));

    ch.irs_user.resize(K, N);
    ch.direct.resize(K, M);
    for (Index k = 0; k < K; ++k) {
        const MatrixXcd los_r = ula_steering(N, bearing(c.irs, users[k]));
        const MatrixXcd h_rk = draw_rician(N, 1, c.irs_user.rician_factor, los_r,
                                           gain(c, distance(c.irs, users[k]), c.irs_user),
                                           link_stream(c, Link::irs_user, trial, k));
        ch.irs_user.row(k) = h_rk.col(0).transpose();

        const MatrixXcd los_d = ula_steering(M, bearing(c.bs, users[k]));
        const MatrixXcd h_k = draw_rician(M, 1, c.bs_user.rician_factor, los_d,
                                          gain(c, distance(c.bs, users[k]), c.bs_user),
                                          link_stream(c, Link::bs_user, trial, k));
        ch.direct.row(k) = h_k.col(0).transpose();
    }

    ch.generator_irs = draw_rician(N, 1, c.generator_irs.rician_factor, ula_steering(N, bearing(c.irs, generator)),
                                   gain(c, c.generator_distance, c.generator_irs),
                                   link_stream(c, Link::generator_irs, trial))
                           .col(0);
    ch.sir_irs = draw_rician(N, 1, c.irs_sir.rician_factor, ula_steering(N, bearing(c.irs, sir)),
                             gain(c, distance(c.irs, sir), c.irs_sir), link_stream(c, Link::irs_sir, trial))
                     .col(0);
    ch.sir_direct = draw_rician(M, 1, c.bs_sir.rician_factor, ula_steering(M, bearing(c.bs, sir)),
                                gain(c, distance(c.bs, sir), c.bs_sir), link_stream(c, Link::bs_sir, trial))
                        .col(0);
    return ch;
}

namespace {

void write_block(std::ostream& out, const std::string& name, const MatrixXcd& m)
{
    out << "link," << name << ',' << m.rows() << ',' << m.cols() << '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c).real() << ',' << m(r, c).imag();
        }
        out << '\n';
    }
}

} // namespace

void write_csv(std::ostream& out, const ChannelSet& ch)
{
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    write_block(out, "direct", ch.direct);
    write_block(out, "irs_user", ch.irs_user);
    write_block(out, "bs_irs", ch.bs_irs);
    write_block(out, "generator_irs", ch.generator_irs);
    write_block(out, "sir_direct", ch.sir_direct);
    write_block(out, "sir_irs", ch.sir_irs);
    out.precision(old_precision);
}

ChannelSet read_csv(std::istream& in)
{
    std::map<std::string, MatrixXcd> blocks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream header(line);
        std::string tag, name, rows_s, cols_s;
        std::getline(header, tag, ',');
        std::getline(header, name, ',');
        std::getline(header, rows_s, ',');
        std::getline(header, cols_s, ',');
        if (tag != "link") throw std::runtime_error("channel csv: expected link header, got '" + line + "'");
        const Index rows = std::stol(rows_s), cols = std::stol(cols_s);
        MatrixXcd m(rows, cols);
        for (Index r = 0; r < rows; ++r) {
            if (!std::getline(in, line)) throw std::runtime_error("channel csv: truncated block " + name);
            std::stringstream row(line);
            std::string re, im;
            for (Index c = 0; c < cols; ++c) {
                if (!std::getline(row, re, ',') || !std::getline(row, im, ','))
                    throw std::runtime_error("channel csv: short row in block " + name);
                m(r, c) = {std::stod(re), std::stod(im)};
            }
        }
        blocks[name] = std::move(m);
    }
    auto take = [&](const char* name) {
        auto it = blocks.find(name);
        if (it == blocks.end()) throw std::runtime_error(std::string("channel csv: missing block ") + name);
        return it->second;
    };
    ChannelSet ch;
    ch.direct = take("direct");
    ch.irs_user = take("irs_user");
    ch.bs_irs = take("bs_irs");
    ch.generator_irs = take("generator_irs").col(0);
    ch.sir_direct = take("sir_direct").col(0);
    ch.sir_irs = take("sir_irs").col(0);
    ch.validate();
    return ch;
}

} // namespace irs::channel
