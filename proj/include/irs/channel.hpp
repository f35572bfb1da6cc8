#pragma once

#include "irs/rng.hpp"
#include "irs/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace irs::channel {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Large-scale exponent and Rician factor of one link. rician_factor = 0 means NLoS only.
struct LinkModel {
    double exponent = 3.0;
    double rician_factor = 0.0;
};

/// Stream identifiers for keyed channel draws.
enum class Link : std::uint32_t {
    bs_irs = 1,
    irs_user = 2,
    bs_user = 3,
    generator_irs = 4,
    irs_sir = 5,
    bs_sir = 6,
    geometry = 7,
};

/// Scenario geometry and propagation parameters.
///
/// Nodes live in a 2-D plane. Uniform linear arrays at the BS and the IRS are
/// aligned with the y axis, so angles are measured from the +x broadside.
/// Users (and the SIR) sit on circles around the IRS at random bearings drawn
/// per realization inside [-user_sector, user_sector].
struct ScenarioConfig {
    int n_bs_antennas = 6;
    int n_irs_elements = 100;
    int n_users = 3;
    int constellation_order = 4;
    double noise_power = 1e-11; // -80 dBm
    double pathloss_ref_gain = 1e-3; // -30 dB
    double pathloss_ref_distance = 1.0;

    Point2 bs{0.0, 0.0};
    Point2 irs{8.0, 6.0};
    double generator_distance = 1.0;
    double user_distance = 100.0;
    double sir_distance = 20.0;
    double user_sector = pi / 3.0;

    LinkModel bs_irs{2.5, 2.0};
    LinkModel irs_user{3.0, 0.0};
    LinkModel bs_user{3.0, 0.0};
    LinkModel generator_irs{2.0, 2.0};
    LinkModel irs_sir{3.0, 0.0};
    LinkModel bs_sir{3.0, 0.0};

    std::uint64_t rng_seed = 1;
    int embedding_length = 8;

    /// Standalone passive transmitter: Rician fading on every link.
    static ScenarioConfig standalone();
    /// Joint reflection + secondary transmission: BS-IRS Rician, others NLoS.
    static ScenarioConfig joint();

    double noise_amplitude() const { return std::sqrt(noise_power); }
    void validate() const;
};

/// All channels of one realization. Rows of the matrices hold the usual
/// column vectors transposed (row k of irs_user is h_rk^T), so h_rk^H is
/// irs_user.row(k).conjugate().
struct ChannelSet {
    MatrixXcd direct;        // K x M
    MatrixXcd irs_user;      // K x N
    MatrixXcd bs_irs;        // N x M
    VectorXcd generator_irs; // N
    VectorXcd sir_direct;    // M
    VectorXcd sir_irs;       // N

    Index users() const { return irs_user.rows(); }
    Index elements() const { return irs_user.cols(); }
    Index antennas() const { return direct.cols(); }
    void validate() const;
};

double path_loss(double d, double exponent, double ref_gain, double ref_distance);

/// Half-wavelength ULA response toward bearing `angle` (radians from broadside).
VectorXcd ula_steering(Index n, double angle);

/// sqrt(avg_gain) [sqrt(k/(k+1)) los + sqrt(1/(k+1)) W], W ~ CN(0, 1) i.i.d.
MatrixXcd draw_rician(Index rows, Index cols, double rician_factor, const MatrixXcd& los,
                      double avg_gain, CounterRng rng);
MatrixXcd draw_rician(Index rows, Index cols, double rician_factor, const MatrixXcd& los,
                      double avg_gain, std::uint64_t seed);

/// h_k with h_k^H = h_rk^H diag(h_g).
VectorXcd effective_channel_standalone(const VectorXcd& h_rk, const VectorXcd& h_g);

/// Rows h_k^H for all users of the standalone system (K x N).
MatrixXcd standalone_rows(const ChannelSet& channels);

/// h~_k with h~_k^H = h_k^H + h_rk^H diag(theta) G.
VectorXcd compound_channel_joint(const VectorXcd& h_k, const VectorXcd& h_rk, const MatrixXcd& G,
                                 const VectorXcd& theta);

/// Draws realization `trial` of the scenario.
ChannelSet generate(const ScenarioConfig& config, std::uint64_t trial);

void write_csv(std::ostream& out, const ChannelSet& channels);
ChannelSet read_csv(std::istream& in);

} // namespace irs::channel
