#pragma once

#include "irs/ci_geometry.hpp"
#include "irs/joint_tx.hpp"
#include "irs/passive_tx.hpp"
#include "irs/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace irs::sim {

/// Index of the constellation point with the largest Re(r conj(s)); ties go to the lower index.
int detect_psk(cdouble r, const ci::PskConstellation& constellation);
int detect_psk(cdouble r, int order);

/// 1 if the mean of the L samples has a positive real part, else 0.
int detect_sir(const VectorXcd& received);

struct SerResult {
    double power_dbm = 0.0;
    VectorXd user_ser;
    VectorXd user_half_width;
    double average = 0.0;
    double maximum = 0.0;
    double half_width = 0.0; // of the average
    std::uint64_t trials = 0; // symbol decisions per user
    double sir_ser = std::numeric_limits<double>::quiet_NaN();
    double sir_half_width = 0.0;
    std::uint64_t sir_trials = 0;

    bool has_sir() const { return sir_trials > 0; }
};

/// 95% normal-approximation half-width of a Bernoulli rate estimate.
double half_width(double rate, std::uint64_t n);

struct SimOptions {
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    /// Part of the noise stream key; distinct grid points never share noise.
    std::uint32_t grid_index = 0;
    int threads = 1;
};

/// Standalone system at transmit power P: r_k = sqrt(P) h_k^H theta_m + n_k.
SerResult simulate_passive(const passive::PassiveDesignResult& design, const MatrixXcd& rows,
                           const ci::SymbolBook& book, double power, double noise_power, const SimOptions& opts);

/// Joint system with the design's precoders as given. Each trial draws one secondary
/// bit and L primary symbol vectors; the SIR averages its L noisy samples.
SerResult simulate_joint(const joint::JointDesignResult& design, const channel::ChannelSet& channels,
                         const ci::SymbolBook& book, int embedding_length, double noise_power,
                         const SimOptions& opts);

/// simulate_passive at every grid power (dBm); grid index i keys the noise of point i.
std::vector<SerResult> run_ser(const passive::PassiveDesignResult& design, const MatrixXcd& rows,
                               const ci::SymbolBook& book, const std::vector<double>& power_grid_dbm,
                               double noise_power, const SimOptions& opts);

/// simulate_joint with the precoders rescaled to each grid average power (dBm).
std::vector<SerResult> run_ser(const joint::JointDesignResult& design, const channel::ChannelSet& channels,
                               const ci::SymbolBook& book, const std::vector<double>& power_grid_dbm,
                               int embedding_length, double noise_power, const SimOptions& opts);

/// Uncoded PSK over AWGN at SNR snr (linear, Es / N0 with unit symbol energy).
SerResult simulate_awgn_psk(int order, double snr, const SimOptions& opts);

/// power_dBm,user_id,ser,half_width,trials with user_id a user index, "avg", "max" or "sir".
void write_ser_csv(std::ostream& out, const std::vector<SerResult>& results, bool header = true);

} // namespace irs::sim
