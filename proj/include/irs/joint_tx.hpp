#pragma once

#include "irs/channel.hpp"
#include "irs/ci_geometry.hpp"
#include "irs/manifold.hpp"
#include "irs/qp.hpp"
#include "irs/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace irs::joint {

struct PrecoderBook {
    std::vector<VectorXcd> precoders; // x_m for every symbol vector

    double total_power() const;
    double average_power() const { return precoders.empty() ? 0.0 : total_power() / static_cast<double>(precoders.size()); }
    Index size() const { return static_cast<Index>(precoders.size()); }
};

/// Compound rows for one or two reflection states.
/// users[s] is K x M with row k = h~_k^H under state s; sir[s] is h~_s^H.
struct CompoundChannels {
    std::vector<MatrixXcd> users;
    std::vector<RowVectorXcd> sir;

    Index states() const { return static_cast<Index>(users.size()); }
    bool with_sir() const { return !sir.empty(); }
};

/// h~^H = h^H + h_r^H diag(theta) G for every receiver and every given reflection.
CompoundChannels compound_channels(const channel::ChannelSet& channels, const std::vector<CirclePoint>& reflections,
                                   bool with_sir);

struct PrecoderSolution {
    VectorXcd x;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// Minimum-norm x with every CI margin >= alpha_k under every state and, with the
/// SIR, Re(h~_{s,0}^H x) <= -beta and Re(h~_{s,1}^H x) >= beta.
PrecoderSolution solve_precoder_pm(const CompoundChannels& channels, const VectorXcd& symbols, const VectorXd& alpha,
                                   double beta, double half_angle, const qp::QpOptions& opts = {});

/// solve_precoder_pm for every symbol vector.
PrecoderBook solve_precoders(const CompoundChannels& channels, const ci::SymbolBook& book, const VectorXd& alpha,
                             double beta, const qp::QpOptions& opts = {}, int threads = 1);

/// Per-(m, receiver, state) CI margins of a design. Column k < K is user k, column K the
/// SIR (its signed real part toward the embedded bit). Rows are m * states + state.
MatrixXd receiver_margins(const CompoundChannels& channels, const PrecoderBook& precoders, const ci::SymbolBook& book);

struct ReflectionOptions {
    manifold::MinimaxOptions solver;
    int extra_starts = 0;
    std::uint64_t seed = 1;
};

struct ReflectionResult {
    CirclePoint theta0;
    CirclePoint theta1;
    double t = 0.0; // min weighted margin, -max objective of the stacked bundle
    int iterations = 0;
};

/// Reflection update at fixed precoders, warm-started from the incumbent (theta0, theta1).
/// Never returns a smaller t than the incumbent's.
ReflectionResult solve_reflection(const PrecoderBook& precoders, const channel::ChannelSet& channels,
                                  const ci::SymbolBook& book, const VectorXd& alpha, double beta, bool with_sir,
                                  const CirclePoint& theta0, const CirclePoint& theta1,
                                  const ReflectionOptions& opts = {});

/// p_m = P_total norms_m^2 / sum norms^2, which equalizes sqrt(p_m) t0 / norms_m.
VectorXd allocate_power(const VectorXd& norms, double t0, double total_power);

struct JointOptions {
    ReflectionOptions reflection;
    qp::QpOptions qp;
    int max_outer = 30;
    double rel_tol = 1e-4;
    int init_retries = 20;
    /// Phase bits of the reflections; continuous when unset.
    std::optional<int> bits;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Starting reflections (theta0, theta1); random feasible draws when unset.
    std::optional<std::pair<CirclePoint, CirclePoint>> initial;
    /// Arbitrary precoder-stage target of the QoS problem.
    double t0 = 1.0;

    void validate() const;
};

struct JointDesignResult {
    PrecoderBook precoders;
    CirclePoint theta0;
    CirclePoint theta1;
    bool with_sir = false;
    std::vector<double> trace; // average power (PM) or balanced t (QoS) per precoder stage
    int iterations = 0;        // outer iterations completed
    bool converged = false;
    bool feasible = false;
    double average_power = 0.0;
    double balanced_t = 0.0;
};

/// Alternating precoder / reflection design minimizing average transmit power.
/// A scenario without reflecting elements runs a single precoder stage.
JointDesignResult joint_power_min(const channel::ChannelSet& channels, const ci::SymbolBook& book,
                                  const VectorXd& alpha, double beta, bool with_sir, const JointOptions& opts = {});

/// Alternating design maximizing the minimum weighted margin at average power P per symbol vector.
JointDesignResult joint_qos_balance(const channel::ChannelSet& channels, const ci::SymbolBook& book,
                                    const VectorXd& rho, double sir_weight, double power, bool with_sir,
                                    const JointOptions& opts = {});

/// iteration,value
void write_trace_csv(std::ostream& out, const JointDesignResult& result);
/// element,theta0_rad,theta1_rad
void write_phases_csv(std::ostream& out, const JointDesignResult& result);

} // namespace irs::joint
