#pragma once

#include "irs/ci_geometry.hpp"
#include "irs/discrete.hpp"
#include "irs/manifold.hpp"
#include "irs/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irs::passive {

/// How the per-symbol-vector reflection subproblem is solved.
struct Strategy {
    enum class Kind { continuous, quantize, bnb, heuristic };

    Kind kind = Kind::continuous;
    int bits = 0;

    /// "continuous", "quantize-B", "bnb-B" or "heuristic-B".
    static Strategy parse(const std::string& text);
    std::string name() const;

    bool operator==(const Strategy&) const = default;
};

struct PassiveOptions {
    manifold::MinimaxOptions solver;
    /// Extra random starts per subproblem on top of the matched-phase start.
    int extra_starts = 0;
    std::uint64_t node_budget = 2'000'000;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Per-m starting reflections; the incumbent is kept if the solver cannot beat it.
    std::optional<std::vector<CirclePoint>> warm_start;
};

struct PassiveDesignResult {
    Strategy strategy;
    std::vector<CirclePoint> reflections; // theta_m for every symbol vector
    MatrixXd user_margins;                // Omega^K x K weighted margins at unit power
    VectorXd per_m;                       // min over users, per symbol vector
    double margin_t = 0.0;
    double min_power = 0.0;               // watts, 1 / margin_t^2
    bool feasible = false;
    int iterations = 0;                   // RCG iterations summed over subproblems
    bool certified = true;                // every B&B search completed
};

PassiveDesignResult design_power_min(const MatrixXcd& rows, const VectorXd& alpha, const ci::SymbolBook& book,
                                     const Strategy& strategy, const PassiveOptions& opts = {});

/// One continuous solve per subproblem shared by several strategies; results in strategy order.
std::vector<PassiveDesignResult> design_power_min(const MatrixXcd& rows, const VectorXd& alpha,
                                                  const ci::SymbolBook& book, const std::vector<Strategy>& strategies,
                                                  const PassiveOptions& opts = {});

/// Max-min weighted QoS at power P; reduces to design_power_min with alpha_k = 1 / (rho_k sqrt(P)).
/// margin_t is then the balanced weighted margin at power P.
PassiveDesignResult design_qos_balance(const MatrixXcd& rows, const VectorXd& rho, double power,
                                       const ci::SymbolBook& book, const Strategy& strategy,
                                       const PassiveOptions& opts = {});

std::vector<PassiveDesignResult> design_qos_balance(const MatrixXcd& rows, const VectorXd& rho, double power,
                                                    const ci::SymbolBook& book, const std::vector<Strategy>& strategies,
                                                    const PassiveOptions& opts = {});

VectorXd qos_alpha(const VectorXd& rho, double power);

/// Weighted margins -max(f_k, g_k) per user of one subproblem.
VectorXd user_margins(const ci::CoefficientBundle& bundle, const VectorXcd& theta);

/// m,k,margin
void write_margins_csv(std::ostream& out, const PassiveDesignResult& result);

} // namespace irs::passive
