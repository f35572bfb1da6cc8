#pragma once

#include "irs/ci_geometry.hpp"
#include "irs/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace irs::discrete {

/// Uniform B-bit phase grid q = [e^{j Delta}, e^{j 2 Delta}, ..., e^{j 2 pi}].
/// The last point is stored as exactly 1 (2 pi and 0 are the same phase).
struct PhaseGrid {
    int bits = 1;
    double resolution = pi;
    VectorXcd points;

    explicit PhaseGrid(int bits);

    Index size() const { return points.size(); }
    /// Position in `points` of the phase k * Delta (any integer k).
    Index slot(long long k) const;
};

/// Nearest grid phase per element: round(angle / Delta) * Delta.
CirclePoint quantize(const CirclePoint& theta, int bits);

/// Grid slot of each element of an on-grid point.
std::vector<Index> grid_slots(const CirclePoint& theta, const PhaseGrid& grid);

struct BnbOptions {
    std::uint64_t node_budget = 2'000'000;
    /// Known grid assignment; its objective becomes the initial upper bound.
    std::optional<CirclePoint> incumbent;
    /// Largest bit width accepted (exhaustive certification grows as 2^{B N}).
    int max_bits = 2;
};

struct BnbResult {
    CirclePoint theta;
    double value = 0.0;
    bool certified = false;
    std::uint64_t nodes = 0;
};

/// Global minimizer of max_i max(f_i, g_i) over grid-valued theta, by depth-first
/// branch and bound. Elements are branched in descending coefficient-norm order and
/// a partial assignment is bounded by letting every unassigned element take, per
/// row, its most favourable grid phase. If the node budget runs out the best point
/// found so far is returned with certified = false.
BnbResult branch_and_bound(const ci::CoefficientBundle& bundle, int bits, const BnbOptions& opts = {});

struct RefineResult {
    CirclePoint theta;
    double value = 0.0;
    int sweeps = 0;
};

/// Coordinate descent over the grid starting from quantize(start, bits). Each step
/// sets one element to its exhaustive best grid phase with the others fixed; the
/// incumbent phase wins ties. Stops after a sweep without change.
RefineResult coordinate_refine(const CirclePoint& start, const ci::CoefficientBundle& bundle, int bits);

} // namespace irs::discrete
