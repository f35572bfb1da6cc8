#include "irs/discrete.hpp"

#include <limits>
#include <numeric>

namespace irs::discrete {

PhaseGrid::PhaseGrid(int bits_) : bits(bits_)
{
    if (bits < 1 || bits > 16) throw std::invalid_argument("PhaseGrid: bits must be in [1, 16]");
    const Index count = Index(1) << bits;
    resolution = 2.0 * pi / static_cast<double>(count);
    points.resize(count);
    for (Index j = 0; j < count; ++j) points(j) = std::polar(1.0, static_cast<double>(j + 1) * resolution);
    points(count - 1) = 1.0;
}

Index PhaseGrid::slot(long long k) const
{
    const long long count = static_cast<long long>(points.size());
    long long s = (k - 1) % count;
    if (s < 0) s += count;
    return static_cast<Index>(s);
}

CirclePoint quantize(const CirclePoint& theta, int bits)
{
    const PhaseGrid grid(bits);
    VectorXcd out(theta.size());
    for (Index n = 0; n < theta.size(); ++n) {
        const long long k = std::llround(std::arg(theta(n)) / grid.resolution);
        out(n) = grid.points(grid.slot(k));
    }
    return CirclePoint(std::move(out));
}

std::vector<Index> grid_slots(const CirclePoint& theta, const PhaseGrid& grid)
{
    std::vector<Index> slots(theta.size());
    for (Index n = 0; n < theta.size(); ++n) {
        const double ratio = std::arg(theta(n)) / grid.resolution;
        const long long k = std::llround(ratio);
        if (std::abs(ratio - static_cast<double>(k)) > 1e-9)
            throw std::invalid_argument("grid_slots: element " + std::to_string(n) + " is not on the grid");
        slots[n] = grid.slot(k);
    }
    return slots;
}

namespace {

VectorXcd assemble(const std::vector<Index>& slots, const PhaseGrid& grid)
{
    VectorXcd v(static_cast<Index>(slots.size()));
    for (std::size_t n = 0; n < slots.size(); ++n) v(static_cast<Index>(n)) = grid.points(slots[n]);
    return v;
}

class BranchAndBound {
public:
    BranchAndBound(const ci::CoefficientBundle& bundle, const PhaseGrid& grid, std::uint64_t budget)
        : grid_(grid), budget_(budget)
    {
        const Index I = bundle.pairs();
        const Index N = bundle.dim();
        const Index Q = grid.size();
        rows_.resize(2 * I, N);
        rows_ << bundle.b_rows, bundle.c_rows;
        offsets_.resize(2 * I);
        offsets_ << bundle.offsets_w, bundle.offsets_z;

        // Contribution of element n at grid slot q to every row.
        contrib_.resize(N);
        for (Index n = 0; n < N; ++n) {
            contrib_[n].resize(2 * I, Q);
            for (Index q = 0; q < Q; ++q) contrib_[n].col(q) = (rows_.col(n) * grid.points(q)).real();
        }

        order_.resize(N);
        std::iota(order_.begin(), order_.end(), Index(0));
        const VectorXd norms = rows_.colwise().norm().transpose();
        std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

        // suffix_.col(d) = sum over depths >= d of each row's best-case contribution.
        suffix_ = MatrixXd::Zero(2 * I, N + 1);
        for (Index d = N - 1; d >= 0; --d)
            suffix_.col(d) = suffix_.col(d + 1) + contrib_[order_[d]].rowwise().minCoeff();

        slots_.assign(N, 0);
        dual_ascent(bundle);
    }

    /// Best grid point met while maximizing the dual, for use as an incumbent seed.
    const std::vector<Index>& dual_candidate() const { return dual_slots_; }

    void seed(const std::vector<Index>& slots, double value)
    {
        if (!best_slots_.empty() && value >= best_) return;
        best_slots_ = slots;
        best_ = value;
    }

    void run()
    {
        const Index N = static_cast<Index>(order_.size());
        partial_.assign(N + 1, VectorXd::Zero(rows_.rows()));
        children_.assign(N, std::vector<std::pair<double, Index>>(grid_.size()));
        dive(0);
    }

    const std::vector<Index>& best_slots() const { return best_slots_; }
    bool exhausted() const { return exhausted_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    // Any convex combination w of the rows bounds the max from below, and is
    // separable over elements: max_i f_i >= w'(offsets) + sum_n min_q w' contrib_n(:, q).
    // Exponentiated-gradient ascent on w; each iterate's minimizer is a grid point.
    void dual_ascent(const ci::CoefficientBundle& bundle)
    {
        const Index rows = rows_.rows(), N = static_cast<Index>(order_.size());
        VectorXd w = VectorXd::Constant(rows, 1.0 / static_cast<double>(rows));
        weights_ = w;
        double best_dual = -std::numeric_limits<double>::infinity();
        double best_primal = std::numeric_limits<double>::infinity();
        std::vector<Index> slots(N);
        const double scale = std::max(bundle.row_scale(), std::numeric_limits<double>::min());
        constexpr int iterations = 200;
        for (int it = 0; it < iterations; ++it) {
            VectorXd value = offsets_;
            double dual = w.dot(offsets_);
            for (Index n = 0; n < N; ++n) {
                Index q;
                dual += (w.transpose() * contrib_[n]).minCoeff(&q);
                slots[n] = q;
                value += contrib_[n].col(q);
            }
            if (dual > best_dual) {
                best_dual = dual;
                weights_ = w;
            }
            const double primal = value.maxCoeff();
            if (primal < best_primal) {
                best_primal = primal;
                dual_slots_ = slots;
            }
            // Step in units of the objective scale, decaying to settle on the simplex.
            const double eta = 4.0 / (scale * std::sqrt(static_cast<double>(N)) * std::sqrt(1.0 + it));
            w = (w.array() * ((value.array() - value.maxCoeff()) * eta).exp()).matrix();
            w /= w.sum();
        }
        dual_suffix_ = VectorXd::Zero(N + 1);
        for (Index d = N - 1; d >= 0; --d)
            dual_suffix_(d) = dual_suffix_(d + 1) + (weights_.transpose() * contrib_[order_[d]]).minCoeff();
    }

    void dive(Index depth)
    {
        const Index N = static_cast<Index>(order_.size());
        const VectorXd& partial = partial_[depth];
        if (depth == N) {
            const double value = (partial + offsets_).maxCoeff();
            if (value < best_ || best_slots_.empty()) {
                best_ = value;
                best_slots_ = slots_;
            }
            return;
        }
        const Index n = order_[depth];
        auto& children = children_[depth];
        for (Index q = 0; q < grid_.size(); ++q) {
            const double rows_bound = (partial + contrib_[n].col(q) + offsets_ + suffix_.col(depth + 1)).maxCoeff();
            const double dual_bound = weights_.dot(partial + contrib_[n].col(q) + offsets_) + dual_suffix_(depth + 1);
            children[q] = {std::max(rows_bound, dual_bound), q};
        }
        std::stable_sort(children.begin(), children.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [bound, q] : children) {
            if (!best_slots_.empty() && bound >= best_) return;
            if (!best_slots_.empty() && nodes_ >= budget_) {
                exhausted_ = true;
                return;
            }
            ++nodes_;
            slots_[n] = q;
            partial_[depth + 1] = partial + contrib_[n].col(q);
            dive(depth + 1);
            if (exhausted_) return;
        }
    }

    const PhaseGrid& grid_;
    std::uint64_t budget_;
    MatrixXcd rows_;
    VectorXd offsets_;
    std::vector<MatrixXd> contrib_;
    std::vector<Index> order_;
    MatrixXd suffix_;
    std::vector<Index> slots_;
    std::vector<VectorXd> partial_;
    std::vector<std::vector<std::pair<double, Index>>> children_;
    std::vector<Index> best_slots_;
    VectorXd weights_;
    VectorXd dual_suffix_;
    std::vector<Index> dual_slots_;
    double best_ = std::numeric_limits<double>::infinity();
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
};

} // namespace

BnbResult branch_and_bound(const ci::CoefficientBundle& bundle, int bits, const BnbOptions& opts)
{
    if (bits < 1 || bits > opts.max_bits)
        throw std::invalid_argument("branch_and_bound: bits must be in [1, " + std::to_string(opts.max_bits) + "]");
    const PhaseGrid grid(bits);
    BranchAndBound search(bundle, grid, opts.node_budget);
    if (opts.incumbent) {
        if (opts.incumbent->size() != bundle.dim())
            throw std::invalid_argument("branch_and_bound: incumbent has wrong length");
        search.seed(grid_slots(*opts.incumbent, grid), ci::max_objective(bundle, opts.incumbent->values()));
    }
    {
        const CirclePoint candidate(assemble(search.dual_candidate(), grid));
        const RefineResult refined = coordinate_refine(candidate, bundle, bits);
        search.seed(grid_slots(refined.theta, grid), ci::max_objective(bundle, refined.theta.values()));
    }
    search.run();

    BnbResult out;
    out.theta = CirclePoint(assemble(search.best_slots(), grid));
    out.value = ci::max_objective(bundle, out.theta.values());
    out.certified = !search.exhausted();
    out.nodes = search.nodes();
    return out;
}

RefineResult coordinate_refine(const CirclePoint& start, const ci::CoefficientBundle& bundle, int bits)
{
    if (start.size() != bundle.dim()) throw std::invalid_argument("coordinate_refine: start has wrong length");
    const PhaseGrid grid(bits);
    const Index N = bundle.dim();
    const Index Q = grid.size();
    constexpr int max_sweeps = 1000;

    std::vector<Index> slots = grid_slots(quantize(start, bits), grid);
    VectorXcd theta = assemble(slots, grid);
    const double scale = bundle.row_scale();

    RefineResult out;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        ++out.sweeps;
        bool changed = false;
        VectorXcd sb = bundle.b_rows * theta;
        VectorXcd sc = bundle.c_rows * theta;
        for (Index n = 0; n < N; ++n) {
            // Partial sums with element n removed.
            const VectorXcd rest_b = sb - bundle.b_rows.col(n) * theta(n);
            const VectorXcd rest_c = sc - bundle.c_rows.col(n) * theta(n);
            auto objective = [&](Index q) {
                const cdouble v = grid.points(q);
                const double fb = ((rest_b + bundle.b_rows.col(n) * v).real() + bundle.offsets_w).maxCoeff();
                const double fc = ((rest_c + bundle.c_rows.col(n) * v).real() + bundle.offsets_z).maxCoeff();
                return std::max(fb, fc);
            };
            const Index current = slots[n];
            const double current_value = objective(current);
            const double margin = 1e-13 * (std::abs(current_value) + scale);
            Index best = current;
            double best_value = current_value;
            Index best_distance = 0;
            for (Index q = 0; q < Q; ++q) {
                if (q == current) continue;
                const double value = objective(q);
                const Index raw = std::abs(q - current);
                const Index dist = std::min(raw, Q - raw);
                if (value < best_value - margin || (best != current && std::abs(value - best_value) <= margin &&
                                                    value < current_value - margin && dist < best_distance)) {
                    best = q;
                    best_value = value;
                    best_distance = dist;
                }
            }
            if (best != current) {
                slots[n] = best;
                theta(n) = grid.points(best);
                sb = rest_b + bundle.b_rows.col(n) * theta(n);
                sc = rest_c + bundle.c_rows.col(n) * theta(n);
                changed = true;
            }
        }
        if (!changed) break;
    }
    out.theta = CirclePoint(std::move(theta));
    out.value = ci::max_objective(bundle, out.theta.values());
    return out;
}

} // namespace irs::discrete
