#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace irs {

using Index = Eigen::Index;
using cdouble = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;
using RowVectorXcd = Eigen::RowVectorXcd;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;

/// Raised when a convex subproblem has no feasible point.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an enumeration would exceed its memory guard.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Power conversions. Internal math is always in linear watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// A vector of unit-modulus complex entries.
class CirclePoint {
public:
    static constexpr double tolerance = 1e-9;

    CirclePoint() = default;

    explicit CirclePoint(VectorXcd values) : values_(std::move(values))
    {
        for (Index n = 0; n < values_.size(); ++n) {
            if (!(std::abs(std::abs(values_(n)) - 1.0) <= tolerance)) {
                throw std::invalid_argument("CirclePoint: entry " + std::to_string(n) +
                                            " is not unit modulus");
            }
        }
    }

    static CirclePoint ones(Index n) { return CirclePoint(VectorXcd::Ones(n)); }

    template <typename Derived>
    static CirclePoint from_phases(const Eigen::MatrixBase<Derived>& phases)
    {
        VectorXcd v(phases.size());
        for (Index n = 0; n < phases.size(); ++n) v(n) = std::polar(1.0, double(phases(n)));
        CirclePoint p;
        p.values_ = std::move(v);
        return p;
    }

    /// Concatenation [a; b].
    static CirclePoint stack(const CirclePoint& a, const CirclePoint& b)
    {
        VectorXcd v(a.size() + b.size());
        v << a.values_, b.values_;
        CirclePoint p;
        p.values_ = std::move(v);
        return p;
    }

    CirclePoint segment(Index start, Index n) const
    {
        CirclePoint p;
        p.values_ = values_.segment(start, n);
        return p;
    }

    const VectorXcd& values() const { return values_; }
    Index size() const { return values_.size(); }
    cdouble operator()(Index n) const { return values_(n); }

    VectorXd phases() const
    {
        VectorXd out(values_.size());
        for (Index n = 0; n < values_.size(); ++n) out(n) = std::arg(values_(n));
        return out;
    }

    double max_modulus_error() const
    {
        double err = 0.0;
        for (Index n = 0; n < values_.size(); ++n)
            err = std::max(err, std::abs(std::abs(values_(n)) - 1.0));
        return err;
    }

private:
    VectorXcd values_;
};

inline int resolve_threads(int requested)
{
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n). Each index is visited exactly once; results
/// must be written to pre-assigned slots by the caller.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn)
{
    const int workers = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace irs
