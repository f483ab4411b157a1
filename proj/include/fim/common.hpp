#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fim {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Paths-by-times batches; one path per row.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Open interval (lo, hi) with the +-inf conventions; empty means (a,a).
struct Interval {
    double lo = -kInf;
    double hi = kInf;
    bool empty = false;

    bool contains(double x) const { return !empty && x > lo && x < hi; }
};

// Runs fn over [0,n) split into contiguous chunks, one per worker.
// Results must not depend on the partition; callers write disjoint slots.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = hw > 0 ? hw : 1;
    threads = static_cast<int>(std::min<std::int64_t>(threads, n));
    if (threads <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::int64_t lo = t * chunk;
        std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace fim
