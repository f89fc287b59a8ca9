#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace dualdiv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval, possibly unbounded on either side.
struct Interval {
    double lo = -kInf;
    double hi = kInf;
    double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Per-coordinate box constraint.
using Box = std::vector<Interval>;

inline Vec clamp_to_box(const Vec& x, const Box& box) {
    Vec y = x;
    for (int i = 0; i < y.size(); ++i) y[i] = box[i].clamp(y[i]);
    return y;
}

inline Box uniform_box(int dim, double lo, double hi) {
    return Box(static_cast<std::size_t>(dim), Interval{lo, hi});
}

inline Vec vec1(double a) {
    Vec v(1);
    v[0] = a;
    return v;
}

inline Vec vec2(double a, double b) {
    Vec v(2);
    v[0] = a;
    v[1] = b;
    return v;
}

/// Shortest round-trip decimal rendering (CSV output contract).
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline int worker_count() {
    if (const char* env = std::getenv("DUALDIV_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count). Work is striped across threads; callers
/// must write results into per-index slots to keep output deterministic.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::int64_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dualdiv
