#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature with a divergence guard: a node
// hitting a non-finite integrand value, or exhaustion of the subdivision
// budget, surfaces as a NonIntegrable outcome instead of a number.

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "dualdiv/common.hpp"

namespace dualdiv {

enum class QuadStatus { Converged, BudgetExceeded, SingularIntegrand };

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    QuadStatus status = QuadStatus::Converged;
    int panels = 0;
    bool ok() const { return status == QuadStatus::Converged; }
};

namespace detail {

// K15 abscissae (positive half) and weights; rows 0..3 also carry G7 weights.
inline constexpr double kGK15Nodes[8] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
    0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
inline constexpr double kG7Weights[4] = {0.417959183673469, 0.381830050505119,
                                         0.279705391489277, 0.129484966168870};
inline constexpr double kK15Weights[8] = {0.209482141084728, 0.190350578064785,
                                          0.140653259715525, 0.063092092629979,
                                          0.204432940075298, 0.169004726639267,
                                          0.104790010322250, 0.022935322010529};

struct PanelEval {
    double value = 0.0;
    double error = 0.0;
    bool singular = false;
};

template <class F>
PanelEval gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    if (!std::isfinite(fc)) return {0.0, 0.0, true};
    double k15 = kK15Weights[0] * fc;
    double g7 = kG7Weights[0] * fc;
    for (int i = 1; i < 8; ++i) {
        double dx = h * kGK15Nodes[i];
        double f1 = f(c + dx);
        double f2 = f(c - dx);
        if (!std::isfinite(f1) || !std::isfinite(f2)) return {0.0, 0.0, true};
        double s = f1 + f2;
        k15 += kK15Weights[i] * s;
        if (i < 4) g7 += kG7Weights[i] * s;
    }
    k15 *= h;
    g7 *= h;
    double diff = std::fabs(k15 - g7);
    double err = diff * std::sqrt(diff) * 200.0;  // standard QUADPACK-style estimate
    err = std::min(err, std::fabs(k15 - g7) * 15.0 + 1e-300);
    return {k15, err, false};
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_panels = 2000;
    int initial_panels = 8;
};

inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     const QuadOptions& opt = {}) {
    QuadResult out;
    if (!(b > a)) return out;
    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0;
    int panels = std::max(1, opt.initial_panels);
    for (int i = 0; i < panels; ++i) {
        double pa = a + (b - a) * i / panels;
        double pb = a + (b - a) * (i + 1) / panels;
        auto e = detail::gk15(f, pa, pb);
        if (e.singular) {
            out.status = QuadStatus::SingularIntegrand;
            return out;
        }
        total += e.value;
        total_err += e.error;
        heap.push({pa, pb, e.value, e.error});
    }
    out.panels = panels;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (out.panels >= opt.max_panels || heap.empty()) {
            out.value = total;
            out.error = total_err;
            out.status = QuadStatus::BudgetExceeded;
            return out;
        }
        detail::Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        auto e1 = detail::gk15(f, worst.a, mid);
        auto e2 = detail::gk15(f, mid, worst.b);
        if (e1.singular || e2.singular) {
            out.status = QuadStatus::SingularIntegrand;
            return out;
        }
        total += e1.value + e2.value - worst.value;
        total_err += e1.error + e2.error - worst.error;
        heap.push({worst.a, mid, e1.value, e1.error});
        heap.push({mid, worst.b, e2.value, e2.error});
        out.panels += 1;
    }
    out.value = total;
    out.error = total_err;
    out.status = QuadStatus::Converged;
    return out;
}

/// Tensor-product version for two-dimensional observation spaces: the outer
/// integral adapts over y while each evaluation integrates over x.
inline QuadResult integrate_adaptive_2d(const std::function<double(double, double)>& f,
                                        double ax, double bx, double ay, double by,
                                        const QuadOptions& opt = {}) {
    bool inner_failed = false;
    QuadOptions inner_opt = opt;
    inner_opt.rel_tol = std::max(opt.rel_tol * 0.1, 1e-12);
    auto outer = [&](double y) {
        if (inner_failed) return 0.0;
        auto r = integrate_adaptive([&](double x) { return f(x, y); }, ax, bx, inner_opt);
        if (!r.ok()) {
            inner_failed = true;
            return std::numeric_limits<double>::quiet_NaN();
        }
        return r.value;
    };
    auto res = integrate_adaptive(outer, ay, by, opt);
    if (inner_failed && res.status == QuadStatus::Converged)
        res.status = QuadStatus::SingularIntegrand;
    return res;
}

}  // namespace dualdiv
