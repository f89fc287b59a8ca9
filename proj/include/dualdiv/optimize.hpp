#pragma once

// Box-constrained smooth maximization (projected BFGS with Armijo
// backtracking) and the nested min-max scheme used by the minimum dual
// divergence estimators. Objectives may return +/-inf; non-finite values are
// treated as infeasible and the line search backs away from them.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dualdiv/common.hpp"

namespace dualdiv {

struct OptimizeReport {
    Vec argopt;
    double value = -kInf;
    double gradient_norm = kInf;
    int iterations = 0;
    bool converged = false;
    std::vector<bool> boundary_active;
};

struct Eval {
    double value = 0.0;
    Vec grad;
};

using Objective = std::function<Eval(const Vec&)>;

namespace detail {

inline Vec projected_gradient_ascent(const Vec& x, const Vec& g, const Box& box, double tolb) {
    Vec pg = g;
    for (int i = 0; i < x.size(); ++i) {
        if (x[i] <= box[i].lo + tolb && g[i] < 0.0) pg[i] = 0.0;
        if (x[i] >= box[i].hi - tolb && g[i] > 0.0) pg[i] = 0.0;
    }
    return pg;
}

}  // namespace detail

/// Maximizes a smooth objective over a box. Returns the best iterate found;
/// max_iter exhaustion reports converged=false rather than aborting.
inline OptimizeReport maximize(const Objective& objective, const Box& box, const Vec& init,
                               double tol = 1e-8, int max_iter = 300) {
    const int d = static_cast<int>(init.size());
    const double armijo_c = 1e-4;
    OptimizeReport rep;
    rep.boundary_active.assign(static_cast<std::size_t>(d), false);

    Vec x = clamp_to_box(init, box);
    Eval fe = objective(x);
    rep.argopt = x;
    rep.value = fe.value;
    if (!std::isfinite(fe.value)) {
        rep.value = -kInf;
        return rep;
    }

    Mat H = Mat::Identity(d, d);
    Vec x_prev, g_prev;
    bool have_prev = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        rep.iterations = iter + 1;
        double tolb = 1e-10;
        Vec pg = detail::projected_gradient_ascent(x, fe.grad, box, tolb);
        rep.gradient_norm = pg.norm();
        if (rep.gradient_norm <= tol) {
            rep.converged = true;
            break;
        }

        if (have_prev) {
            Vec s = x - x_prev;
            Vec y = fe.grad - g_prev;  // ascent: curvature condition is s'y < 0
            double sy = s.dot(y);
            if (sy < -1e-12 * s.norm() * y.norm()) {
                // BFGS update on the negated problem: with yb = -y, s'yb > 0.
                Vec yb = -y;
                double rho = 1.0 / s.dot(yb);
                Mat I = Mat::Identity(d, d);
                H = (I - rho * s * yb.transpose()) * H * (I - rho * yb * s.transpose()) +
                    rho * s * s.transpose();
            } else {
                H = Mat::Identity(d, d);
            }
        }

        Vec dir = H * pg;
        if (dir.dot(pg) <= 0.0) dir = pg;

        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vec xn = clamp_to_box(x + step * dir, box);
            Vec dx = xn - x;
            if (dx.norm() == 0.0) break;
            Eval fn = objective(xn);
            if (std::isfinite(fn.value) && fn.value >= fe.value + armijo_c * pg.dot(dx)) {
                x_prev = x;
                g_prev = fe.grad;
                have_prev = true;
                x = xn;
                fe = fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Try a plain projected-gradient step before giving up.
            double small = 1e-8 / std::max(1.0, pg.norm());
            Vec xn = clamp_to_box(x + small * pg, box);
            Eval fn = objective(xn);
            if ((xn - x).norm() > 0.0 && std::isfinite(fn.value) && fn.value > fe.value) {
                x = xn;
                fe = fn;
                have_prev = false;
                H = Mat::Identity(d, d);
            } else {
                break;
            }
        }
        if (fe.value > rep.value) {
            rep.value = fe.value;
            rep.argopt = x;
        }
    }

    if (fe.value >= rep.value) {
        rep.value = fe.value;
        rep.argopt = x;
    }
    Vec pg = detail::projected_gradient_ascent(rep.argopt, objective(rep.argopt).grad, box, 1e-10);
    rep.gradient_norm = pg.norm();
    if (rep.gradient_norm <= tol) rep.converged = true;
    for (int i = 0; i < d; ++i)
        rep.boundary_active[static_cast<std::size_t>(i)] =
            (rep.argopt[i] - box[i].lo <= tol) || (box[i].hi - rep.argopt[i] <= tol);
    return rep;
}

inline OptimizeReport minimize(const Objective& objective, const Box& box, const Vec& init,
                               double tol = 1e-8, int max_iter = 300) {
    auto neg = [&objective](const Vec& x) {
        Eval e = objective(x);
        return Eval{-e.value, e.grad.size() ? Vec(-e.grad) : e.grad};
    };
    OptimizeReport rep = maximize(neg, box, init, tol, max_iter);
    rep.value = -rep.value;
    return rep;
}

struct MinimaxResult {
    Vec theta;
    Vec alpha;
    double value = kInf;
    OptimizeReport outer_report;
    OptimizeReport inner_report;
};

struct MinimaxOptions {
    double tol = 1e-8;
    int max_iter = 200;
    int pattern_rounds = 24;
};

/// Nested min-max: the outer minimization of the inner-optimal value function
/// runs a coordinate pattern search refined by finite-difference quasi-Newton;
/// the inner problem is solved to tol/10 at every outer evaluation and warm
/// started from the previous maximizer.
inline MinimaxResult minimax(
    const std::function<Objective(const Vec&)>& inner_for_theta, const Box& outer_box,
    const Box& inner_box, const Vec& theta_init, const Vec& alpha_init,
    const MinimaxOptions& opt = {}) {
    MinimaxResult res;
    Vec warm_alpha = clamp_to_box(alpha_init, inner_box);
    const double inner_tol = opt.tol / 10.0;

    auto value_at = [&](const Vec& theta) {
        OptimizeReport inner = maximize(inner_for_theta(theta), inner_box, warm_alpha, inner_tol,
                                        opt.max_iter);
        if (inner.argopt.size() > 0 && std::isfinite(inner.value)) warm_alpha = inner.argopt;
        return inner;
    };

    Vec theta = clamp_to_box(theta_init, outer_box);
    OptimizeReport inner = value_at(theta);
    double best = inner.value;
    res.theta = theta;
    res.alpha = inner.argopt;
    res.inner_report = inner;

    // Phase 1: coordinate pattern search.
    const int d = static_cast<int>(theta.size());
    Vec step(d);
    for (int i = 0; i < d; ++i) {
        double w = outer_box[i].width();
        step[i] = std::isfinite(w) ? std::max(0.05 * w, 1e-6) : std::max(0.25, 0.25 * std::fabs(theta[i]));
        step[i] = std::min(step[i], 1.0);
    }
    for (int round = 0; round < opt.pattern_rounds; ++round) {
        bool improved = false;
        for (int i = 0; i < d; ++i) {
            for (double sgn : {+1.0, -1.0}) {
                Vec cand = theta;
                cand[i] = outer_box[i].clamp(cand[i] + sgn * step[i]);
                if (cand[i] == theta[i]) continue;
                OptimizeReport ir = value_at(cand);
                if (std::isfinite(ir.value) && ir.value < best - 1e-14) {
                    theta = cand;
                    best = ir.value;
                    res.theta = theta;
                    res.alpha = ir.argopt;
                    res.inner_report = ir;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step.maxCoeff() < std::sqrt(opt.tol)) break;
        }
    }

    // Phase 2: quasi-Newton refinement with central finite differences on the
    // value function.
    const double fd_base = std::cbrt(std::numeric_limits<double>::epsilon());
    auto fd_objective = [&](const Vec& th) {
        OptimizeReport ir = value_at(th);
        Eval e;
        e.value = ir.value;
        e.grad = Vec::Zero(d);
        if (!std::isfinite(ir.value)) return e;
        for (int i = 0; i < d; ++i) {
            double h = fd_base * std::max(1.0, std::fabs(th[i]));
            Vec tp = th, tm = th;
            tp[i] = outer_box[i].clamp(th[i] + h);
            tm[i] = outer_box[i].clamp(th[i] - h);
            double vp = value_at(tp).value;
            double vm = value_at(tm).value;
            if (std::isfinite(vp) && std::isfinite(vm) && tp[i] > tm[i])
                e.grad[i] = (vp - vm) / (tp[i] - tm[i]);
        }
        return e;
    };
    OptimizeReport outer = minimize(fd_objective, outer_box, theta, opt.tol, opt.max_iter);
    OptimizeReport inner_final = value_at(outer.argopt);
    if (std::isfinite(inner_final.value) && inner_final.value <= best) {
        res.theta = outer.argopt;
        res.alpha = inner_final.argopt;
        res.inner_report = inner_final;
        best = inner_final.value;
    }
    res.value = best;
    res.outer_report = outer;
    res.outer_report.argopt = res.theta;
    res.outer_report.value = best;
    res.outer_report.converged = outer.converged && res.inner_report.converged;
    return res;
}

}  // namespace dualdiv
