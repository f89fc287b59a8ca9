#pragma once

// Estimators built on the dual objective: the D-phi-DE alpha_hat(theta) with
// its divergence estimate, the min-max MD-phi-DE theta_hat, composite
// (constrained) variants, and asymptotic variances.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "dualdiv/dual.hpp"
#include "dualdiv/optimize.hpp"

namespace dualdiv {

enum class EstimateMode { Global, LocalBall };

struct EstimateOptions {
    EstimateMode mode = EstimateMode::Global;
    std::optional<Vec> init;
    std::optional<Vec> ball_center;      // LocalBall
    std::optional<double> ball_radius;   // defaults to n^(-1/3)
    double tol = 1e-8;
    int max_iter = 300;
    bool want_covariance = false;
};

struct EstimateResult {
    Vec estimate;
    double objective_value = 0.0;
    std::optional<Mat> covariance;
    bool singular_information = false;
    OptimizeReport report;
    EstimateMode mode = EstimateMode::Global;
    Vec companion_alpha;  // min-max estimates carry alpha_hat(theta_hat)
};

/// Smooth embedding of the null set Theta_0 = { s(beta) : beta in B0 } with
/// the complementary constraint map r(theta) = 0 on Theta_0.
struct ConstraintSpec {
    int d = 0;
    int l = 0;
    Box beta_box;
    std::function<Vec(const Vec&)> s;
    std::function<Mat(const Vec&)> s_jacobian;  // d x (d-l); optional, FD fallback
    std::function<Vec(const Vec&)> r;           // optional when l = 0
    std::function<Mat(const Vec&)> r_jacobian;  // l x d; optional

    static ConstraintSpec identity(const Box& theta_box) {
        ConstraintSpec c;
        c.d = static_cast<int>(theta_box.size());
        c.l = 0;
        c.beta_box = theta_box;
        c.s = [](const Vec& b) { return b; };
        c.s_jacobian = [d = c.d](const Vec&) { return Mat::Identity(d, d); };
        return c;
    }

    /// Theta_0 pins the listed coordinates to fixed values; beta ranges over
    /// the remaining ones.
    static ConstraintSpec pin_coordinates(const Box& theta_box,
                                          const std::vector<std::pair<int, double>>& pins) {
        ConstraintSpec c;
        c.d = static_cast<int>(theta_box.size());
        c.l = static_cast<int>(pins.size());
        std::vector<int> free_idx;
        std::vector<int> pin_idx(static_cast<std::size_t>(c.d), -1);
        for (std::size_t i = 0; i < pins.size(); ++i) pin_idx[static_cast<std::size_t>(pins[i].first)] = static_cast<int>(i);
        for (int i = 0; i < c.d; ++i)
            if (pin_idx[static_cast<std::size_t>(i)] < 0) free_idx.push_back(i);
        for (int i : free_idx) c.beta_box.push_back(theta_box[static_cast<std::size_t>(i)]);
        c.s = [free_idx, pins, d = c.d](const Vec& b) {
            Vec th = Vec::Zero(d);
            for (std::size_t i = 0; i < free_idx.size(); ++i) th[free_idx[i]] = b[static_cast<int>(i)];
            for (const auto& p : pins) th[p.first] = p.second;
            return th;
        };
        c.s_jacobian = [free_idx, d = c.d](const Vec&) {
            Mat J = Mat::Zero(d, static_cast<int>(free_idx.size()));
            for (std::size_t i = 0; i < free_idx.size(); ++i) J(free_idx[i], static_cast<int>(i)) = 1.0;
            return J;
        };
        c.r = [pins, l = c.l](const Vec& th) {
            Vec v(l);
            for (int i = 0; i < l; ++i) v[i] = th[pins[static_cast<std::size_t>(i)].first] - pins[static_cast<std::size_t>(i)].second;
            return v;
        };
        c.r_jacobian = [pins, l = c.l, d = c.d](const Vec&) {
            Mat J = Mat::Zero(l, d);
            for (int i = 0; i < l; ++i) J(i, pins[static_cast<std::size_t>(i)].first) = 1.0;
            return J;
        };
        return c;
    }

    Mat jacobian_s(const Vec& beta) const {
        if (s_jacobian) return s_jacobian(beta);
        const double base = std::cbrt(std::numeric_limits<double>::epsilon());
        int m = static_cast<int>(beta.size());
        Mat J(d, m);
        for (int i = 0; i < m; ++i) {
            double h = base * std::max(1.0, std::fabs(beta[i]));
            Vec bp = beta, bm = beta;
            bp[i] += h;
            bm[i] -= h;
            J.col(i) = (s(bp) - s(bm)) / (2.0 * h);
        }
        return J;
    }

    /// r(s(beta)) = 0 within 1e-10 at sampled betas; Jacobians full rank by
    /// singular value inspection.
    void validate(const std::vector<Vec>& sample_betas) const {
        for (const Vec& b : sample_betas) {
            Vec th = s(b);
            if (r) {
                Vec rv = r(th);
                if (rv.size() != l) throw std::invalid_argument("constraint: r has wrong codimension");
                if (rv.lpNorm<Eigen::Infinity>() > 1e-10)
                    throw std::invalid_argument("constraint: r(s(beta)) must vanish on B0");
            }
            Mat S = jacobian_s(b);
            Eigen::JacobiSVD<Mat> svd_s(S);
            if (d - l > 0 && svd_s.singularValues().minCoeff() < 1e-8)
                throw std::invalid_argument("constraint: S(beta) must have full rank d-l");
            if (r_jacobian) {
                Eigen::JacobiSVD<Mat> svd_r(r_jacobian(th));
                if (l > 0 && svd_r.singularValues().minCoeff() < 1e-8)
                    throw std::invalid_argument("constraint: R(theta) must have full rank l");
            }
        }
    }
};

namespace detail {

inline Box local_ball_box(const Box& param_box, const Vec& center, double radius) {
    // Inscribed box of the Euclidean ball: half-width radius/sqrt(d), so the
    // returned point can never leave the ball.
    const int d = static_cast<int>(center.size());
    double half = radius / std::sqrt(static_cast<double>(d));
    Box box(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        box[static_cast<std::size_t>(i)] =
            Interval{std::max(param_box[static_cast<std::size_t>(i)].lo, center[i] - half),
                     std::min(param_box[static_cast<std::size_t>(i)].hi, center[i] + half)};
    }
    return box;
}

/// Empirical sandwich pieces at alpha_hat: S = -P_n d2h/dalpha2 (central
/// difference of the analytic first derivative) and M = P_n (dh)(dh)^T.
inline std::pair<Mat, Mat> empirical_sandwich(const DualObjective& dual, const Vec& theta,
                                              const Vec& alpha, const Mat& sample) {
    const int d = static_cast<int>(alpha.size());
    auto grad_at = [&](const Vec& a) {
        return dual.empirical_objective_grad(theta, a, sample).grad;
    };
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    Mat S = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        double h = base * std::max(1.0, std::fabs(alpha[i]));
        Vec ap = alpha, am = alpha;
        ap[i] += h;
        am[i] -= h;
        S.col(i) = -(grad_at(ap) - grad_at(am)) / (2.0 * h);
    }
    S = 0.5 * (S + S.transpose()).eval();

    // M needs per-observation gradients: grad h_j equals the objective
    // gradient evaluated on the single observation j.
    Mat M = Mat::Zero(d, d);
    const int n = static_cast<int>(sample.cols());
    for (int j = 0; j < n; ++j) {
        Mat one = sample.col(j);
        Vec gj = dual.empirical_objective_grad(theta, alpha, one).grad;
        M += gj * gj.transpose();
    }
    M /= n;
    return {S, M};
}

inline std::optional<Mat> invert_spd(const Mat& A, bool* singular) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lo > 1e-10 * std::max(1.0, hi))) {
        if (singular) *singular = true;
        return std::nullopt;
    }
    return A.inverse();
}

}  // namespace detail

/// alpha_hat_phi(theta) = arg sup_alpha P_n h(theta, alpha) with the
/// divergence estimate D_hat = sup value. The candidate alpha = theta always
/// competes (its objective is exactly zero), which keeps the sup nonnegative.
inline EstimateResult dual_estimate(const DualObjective& dual, const Vec& theta, const Mat& sample,
                                    const EstimateOptions& opts = {}) {
    const ParametricModel& model = dual.model();
    Box box = model.param_box();
    Vec init;
    if (opts.mode == EstimateMode::LocalBall) {
        if (!opts.ball_center) throw std::invalid_argument("LocalBall mode requires a ball center");
        double radius = opts.ball_radius.value_or(std::pow(static_cast<double>(sample.cols()), -1.0 / 3.0));
        box = detail::local_ball_box(box, *opts.ball_center, radius);
        init = opts.init.value_or(*opts.ball_center);
    } else {
        init = opts.init.value_or(model.pilot(sample));
    }
    init = clamp_to_box(init, box);

    Objective obj = [&](const Vec& a) { return dual.empirical_objective_grad(theta, a, sample); };
    OptimizeReport rep = maximize(obj, box, init, opts.tol, opts.max_iter);

    EstimateResult res;
    res.mode = opts.mode;
    res.report = rep;
    res.estimate = rep.argopt;
    res.objective_value = rep.value;

    // alpha = theta is feasible with objective exactly 0 whenever theta lies
    // in the search box.
    bool theta_in_box = true;
    for (int i = 0; i < theta.size(); ++i)
        if (!box[static_cast<std::size_t>(i)].contains(theta[i])) theta_in_box = false;
    if (theta_in_box && !(res.objective_value >= 0.0)) {
        res.estimate = theta;
        res.objective_value = 0.0;
        res.report.argopt = theta;
        res.report.value = 0.0;
    }
    if (!std::isfinite(res.objective_value))
        throw std::runtime_error("dual_estimate: empirical objective infeasible everywhere tried");

    if (opts.want_covariance) {
        auto [S, M] = detail::empirical_sandwich(dual, theta, res.estimate, sample);
        bool singular = false;
        auto Sinv = detail::invert_spd(S, &singular);
        if (Sinv) {
            res.covariance = (*Sinv) * M * (*Sinv);
        } else {
            res.singular_information = true;
        }
    }
    return res;
}

struct MinDualOptions {
    std::optional<Vec> theta_init;
    std::optional<Vec> alpha_init;
    double tol = 1e-8;
    int max_iter = 200;
    bool want_covariance = false;
};

/// Composite estimate: minimax over (beta, alpha) of P_n h(s(beta), alpha).
inline EstimateResult composite_estimate(const DualObjective& dual, const ConstraintSpec& constraint,
                                         const Mat& sample, const MinDualOptions& opts = {}) {
    const ParametricModel& model = dual.model();
    Vec pilot = model.pilot(sample);
    Vec beta_init;
    if (opts.theta_init) {
        beta_init = *opts.theta_init;
    } else {
        // Project the pilot onto B0 coordinates via least squares on s.
        beta_init = Vec::Zero(static_cast<int>(constraint.beta_box.size()));
        Mat J = constraint.jacobian_s(beta_init);
        Vec rhs = pilot - constraint.s(Vec::Zero(beta_init.size()));
        beta_init = J.colPivHouseholderQr().solve(rhs);
    }
    beta_init = clamp_to_box(beta_init, constraint.beta_box);
    Vec alpha_init = clamp_to_box(opts.alpha_init.value_or(pilot), model.param_box());

    auto inner_for_beta = [&](const Vec& beta) -> Objective {
        Vec theta = constraint.s(beta);
        return [&dual, theta, &sample](const Vec& a) {
            return dual.empirical_objective_grad(theta, a, sample);
        };
    };

    MinimaxOptions mm;
    mm.tol = opts.tol;
    mm.max_iter = opts.max_iter;
    MinimaxResult mr = minimax(inner_for_beta, constraint.beta_box, model.param_box(),
                               beta_init, alpha_init, mm);

    EstimateResult res;
    res.mode = EstimateMode::Global;
    res.estimate = constraint.s(mr.theta);
    res.companion_alpha = mr.alpha;
    res.objective_value = mr.value;
    res.report = mr.outer_report;
    res.report.argopt = mr.theta;

    double floor_val = dual.empirical_objective(res.estimate, res.estimate, sample);
    if (std::isfinite(floor_val) && mr.value < floor_val) {
        // The inner sup at alpha = theta is exactly zero; never report less.
        res.objective_value = floor_val;
        res.companion_alpha = res.estimate;
    }

    if (opts.want_covariance && constraint.l == 0) {
        // Theorem 3.3 regime: V = I(theta_hat)^{-1}.
        bool singular = false;
        auto Iinv = detail::invert_spd(model.fisher_information(res.estimate), &singular);
        if (Iinv)
            res.covariance = *Iinv;
        else
            res.singular_information = true;
    }
    return res;
}

/// theta_hat_phi = arg inf_theta sup_alpha P_n h(theta, alpha); delegates to
/// the composite machinery with the identity embedding so that l = 0
/// constraints reproduce it bit for bit.
inline EstimateResult min_dual_estimate(const DualObjective& dual, const Mat& sample,
                                        const MinDualOptions& opts = {}) {
    ConstraintSpec identity = ConstraintSpec::identity(dual.model().param_box());
    return composite_estimate(dual, identity, sample, opts);
}

/// Joint (beta, alpha) covariance A^{-1} F A^{-1} under the alternative
/// (Theorem 3.6(a)), assembled from empirical derivative moments at the
/// composite solution.
inline std::optional<Mat> composite_alternative_covariance(const DualObjective& dual,
                                                           const ConstraintSpec& constraint,
                                                           const Vec& beta_hat, const Vec& alpha_hat,
                                                           const Mat& sample) {
    const int db = static_cast<int>(beta_hat.size());
    const int da = static_cast<int>(alpha_hat.size());
    const int n = static_cast<int>(sample.cols());
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());

    auto h_grad = [&](const Vec& beta, const Vec& alpha, const Mat& obs) {
        // gradient of P_n h(s(beta), alpha) in (beta, alpha)
        Vec g(db + da);
        Eval ea = dual.empirical_objective_grad(constraint.s(beta), alpha, obs);
        g.tail(da) = ea.grad;
        for (int i = 0; i < db; ++i) {
            double h = base * std::max(1.0, std::fabs(beta[i]));
            Vec bp = beta, bm = beta;
            bp[i] += h;
            bm[i] -= h;
            double vp = dual.empirical_objective(constraint.s(bp), alpha, obs);
            double vm = dual.empirical_objective(constraint.s(bm), alpha, obs);
            g[i] = (vp - vm) / (2.0 * h);
        }
        return g;
    };

    Mat F = Mat::Zero(db + da, db + da);
    for (int j = 0; j < n; ++j) {
        Mat one = sample.col(j);
        Vec gj = h_grad(beta_hat, alpha_hat, one);
        F += gj * gj.transpose();
    }
    F /= n;

    Mat A = Mat::Zero(db + da, db + da);
    Vec z(db + da);
    z.head(db) = beta_hat;
    z.tail(da) = alpha_hat;
    for (int i = 0; i < db + da; ++i) {
        double h = base * std::max(1.0, std::fabs(z[i]));
        Vec zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        Vec gp = h_grad(zp.head(db), zp.tail(da), sample);
        Vec gm = h_grad(zm.head(db), zm.tail(da), sample);
        A.col(i) = (gp - gm) / (2.0 * h);
    }
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) return std::nullopt;
    Mat Ainv = lu.inverse();
    return Mat(Ainv * F * Ainv);
}

/// Asymptotic variance of the divergence estimate under the alternative:
/// sigma^2 = P h^2 - (P h)^2, population version by quadrature.
inline double sigma2_simple(const DualObjective& dual, const Vec& theta, const Vec& theta_t) {
    auto m1 = dual.model().integrate_against(
        theta_t, [&](const Vec& x) { return dual.h_value(theta, theta_t, x); });
    auto m2 = dual.model().integrate_against(theta_t, [&](const Vec& x) {
        double h = dual.h_value(theta, theta_t, x);
        return h * h;
    });
    if (!m1.ok || !m2.ok) throw std::runtime_error("sigma2_simple: quadrature failed");
    return std::max(0.0, m2.value - m1.value * m1.value);
}

/// Empirical plug-in version from a sample.
inline double sigma2_simple(const DualObjective& dual, const Vec& theta, const Mat& sample) {
    const int n = static_cast<int>(sample.cols());
    // Plug in alpha_hat(theta) for theta_T inside h.
    EstimateResult a = dual_estimate(dual, theta, sample);
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < n; ++j) {
        double h = dual.h_value(theta, a.estimate, sample.col(j));
        s1 += h;
        s2 += h * h;
    }
    s1 /= n;
    s2 /= n;
    return std::max(0.0, s2 - s1 * s1);
}

inline double sigma2_composite(const DualObjective& dual, const ConstraintSpec& constraint,
                               const Vec& beta_star, const Vec& theta_t) {
    return sigma2_simple(dual, constraint.s(beta_star), theta_t);
}

inline double sigma2_composite(const DualObjective& dual, const ConstraintSpec& constraint,
                               const Vec& beta_star, const Mat& sample) {
    return sigma2_simple(dual, constraint.s(beta_star), sample);
}

}  // namespace dualdiv
