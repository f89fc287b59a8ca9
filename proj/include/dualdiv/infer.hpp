#pragma once

// Test procedures and their chi-squared calibration: simple and composite
// divergence tests, power approximation and sample-size planning, the
// generalized likelihood ratio comparison, and the signed-measure mixture
// machinery (dual chi2 statistic, component-count test, boundary-safe
// confidence regions).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dualdiv/estimate.hpp"
#include "dualdiv/special.hpp"

namespace dualdiv {

struct TestReport {
    double statistic = 0.0;  // already scaled by 2n / phi''(1)
    int dof = 1;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double level = 0.05;
    bool valid = true;  // estimation failure flips this; reject is then undefined
    EstimateResult estimate;
};

inline TestReport assemble_report(double divergence_value, int n, double phi_dd1, int dof,
                                  double level) {
    TestReport rep;
    rep.statistic = (2.0 * n / phi_dd1) * divergence_value;
    rep.dof = dof;
    rep.level = level;
    rep.critical_value = chi2_quantile(dof, 1.0 - level);
    rep.p_value = 1.0 - chi2_cdf(dof, rep.statistic);
    rep.reject = rep.statistic > rep.critical_value;
    return rep;
}

/// H0: theta_T = theta0, statistic (2n/phi''(1)) D_hat(theta0, .) ~ chi2_d.
/// Estimation failure is carried in the report (valid = false, reject
/// undefined) rather than thrown.
inline TestReport simple_test(const DualObjective& dual, const Vec& theta0, const Mat& sample,
                              double level, const EstimateOptions& opts = {}) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("simple_test: level in (0,1)");
    EstimateResult est;
    try {
        est = dual_estimate(dual, theta0, sample, opts);
    } catch (const std::runtime_error&) {
        TestReport rep;
        rep.level = level;
        rep.valid = false;
        return rep;
    }
    TestReport rep = assemble_report(est.objective_value, static_cast<int>(sample.cols()),
                                     dual.spec().second_at_one(), dual.model().param_dim(), level);
    rep.valid = est.report.converged || est.objective_value >= 0.0;
    rep.estimate = std::move(est);
    return rep;
}

/// H0: theta_T in Theta_0 = s(B0), statistic ~ chi2_l.
inline TestReport composite_test(const DualObjective& dual, const ConstraintSpec& constraint,
                                 const Mat& sample, double level, const MinDualOptions& opts = {}) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("composite_test: level in (0,1)");
    EstimateResult est = composite_estimate(dual, constraint, sample, opts);
    int dof = constraint.l;
    TestReport rep;
    if (dof == 0) {
        // Degenerate constraint: Theta_0 = Theta, the statistic carries no
        // degrees of freedom and the test never rejects.
        rep.statistic = 0.0;
        rep.dof = 0;
        rep.level = level;
        rep.critical_value = 0.0;
        rep.p_value = 1.0;
        rep.reject = false;
    } else {
        rep = assemble_report(est.objective_value, static_cast<int>(sample.cols()),
                              dual.spec().second_at_one(), dof, level);
    }
    rep.valid = est.report.converged || est.objective_value >= 0.0;
    rep.estimate = std::move(est);
    return rep;
}

enum class PlanStatus { Ok, PlanningImpossible };

struct PowerPlan {
    double divergence = 0.0;
    double sigma = 0.0;
    int dof = 1;
    double level = 0.05;
    double phi_dd1 = 1.0;
    std::optional<double> approx_power;  // given-n mode
    std::optional<double> target_power;  // sample-size mode
    double n0 = 0.0;
    long n_star = 0;
    PlanStatus status = PlanStatus::Ok;
};

/// beta(theta_T) ~= 1 - F_N( sqrt(n)/sigma [ phi''(1) q / (2n) - D ] ).
inline double approx_power_at(double D, double sigma, int dof, double level, double n,
                              double phi_dd1 = 1.0) {
    double q = chi2_quantile(dof, 1.0 - level);
    double arg = std::sqrt(n) / sigma * (phi_dd1 * q / (2.0 * n) - D);
    return 1.0 - normal_cdf(arg);
}

/// Given n, evaluates the power approximation; given a target power, solves
/// the displayed equation for n0 and returns n* = floor(n0) + 1 (the integer
/// part convention applies even at integral n0).
inline PowerPlan power_plan(double D, double sigma, int dof, double level,
                            std::optional<double> n_given, std::optional<double> beta_target,
                            double phi_dd1 = 1.0) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("power_plan: level in (0,1)");
    if (!(sigma > 0.0)) throw std::domain_error("power_plan: sigma must be positive");
    PowerPlan plan;
    plan.divergence = D;
    plan.sigma = sigma;
    plan.dof = dof;
    plan.level = level;
    plan.phi_dd1 = phi_dd1;
    if (n_given) plan.approx_power = approx_power_at(D, sigma, dof, level, *n_given, phi_dd1);
    if (beta_target) {
        plan.target_power = *beta_target;
        if (!(D > 0.0) || !std::isfinite(D)) {
            plan.status = PlanStatus::PlanningImpossible;
            return plan;
        }
        double q = chi2_quantile(dof, 1.0 - level);
        double z = normal_quantile(1.0 - *beta_target);
        // Positive root of  D m^2 + sigma z m - phi'' q / 2 = 0  with m = sqrt(n);
        // written with a = sigma^2 z^2 and b = phi'' q D this is
        // n0 = (a + b + sign(beta - 1/2) sqrt(a (a + 2b))) / (2 D^2).
        double m = (-sigma * z + std::sqrt(sigma * sigma * z * z + 2.0 * phi_dd1 * q * D)) /
                   (2.0 * D);
        plan.n0 = m * m;
        plan.n_star = static_cast<long>(std::floor(plan.n0)) + 1;
    }
    return plan;
}

/// Generalized likelihood ratio statistic 2 log sup_Theta L / L(theta0).
/// The H0 point competes as a candidate, so a boundary-pinned MLE yields an
/// exact zero.
inline double glr_statistic(const ParametricModel& model, const Vec& theta0, const Mat& sample) {
    const int n = static_cast<int>(sample.cols());
    auto loglik = [&](const Vec& th) {
        Eval e;
        e.value = 0.0;
        e.grad = Vec::Zero(model.param_dim());
        for (int j = 0; j < n; ++j) {
            double lp = model.log_density(th, sample.col(j));
            if (!std::isfinite(lp)) {
                e.value = -kInf;
                return e;
            }
            e.value += lp;
            e.grad += model.score(th, sample.col(j));
        }
        e.value /= n;
        e.grad /= n;
        return e;
    };
    OptimizeReport full = maximize(loglik, model.param_box(), model.pilot(sample), 1e-10, 400);
    double l0 = loglik(theta0).value;
    double best = std::max(full.value, l0);
    return std::max(0.0, 2.0 * n * (best - l0));
}

inline double glr_statistic(const ParametricModel& model, const ConstraintSpec& constraint,
                            const Mat& sample) {
    const int n = static_cast<int>(sample.cols());
    auto loglik = [&](const Vec& th) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double lp = model.log_density(th, sample.col(j));
            if (!std::isfinite(lp)) return -kInf;
            acc += lp;
        }
        return acc / n;
    };
    auto loglik_grad = [&](const Vec& th) {
        Eval e;
        e.value = loglik(th);
        e.grad = Vec::Zero(model.param_dim());
        if (!std::isfinite(e.value)) return e;
        for (int j = 0; j < n; ++j) e.grad += model.score(th, sample.col(j));
        e.grad /= n;
        return e;
    };
    OptimizeReport full = maximize(loglik_grad, model.param_box(), model.pilot(sample), 1e-10, 400);

    auto restricted = [&](const Vec& beta) {
        Eval e;
        Vec th = constraint.s(beta);
        e.value = loglik(th);
        e.grad = Vec::Zero(static_cast<int>(beta.size()));
        if (!std::isfinite(e.value)) return e;
        Vec g = Vec::Zero(model.param_dim());
        for (int j = 0; j < n; ++j) g += model.score(th, sample.col(j));
        g /= n;
        e.grad = constraint.jacobian_s(beta).transpose() * g;
        return e;
    };
    Vec beta0 = Vec::Zero(static_cast<int>(constraint.beta_box.size()));
    beta0 = clamp_to_box(beta0, constraint.beta_box);
    OptimizeReport part = maximize(restricted, constraint.beta_box, beta0, 1e-10, 400);
    return std::max(0.0, 2.0 * n * (full.value - part.value));
}

struct MixtureDualChi2Result {
    double sup_value = 0.0;  // unscaled divergence estimate
    Vec alpha_star;
    bool feasible = true;
    OptimizeReport report;
};

/// The dual chi2 statistic on signed measures, sup over the operationally
/// feasible alpha of P_theta f(theta, alpha) - P_n g(theta, alpha). The
/// divergence must be finite on all of R (chi2, gamma = 2).
inline MixtureDualChi2Result mixture_dual_chi2(const MixtureExtendedModel& ext, const Vec& theta,
                                               const Mat& sample,
                                               std::optional<Box> search_box = std::nullopt,
                                               const DualOptions& dopts = {}, double tol = 1e-8) {
    DualObjective dual(ext, DivergenceSpec::power(2.0), dopts);
    Box box = search_box.value_or(ext.extended_weight_box());
    for (std::size_t i = 0; i < box.size(); ++i) {
        box[i].lo = std::max(box[i].lo, ext.extended_weight_box()[i].lo);
        box[i].hi = std::min(box[i].hi, ext.extended_weight_box()[i].hi);
    }

    MixtureDualChi2Result out;
    Objective obj = [&](const Vec& a) { return dual.empirical_objective_grad(theta, a, sample); };
    Vec init = clamp_to_box(theta, box);
    OptimizeReport rep = maximize(obj, box, init, tol, 300);
    out.report = rep;
    out.alpha_star = rep.argopt;
    out.sup_value = rep.value;
    // alpha = theta is always feasible with objective zero.
    if (!(out.sup_value >= 0.0)) {
        bool theta_in_box = true;
        for (int i = 0; i < theta.size(); ++i)
            if (!box[static_cast<std::size_t>(i)].contains(theta[i])) theta_in_box = false;
        if (theta_in_box) {
            out.sup_value = 0.0;
            out.alpha_star = clamp_to_box(theta, box);
        } else if (!std::isfinite(out.sup_value)) {
            out.feasible = false;
        }
    }
    return out;
}

/// H0: k - k0 mixture components have null weights; 2n chi2~(Theta_0, .) ~
/// chi2_{k-k0}. Convention: the components under test are listed first in
/// the mixture, the always-kept remainder component last, so Theta_0 pins the
/// first k - k0 free weights at zero and leaves k0 - 1 of them free.
inline TestReport mixture_component_test(const MixtureExtendedModel& ext, int k0, const Mat& sample,
                                         double level, const DualOptions& dopts = {}) {
    const int k = ext.k();
    if (!(k0 >= 1 && k0 <= k - 1))
        throw std::domain_error("mixture_component_test: k0 must lie in [1, k-1]");
    const int n = static_cast<int>(sample.cols());
    const int dof = k - k0;
    const int pinned = k - k0;
    const int free_dims = k0 - 1;

    auto theta_of_beta = [&](const Vec& beta) {
        Vec th = Vec::Zero(k - 1);
        for (int i = 0; i < free_dims; ++i) th[pinned + i] = beta[i];
        return th;
    };

    double inf_value;
    Vec theta_star, alpha_star;
    bool feasible = true;
    if (free_dims == 0) {
        Vec th = Vec::Zero(k - 1);
        auto res = mixture_dual_chi2(ext, th, sample, std::nullopt, dopts);
        inf_value = res.sup_value;
        theta_star = th;
        alpha_star = res.alpha_star;
        feasible = res.feasible;
    } else {
        Box beta_box = uniform_box(free_dims, 0.0, 1.0);
        const double base = std::cbrt(std::numeric_limits<double>::epsilon());
        auto outer = [&](const Vec& beta) {
            Eval e;
            auto res = mixture_dual_chi2(ext, theta_of_beta(beta), sample, std::nullopt, dopts);
            e.value = res.feasible ? res.sup_value : kInf;
            e.grad = Vec::Zero(free_dims);
            for (int i = 0; i < free_dims; ++i) {
                double h = base * std::max(1.0, std::fabs(beta[i]));
                Vec bp = beta, bm = beta;
                bp[i] = beta_box[static_cast<std::size_t>(i)].clamp(beta[i] + h);
                bm[i] = beta_box[static_cast<std::size_t>(i)].clamp(beta[i] - h);
                auto rp = mixture_dual_chi2(ext, theta_of_beta(bp), sample, std::nullopt, dopts);
                auto rm = mixture_dual_chi2(ext, theta_of_beta(bm), sample, std::nullopt, dopts);
                if (rp.feasible && rm.feasible && bp[i] > bm[i])
                    e.grad[i] = (rp.sup_value - rm.sup_value) / (bp[i] - bm[i]);
            }
            return e;
        };
        Vec beta0 = Vec::Constant(free_dims, 1.0 / k0);
        OptimizeReport rep = minimize(outer, beta_box, beta0, 1e-7, 100);
        inf_value = rep.value;
        theta_star = theta_of_beta(rep.argopt);
        auto res = mixture_dual_chi2(ext, theta_star, sample, std::nullopt, dopts);
        alpha_star = res.alpha_star;
        feasible = std::isfinite(inf_value);
    }

    TestReport rep = assemble_report(inf_value, n, 1.0, dof, level);
    rep.valid = feasible;
    rep.estimate.estimate = theta_star;
    rep.estimate.companion_alpha = alpha_star;
    rep.estimate.objective_value = inf_value;
    return rep;
}

struct ConfidenceRegion {
    std::vector<double> grid;
    std::vector<double> statistics;  // 2n-scaled
    std::vector<bool> inside;
    double quantile = 0.0;
    int dof = 1;
    double hull_lo = 0.0;
    double hull_hi = 0.0;
    bool empty = true;

    bool contains(double theta, double tol = 1e-12) const {
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (inside[i] && std::fabs(grid[i] - theta) <= tol) return true;
        return false;
    }
};

/// Boundary-safe confidence region: sublevel set of 2n chi2~(theta, .) under
/// q_{d, eps} evaluated on a theta grid (k = 2 known components: d = 1).
inline ConfidenceRegion confidence_region(const MixtureExtendedModel& ext, const Mat& sample,
                                          double level, const std::vector<double>& grid,
                                          const DualOptions& dopts = {}) {
    for (double t : grid)
        if (!ext.in_probability_regime(vec1(t)))
            throw std::domain_error("confidence_region: grid must lie in the probability simplex");
    const int n = static_cast<int>(sample.cols());
    ConfidenceRegion region;
    region.dof = ext.cr_dof();
    region.quantile = chi2_quantile(region.dof, 1.0 - level);
    region.grid = grid;
    region.statistics.resize(grid.size());
    region.inside.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vec th = vec1(grid[i]);
        auto res = mixture_dual_chi2(ext, th, sample, std::nullopt, dopts);
        double stat = res.feasible ? 2.0 * n * res.sup_value : kInf;
        region.statistics[i] = stat;
        region.inside[i] = stat <= region.quantile;
        if (region.inside[i]) {
            if (region.empty) {
                region.hull_lo = region.hull_hi = grid[i];
                region.empty = false;
            } else {
                region.hull_lo = std::min(region.hull_lo, grid[i]);
                region.hull_hi = std::max(region.hull_hi, grid[i]);
            }
        }
    }
    return region;
}

}  // namespace dualdiv
