#pragma once

// Parametric model abstraction: density, score, sampler, Fisher information
// and integration against P_theta, plus the built-in families used by the
// experiment harness. Supports are theta-independent by construction.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dualdiv/common.hpp"
#include "dualdiv/divergence.hpp"
#include "dualdiv/quadrature.hpp"
#include "dualdiv/rng.hpp"

namespace dualdiv {

/// Value-or-NonIntegrable. The divergence guard of the quadrature layer is
/// surfaced through ok=false; callers map it to an infeasible objective.
struct IntegrationOutcome {
    double value = 0.0;
    bool ok = false;
    static IntegrationOutcome non_integrable() { return {0.0, false}; }
    static IntegrationOutcome of(double v) { return {v, true}; }
};

enum class SupportKind { LebesgueInterval, CountingFinite };

struct ObsSupport {
    SupportKind kind = SupportKind::LebesgueInterval;
    double lo = -kInf;
    double hi = kInf;
    std::vector<double> points;  // CountingFinite, scalar observations only
};

/// Closed-form moment term P_theta f(theta,alpha) for a registered
/// (model, divergence) pair, with its alpha-gradient.
struct MomentForm {
    double value = 0.0;
    Vec grad_alpha;
    bool integrable = true;
};

struct PopulationForm {
    double value = 0.0;
    Vec grad_alpha;
};

class ParametricModel {
  public:
    int param_dim() const { return param_dim_; }
    int obs_dim() const { return obs_dim_; }
    const Box& param_box() const { return param_box_; }
    const ObsSupport& support() const { return support_; }
    const std::string& name() const { return name_; }

    double log_density(const Vec& theta, const Vec& x) const { return log_density_(theta, x); }
    double density(const Vec& theta, const Vec& x) const { return std::exp(log_density_(theta, x)); }

    Vec score(const Vec& theta, const Vec& x) const {
        if (score_) return score_(theta, x);
        // Central differences with the usual cube-root-epsilon step.
        const double base = std::cbrt(std::numeric_limits<double>::epsilon());
        Vec g(param_dim_);
        for (int i = 0; i < param_dim_; ++i) {
            double h = base * std::max(1.0, std::fabs(theta[i]));
            Vec tp = theta, tm = theta;
            tp[i] += h;
            tm[i] -= h;
            g[i] = (log_density_(tp, x) - log_density_(tm, x)) / (2.0 * h);
        }
        return g;
    }

    /// n i.i.d. draws, bit-reproducible given (theta, n, seed); obs_dim x n.
    Mat sample(const Vec& theta, int n, std::uint64_t seed) const {
        if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
        Rng rng(seed);
        Mat out(obs_dim_, n);
        for (int j = 0; j < n; ++j) out.col(j) = draw_(theta, rng);
        return out;
    }

    Mat fisher_information(const Vec& theta) const {
        if (fisher_) return fisher_(theta);
        Mat I = Mat::Zero(param_dim_, param_dim_);
        for (int a = 0; a < param_dim_; ++a) {
            for (int b = a; b < param_dim_; ++b) {
                auto entry = integrate_against(theta, [&](const Vec& x) {
                    Vec s = score(theta, x);
                    return s[a] * s[b];
                });
                if (!entry.ok) throw std::runtime_error("fisher_information: quadrature failed");
                I(a, b) = I(b, a) = entry.value;
            }
        }
        return I;
    }

    /// p-quantile of the coordinate marginal, used for support truncation.
    double quantile(const Vec& theta, double p, int coord = 0) const {
        return quantile_(theta, p, coord);
    }

    /// Moment-based pilot estimate used as a default optimizer start.
    Vec pilot(const Mat& sample) const {
        if (pilot_) return clamp_to_box(pilot_(sample), param_box_);
        Vec c(param_dim_);
        for (int i = 0; i < param_dim_; ++i) {
            const Interval& b = param_box_[i];
            if (std::isfinite(b.lo) && std::isfinite(b.hi))
                c[i] = 0.5 * (b.lo + b.hi);
            else if (std::isfinite(b.lo))
                c[i] = b.lo + 1.0;
            else if (std::isfinite(b.hi))
                c[i] = b.hi - 1.0;
            else
                c[i] = 0.0;
        }
        return c;
    }

    /// Integral of u against P_theta over the truncated support (quantiles at
    /// 1e-10 mass), or an exact sum under a counting measure.
    IntegrationOutcome integrate_against(const Vec& theta,
                                         const std::function<double(const Vec&)>& u,
                                         const QuadOptions& opt = {}) const {
        if (support_.kind == SupportKind::CountingFinite) {
            double total = 0.0;
            Vec x(1);
            for (double pt : support_.points) {
                x[0] = pt;
                double term = u(x) * density(theta, x);
                if (!std::isfinite(term)) return IntegrationOutcome::non_integrable();
                total += term;
            }
            return IntegrationOutcome::of(total);
        }
        if (obs_dim_ == 1) {
            double a = quantile(theta, 1e-10, 0);
            double b = quantile(theta, 1.0 - 1e-10, 0);
            auto f = [&](double t) {
                Vec xv(1);
                xv[0] = t;
                return u(xv) * density(theta, xv);
            };
            auto res = integrate_adaptive(f, a, b, opt);
            if (!res.ok()) return IntegrationOutcome::non_integrable();
            double total = res.value;
            // The quantile window is only a starting point: integrands like
            // the chi2 kernels carry mass shifted well into the tail, so
            // extend outward until the boundary slabs stop contributing. A
            // growing extension that never settles is the divergence guard's
            // non-integrable verdict.
            double step = std::max(0.25 * (b - a), 1.0);
            QuadOptions slab_opt = opt;
            slab_opt.initial_panels = 2;
            slab_opt.max_panels = 200;
            auto negligible = [&](double v) {
                return std::fabs(v) <= std::max(opt.abs_tol, 0.01 * opt.rel_tol * std::fabs(total));
            };
            for (int side = 0; side < 2; ++side) {
                bool rightward = side == 0;
                double bound = rightward ? support_.hi : support_.lo;
                double edge = rightward ? b : a;
                for (int ext = 0; ext < 40; ++ext) {
                    if (rightward ? edge >= bound : edge <= bound) break;
                    double next = rightward ? std::min(edge + step, bound)
                                            : std::max(edge - step, bound);
                    auto slab = rightward ? integrate_adaptive(f, edge, next, slab_opt)
                                          : integrate_adaptive(f, next, edge, slab_opt);
                    if (!slab.ok()) return IntegrationOutcome::non_integrable();
                    total += slab.value;
                    edge = next;
                    if (negligible(slab.value)) break;
                    if (ext == 39) return IntegrationOutcome::non_integrable();
                }
            }
            return IntegrationOutcome::of(total);
        }
        if (obs_dim_ == 2) {
            double ax = quantile(theta, 1e-10, 0), bx = quantile(theta, 1.0 - 1e-10, 0);
            double ay = quantile(theta, 1e-10, 1), by = quantile(theta, 1.0 - 1e-10, 1);
            auto res = integrate_adaptive_2d(
                [&](double x0, double x1) {
                    Vec xv(2);
                    xv[0] = x0;
                    xv[1] = x1;
                    return u(xv) * density(theta, xv);
                },
                ax, bx, ay, by, opt);
            if (!res.ok()) return IntegrationOutcome::non_integrable();
            return IntegrationOutcome::of(res.value);
        }
        throw std::runtime_error("integrate_against: quadrature beyond obs_dim 2 not supported");
    }

    std::optional<MomentForm> moment_closed(const DivergenceSpec& spec, const Vec& theta,
                                            const Vec& alpha) const {
        if (!moment_closed_) return std::nullopt;
        return moment_closed_(spec, theta, alpha);
    }

    std::optional<PopulationForm> population_h_closed(const DivergenceSpec& spec, const Vec& theta,
                                                      const Vec& alpha, const Vec& theta_t) const {
        if (!population_closed_) return std::nullopt;
        return population_closed_(spec, theta, alpha, theta_t);
    }

    // ---- built-in factories ----

    static ParametricModel gaussian_mean(Interval mean_box = {-1e6, 1e6});
    static ParametricModel exponential_rate(Interval rate_box = {1e-6, 1e6});
    static ParametricModel gaussian_mean_vector(int d, Interval mean_box = {-1e6, 1e6});
    struct NormalComponent {
        double mean = 0.0;
        double sd = 1.0;
    };
    static ParametricModel two_mixture_known(NormalComponent p0, NormalComponent p1);
    static ParametricModel k_mixture_known(std::vector<NormalComponent> components);
    /// Small helper for tests: counting measure on given points with a
    /// one-parameter logistic tilt.
    static ParametricModel finite_tilt(std::vector<double> points);

    // wiring (used by factories and by MixtureExtendedModel)
    int param_dim_ = 1;
    int obs_dim_ = 1;
    Box param_box_;
    ObsSupport support_;
    std::string name_;
    std::function<double(const Vec&, const Vec&)> log_density_;
    std::function<Vec(const Vec&, const Vec&)> score_;
    std::function<Vec(const Vec&, Rng&)> draw_;
    std::function<Mat(const Vec&)> fisher_;
    std::function<double(const Vec&, double, int)> quantile_;
    std::function<Vec(const Mat&)> pilot_;
    std::function<std::optional<MomentForm>(const DivergenceSpec&, const Vec&, const Vec&)>
        moment_closed_;
    std::function<std::optional<PopulationForm>(const DivergenceSpec&, const Vec&, const Vec&,
                                                const Vec&)>
        population_closed_;
};

enum class BuiltinName { GaussianMean, Exponential, GaussianMeanVector, TwoMixtureKnown, KMixture };

namespace detail {

inline double normal_log_pdf(double x, double mean, double sd) {
    double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.9189385332046727;  // log sqrt(2 pi)
}

/// Power-divergence moment term for unit-variance Gaussian location models:
/// integral p_theta^gamma p_alpha^(1-gamma) = exp(gamma (gamma-1) |t-a|^2 / 2).
inline std::optional<MomentForm> gaussian_moment_form(const DivergenceSpec& spec, const Vec& theta,
                                                      const Vec& alpha) {
    if (!spec.is_power()) return std::nullopt;
    double g = spec.gamma();
    double d2 = (theta - alpha).squaredNorm();
    MomentForm out;
    if (g == 1.0) {
        out.value = 0.5 * d2;
        out.grad_alpha = -(theta - alpha);
        return out;
    }
    double e = 0.5 * g * (g - 1.0) * d2;
    out.value = std::expm1(e) / (g - 1.0);
    out.grad_alpha = -g * std::exp(e) * (theta - alpha);
    return out;
}

inline std::optional<MomentForm> exponential_moment_form(const DivergenceSpec& spec,
                                                         const Vec& theta, const Vec& alpha) {
    if (!spec.is_power()) return std::nullopt;
    double g = spec.gamma();
    double t = theta[0], a = alpha[0];
    double denom = g * t + (1.0 - g) * a;
    MomentForm out;
    out.grad_alpha = Vec::Zero(1);
    if (denom <= 0.0) {
        out.integrable = false;
        return out;
    }
    // integral p_t^g p_a^(1-g) = t^g a^(1-g) / (g t + (1-g) a)
    double lg = g * std::log(t) + (1.0 - g) * std::log(a) - std::log(denom);
    if (g == 1.0) {
        // KL(P_t, P_a) = log(t/a) + a/t - 1
        out.value = std::log(t / a) + a / t - 1.0;
        out.grad_alpha[0] = -1.0 / a + 1.0 / t;
        return out;
    }
    out.value = std::expm1(lg) / (g - 1.0);
    double dlg = (1.0 - g) / a - (1.0 - g) / denom;
    out.grad_alpha[0] = std::exp(lg) * dlg / (g - 1.0);
    return out;
}

}  // namespace detail

inline ParametricModel ParametricModel::gaussian_mean(Interval mean_box) {
    ParametricModel m;
    m.name_ = "gaussian_mean";
    m.param_dim_ = 1;
    m.obs_dim_ = 1;
    m.param_box_ = {mean_box};
    m.support_ = {SupportKind::LebesgueInterval, -kInf, kInf, {}};
    m.log_density_ = [](const Vec& th, const Vec& x) {
        return detail::normal_log_pdf(x[0], th[0], 1.0);
    };
    m.score_ = [](const Vec& th, const Vec& x) { return vec1(x[0] - th[0]); };
    m.draw_ = [](const Vec& th, Rng& rng) { return vec1(th[0] + rng.normal()); };
    m.fisher_ = [](const Vec&) { return Mat::Identity(1, 1); };
    m.quantile_ = [](const Vec& th, double p, int) { return th[0] + normal_quantile(p); };
    m.pilot_ = [](const Mat& s) { return vec1(s.row(0).mean()); };
    m.moment_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al) {
        return detail::gaussian_moment_form(spec, th, al);
    };
    m.population_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al,
                              const Vec& tt) -> std::optional<PopulationForm> {
        if (!spec.is_power() || spec.gamma() != 0.0) return std::nullopt;
        PopulationForm out;
        double dth = th[0] - tt[0], dal = al[0] - tt[0];
        out.value = 0.5 * dth * dth - 0.5 * dal * dal;
        out.grad_alpha = vec1(-dal);
        return out;
    };
    return m;
}

inline ParametricModel ParametricModel::exponential_rate(Interval rate_box) {
    if (!(rate_box.lo > 0.0)) throw std::invalid_argument("exponential: rate box must be positive");
    ParametricModel m;
    m.name_ = "exponential";
    m.param_dim_ = 1;
    m.obs_dim_ = 1;
    m.param_box_ = {rate_box};
    m.support_ = {SupportKind::LebesgueInterval, 0.0, kInf, {}};
    m.log_density_ = [](const Vec& th, const Vec& x) {
        if (x[0] < 0.0) return -kInf;
        return std::log(th[0]) - th[0] * x[0];
    };
    m.score_ = [](const Vec& th, const Vec& x) { return vec1(1.0 / th[0] - x[0]); };
    m.draw_ = [](const Vec& th, Rng& rng) { return vec1(rng.exponential(th[0])); };
    m.fisher_ = [](const Vec& th) {
        Mat I(1, 1);
        I(0, 0) = 1.0 / (th[0] * th[0]);
        return I;
    };
    m.quantile_ = [](const Vec& th, double p, int) { return -std::log1p(-p) / th[0]; };
    m.pilot_ = [](const Mat& s) {
        double mean = s.row(0).mean();
        return vec1(mean > 0.0 ? 1.0 / mean : 1.0);
    };
    m.moment_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al) {
        return detail::exponential_moment_form(spec, th, al);
    };
    m.population_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al,
                              const Vec& tt) -> std::optional<PopulationForm> {
        if (!spec.is_power() || spec.gamma() != 0.0) return std::nullopt;
        PopulationForm out;
        out.value = -std::log(th[0]) + th[0] / tt[0] + std::log(al[0]) - al[0] / tt[0];
        out.grad_alpha = vec1(1.0 / al[0] - 1.0 / tt[0]);
        return out;
    };
    return m;
}

inline ParametricModel ParametricModel::gaussian_mean_vector(int d, Interval mean_box) {
    if (d < 1) throw std::invalid_argument("gaussian_mean_vector: d must be >= 1");
    ParametricModel m;
    m.name_ = "gaussian_mean_vector";
    m.param_dim_ = d;
    m.obs_dim_ = d;
    m.param_box_ = Box(static_cast<std::size_t>(d), mean_box);
    m.support_ = {SupportKind::LebesgueInterval, -kInf, kInf, {}};
    m.log_density_ = [d](const Vec& th, const Vec& x) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += detail::normal_log_pdf(x[i], th[i], 1.0);
        return acc;
    };
    m.score_ = [](const Vec& th, const Vec& x) { return Vec(x - th); };
    m.draw_ = [d](const Vec& th, Rng& rng) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = th[i] + rng.normal();
        return x;
    };
    m.fisher_ = [d](const Vec&) { return Mat::Identity(d, d); };
    m.quantile_ = [](const Vec& th, double p, int coord) {
        return th[coord] + normal_quantile(p);
    };
    m.pilot_ = [](const Mat& s) { return Vec(s.rowwise().mean()); };
    m.moment_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al) {
        return detail::gaussian_moment_form(spec, th, al);
    };
    m.population_closed_ = [](const DivergenceSpec& spec, const Vec& th, const Vec& al,
                              const Vec& tt) -> std::optional<PopulationForm> {
        if (!spec.is_power() || spec.gamma() != 0.0) return std::nullopt;
        PopulationForm out;
        out.value = 0.5 * (th - tt).squaredNorm() - 0.5 * (al - tt).squaredNorm();
        out.grad_alpha = -(al - tt);
        return out;
    };
    return m;
}

inline ParametricModel ParametricModel::k_mixture_known(std::vector<NormalComponent> components) {
    const int k = static_cast<int>(components.size());
    if (k < 2) throw std::invalid_argument("k_mixture_known: needs at least two components");
    ParametricModel m;
    m.name_ = "k_mixture_known";
    m.param_dim_ = k - 1;
    m.obs_dim_ = 1;
    m.param_box_ = uniform_box(k - 1, 0.0, 1.0);
    m.support_ = {SupportKind::LebesgueInterval, -kInf, kInf, {}};
    auto comps = std::make_shared<std::vector<NormalComponent>>(std::move(components));

    auto weights = [k](const Vec& th) {
        Vec w(k);
        double acc = 0.0;
        for (int i = 0; i < k - 1; ++i) {
            w[i] = th[i];
            acc += th[i];
        }
        w[k - 1] = 1.0 - acc;
        return w;
    };
    m.log_density_ = [comps, weights, k](const Vec& th, const Vec& x) {
        Vec w = weights(th);
        double p = 0.0;
        for (int i = 0; i < k; ++i) {
            if (w[i] < 0.0) return -kInf;  // outside the simplex
            p += w[i] * std::exp(detail::normal_log_pdf(x[0], (*comps)[i].mean, (*comps)[i].sd));
        }
        return p > 0.0 ? std::log(p) : -kInf;
    };
    m.score_ = [comps, weights, k](const Vec& th, const Vec& x) {
        Vec w = weights(th);
        double p = 0.0;
        Vec pi(k);
        for (int i = 0; i < k; ++i) {
            pi[i] = std::exp(detail::normal_log_pdf(x[0], (*comps)[i].mean, (*comps)[i].sd));
            p += w[i] * pi[i];
        }
        Vec g(k - 1);
        for (int i = 0; i < k - 1; ++i) g[i] = (pi[i] - pi[k - 1]) / p;
        return g;
    };
    m.draw_ = [comps, weights, k](const Vec& th, Rng& rng) {
        Vec w = weights(th);
        int idx = rng.categorical(w);
        return vec1(rng.normal((*comps)[idx].mean, (*comps)[idx].sd));
    };
    auto cdf = [comps, weights, k](const Vec& th, double x) {
        Vec w = weights(th);
        double acc = 0.0;
        for (int i = 0; i < k; ++i)
            acc += w[i] * normal_cdf((x - (*comps)[i].mean) / (*comps)[i].sd);
        return acc;
    };
    m.quantile_ = [comps, cdf](const Vec& th, double p, int) {
        double lo = kInf, hi = -kInf;
        for (const auto& c : *comps) {
            lo = std::min(lo, c.mean + c.sd * normal_quantile(std::min(p, 1e-12)));
            hi = std::max(hi, c.mean + c.sd * normal_quantile(std::max(p, 1.0 - 1e-12)));
        }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (cdf(th, mid) < p)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-12 * std::max(1.0, std::fabs(hi))) break;
        }
        return 0.5 * (lo + hi);
    };
    m.pilot_ = [comps, k](const Mat& s) {
        // Match the sample mean against component means, uniform fallback.
        Vec th = Vec::Constant(k - 1, 1.0 / k);
        if (k == 2) {
            double m0 = (*comps)[0].mean, m1 = (*comps)[1].mean;
            if (std::fabs(m1 - m0) > 1e-12) {
                double w1 = (s.row(0).mean() - m0) / (m1 - m0);
                th[0] = std::min(1.0, std::max(0.0, 1.0 - w1));
            }
        }
        return th;
    };
    return m;
}

inline ParametricModel ParametricModel::two_mixture_known(NormalComponent p0, NormalComponent p1) {
    // Weight parameter theta multiplies p1: p_theta = (1-theta) p0 + theta p1.
    ParametricModel m = k_mixture_known({p1, p0});
    m.name_ = "two_mixture_known";
    // k_mixture parameterizes the first component's weight; ordering (p1, p0)
    // makes theta the weight of p1 as in the mixture test problem.
    return m;
}

inline ParametricModel ParametricModel::finite_tilt(std::vector<double> points) {
    if (points.size() < 2) throw std::invalid_argument("finite_tilt: needs at least two points");
    ParametricModel m;
    m.name_ = "finite_tilt";
    m.param_dim_ = 1;
    m.obs_dim_ = 1;
    m.param_box_ = {Interval{-10.0, 10.0}};
    m.support_ = {SupportKind::CountingFinite, points.front(), points.back(), points};
    auto pts = std::make_shared<std::vector<double>>(std::move(points));
    auto log_norm = [pts](double th) {
        double zmax = -kInf;
        for (double p : *pts) zmax = std::max(zmax, th * p);
        double acc = 0.0;
        for (double p : *pts) acc += std::exp(th * p - zmax);
        return zmax + std::log(acc);
    };
    m.log_density_ = [log_norm](const Vec& th, const Vec& x) {
        return th[0] * x[0] - log_norm(th[0]);
    };
    m.draw_ = [pts, log_norm](const Vec& th, Rng& rng) {
        double u = rng.uniform();
        double acc = 0.0;
        double z = log_norm(th[0]);
        for (double p : *pts) {
            acc += std::exp(th[0] * p - z);
            if (u < acc) return vec1(p);
        }
        return vec1(pts->back());
    };
    m.quantile_ = [pts](const Vec&, double p, int) {
        return p < 0.5 ? pts->front() : pts->back();
    };
    return m;
}

struct BuiltinParams {
    Interval mean_box{-1e6, 1e6};
    Interval rate_box{1e-6, 1e6};
    int dim = 2;
    std::vector<ParametricModel::NormalComponent> components;
};

inline ParametricModel make_builtin(BuiltinName name, const BuiltinParams& params = {}) {
    switch (name) {
        case BuiltinName::GaussianMean:
            return ParametricModel::gaussian_mean(params.mean_box);
        case BuiltinName::Exponential:
            return ParametricModel::exponential_rate(params.rate_box);
        case BuiltinName::GaussianMeanVector:
            return ParametricModel::gaussian_mean_vector(params.dim, params.mean_box);
        case BuiltinName::TwoMixtureKnown: {
            if (params.components.size() != 2)
                throw std::invalid_argument("two_mixture: exactly two components required");
            return ParametricModel::two_mixture_known(params.components[0], params.components[1]);
        }
        case BuiltinName::KMixture:
            return ParametricModel::k_mixture_known(params.components);
    }
    throw std::invalid_argument("make_builtin: unknown model name");
}

/// Signed-measure extension of the k-component mixture: weights still sum to
/// one but may leave [0,1], so the signed density (1-theta) p0 + theta p1 may
/// cross zero in the tails.
class MixtureExtendedModel {
  public:
    MixtureExtendedModel(std::vector<ParametricModel::NormalComponent> components,
                         Box extended_weight_box)
        : components_(std::move(components)), extended_box_(std::move(extended_weight_box)) {
        k_ = static_cast<int>(components_.size());
        if (k_ < 2) throw std::invalid_argument("mixture: needs at least two components");
        if (static_cast<int>(extended_box_.size()) != k_ - 1)
            throw std::invalid_argument("mixture: extended box must have k-1 coordinates");
        prob_model_ = std::make_shared<ParametricModel>(ParametricModel::k_mixture_known(components_));
    }

    /// k = 2 convenience: p_theta = (1-theta) p0 + theta p1, theta the free
    /// weight of p1.
    static MixtureExtendedModel two_known(ParametricModel::NormalComponent p0,
                                          ParametricModel::NormalComponent p1,
                                          Interval weight_box = {-0.5, 1.5}) {
        return MixtureExtendedModel({p1, p0}, Box{weight_box});
    }

    int k() const { return k_; }
    int param_dim() const { return k_ - 1; }
    const Box& extended_weight_box() const { return extended_box_; }
    const std::vector<ParametricModel::NormalComponent>& components() const { return components_; }
    /// Frozen components carry no free parameters; the chi-squared dof for
    /// the confidence-region statistic is k - 1 + sum(d_i).
    int cr_dof() const { return k_ - 1; }

    Vec weights(const Vec& th) const {
        Vec w(k_);
        double acc = 0.0;
        for (int i = 0; i < k_ - 1; ++i) {
            w[i] = th[i];
            acc += th[i];
        }
        w[k_ - 1] = 1.0 - acc;
        return w;
    }

    bool in_probability_regime(const Vec& th) const {
        Vec w = weights(th);
        for (int i = 0; i < k_; ++i)
            if (w[i] < 0.0 || w[i] > 1.0) return false;
        return true;
    }

    /// Direct-arithmetic signed density; may be nonpositive outside [0,1].
    double signed_density(const Vec& th, double x) const {
        Vec w = weights(th);
        double p = 0.0;
        for (int i = 0; i < k_; ++i)
            p += w[i] * std::exp(detail::normal_log_pdf(x, components_[i].mean, components_[i].sd));
        return p;
    }

    /// The probability-regime mixture as a ParametricModel (sampling, GLR,
    /// truncation quantiles).
    const ParametricModel& probability_model() const { return *prob_model_; }

  private:
    std::vector<ParametricModel::NormalComponent> components_;
    Box extended_box_;
    int k_ = 0;
    std::shared_ptr<ParametricModel> prob_model_;
};

}  // namespace dualdiv
