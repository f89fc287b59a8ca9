#pragma once

// The power-divergence family phi_gamma and generic divergence specs:
// evaluation with first two derivatives, Fenchel conjugates, and domain
// bookkeeping. Infinities are semantic values here, not errors; they flow
// through as IEEE +inf sentinels.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "dualdiv/common.hpp"

namespace dualdiv {

struct PhiDerivatives {
    double value;
    double d1;
    double d2;
};

/// User-supplied divergence generator. phi must satisfy phi(1)=0, phi'(1)=0,
/// phi''(1)>0 and be strictly convex on (a_phi, b_phi). second_at_one is
/// required explicitly: the chi-squared statistic scale 2n/phi''(1) must not
/// depend on numeric differentiation.
struct CustomPhi {
    std::function<PhiDerivatives(double)> phi;
    std::function<double(double)> conjugate;  // optional closed form
    double a_phi = 0.0;
    double b_phi = kInf;
    double a_conj = -kInf;
    double b_conj = kInf;
    double second_at_one = 0.0;
    std::string name = "custom";
};

class DivergenceSpec {
  public:
    enum class Kind { PowerGamma, Custom };

    static DivergenceSpec power(double gamma) {
        DivergenceSpec s;
        s.kind_ = Kind::PowerGamma;
        s.gamma_ = gamma;
        s.a_phi_ = (gamma == 2.0) ? -kInf : 0.0;
        s.b_phi_ = kInf;
        s.a_conj_ = -kInf;
        s.b_conj_ = (gamma < 1.0) ? 1.0 / (1.0 - gamma) : kInf;
        s.second_at_one_ = 1.0;
        s.validate();
        return s;
    }

    static DivergenceSpec custom(CustomPhi cfg) {
        if (!cfg.phi) throw std::invalid_argument("custom divergence: phi callable required");
        DivergenceSpec s;
        s.kind_ = Kind::Custom;
        s.custom_ = std::move(cfg);
        s.a_phi_ = s.custom_.a_phi;
        s.b_phi_ = s.custom_.b_phi;
        s.a_conj_ = s.custom_.a_conj;
        s.b_conj_ = s.custom_.b_conj;
        s.second_at_one_ = s.custom_.second_at_one;
        s.validate();
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_power() const { return kind_ == Kind::PowerGamma; }
    double gamma() const { return gamma_; }
    double a_phi() const { return a_phi_; }
    double b_phi() const { return b_phi_; }
    double a_conj() const { return a_conj_; }
    double b_conj() const { return b_conj_; }
    double second_at_one() const { return second_at_one_; }

    std::string name() const {
        if (kind_ == Kind::Custom) return custom_.name;
        return "power(" + format_double(gamma_) + ")";
    }

    /// phi(x) with first and second derivative. Outside dom phi all three
    /// slots carry the +inf sentinel. At dom endpoints the limit values are
    /// returned (phi_gamma(0) := lim_{x->0} phi_gamma(x)).
    PhiDerivatives phi(double x) const {
        if (kind_ == Kind::Custom) return custom_.phi(x);
        return power_phi(gamma_, x);
    }

    /// Fenchel conjugate phi*(t) = sup_x {tx - phi(x)}. Closed forms for
    /// gamma in {0,1,2}; otherwise a safeguarded Newton solve of phi'(x)=t.
    /// Returns +inf outside [a_conj, b_conj].
    double conjugate(double t) const {
        if (kind_ == Kind::Custom && custom_.conjugate) return custom_.conjugate(t);
        if (kind_ == Kind::PowerGamma) {
            if (gamma_ == 0.0) return t < 1.0 ? -std::log1p(-t) : kInf;
            if (gamma_ == 1.0) return std::expm1(t);
            if (gamma_ == 2.0) return t + 0.5 * t * t;
        }
        return conjugate_numeric(t);
    }

    /// phi*(phi'(x)) = x phi'(x) - phi(x), evaluated directly so callers
    /// never compose conjugate() with phi() numerically.
    double conjugate_of_derivative(double x) const {
        if (!(x > a_phi_ && x < b_phi_))
            throw std::domain_error("conjugate_of_derivative: x outside open domain of phi");
        PhiDerivatives p = phi(x);
        return x * p.d1 - p.value;
    }

  private:
    DivergenceSpec() = default;

    static PhiDerivatives power_phi(double gamma, double x) {
        const PhiDerivatives inf_row{kInf, kInf, kInf};
        if (std::isnan(x)) return {x, x, x};
        if (gamma == 2.0) return {0.5 * (x - 1.0) * (x - 1.0), x - 1.0, 1.0};
        if (x < 0.0) return inf_row;
        if (x == 0.0) return power_phi_at_zero(gamma);

        const double u = x - 1.0;
        // log1p(u) is exact near 1 but collapses to log(0) once u rounds to
        // -1; plain log(x) takes over away from 1.
        const double lx = std::fabs(u) < 0.5 ? std::log1p(u) : std::log(x);
        if (gamma == 0.0) return {u - lx, 1.0 - 1.0 / x, 1.0 / (x * x)};
        if (gamma == 1.0) return {x * lx - u, lx, 1.0 / x};

        double value;
        if (std::fabs(u) < 1e-4) {
            // (x^g - g x + g - 1) loses all precision near x = 1; expand via
            // expm1/log1p so the O(u) parts cancel exactly.
            value = (std::expm1(gamma * lx) - gamma * u) / (gamma * (gamma - 1.0));
        } else {
            value = (std::pow(x, gamma) - gamma * x + gamma - 1.0) / (gamma * (gamma - 1.0));
        }
        double d1 = std::expm1((gamma - 1.0) * lx) / (gamma - 1.0);
        double d2 = std::pow(x, gamma - 2.0);
        return {value, d1, d2};
    }

    static PhiDerivatives power_phi_at_zero(double gamma) {
        // phi_gamma(0) = 1/gamma for gamma > 0, +inf for gamma <= 0.
        double value = gamma > 0.0 ? 1.0 / gamma : kInf;
        double d1;
        if (gamma > 1.0)
            d1 = -1.0 / (gamma - 1.0);
        else
            d1 = -kInf;
        double d2 = gamma < 2.0 ? kInf : (gamma == 2.0 ? 1.0 : 0.0);
        return {value, d1, d2};
    }

    double conjugate_numeric(double t) const {
        if (t > b_conj_) return kInf;
        if (t < a_conj_) return kInf;
        if (t == b_conj_ && std::isfinite(b_conj_)) {
            // Power family endpoint: sup_x {b* x - phi(x)} as x -> +inf.
            if (kind_ == Kind::PowerGamma) return gamma_ < 0.0 ? -1.0 / gamma_ : kInf;
            return kInf;
        }
        // For gamma > 1 the slope at 0+ is finite; below it the sup sits at
        // x = 0 with value -phi(0).
        if (kind_ == Kind::PowerGamma && gamma_ > 1.0 && t <= -1.0 / (gamma_ - 1.0))
            return -1.0 / gamma_;

        // Bracket phi'(x) = t around x = 1 (phi'(1) = 0).
        double lo = 1.0, hi = 1.0;
        if (t >= 0.0) {
            while (phi(hi).d1 < t) {
                hi *= 2.0;
                if (hi > 1e300 || hi >= b_phi_) return kInf;
            }
            lo = hi * 0.5 < 1.0 ? 1.0 : hi * 0.5;
            if (phi(lo).d1 > t) lo = 1.0;
        } else if (a_phi_ >= 0.0) {
            while (phi(lo).d1 > t) {
                lo *= 0.5;
                if (lo < 1e-300) return kInf;
            }
            hi = lo * 2.0 > 1.0 ? 1.0 : lo * 2.0;
            if (phi(hi).d1 < t) hi = 1.0;
        } else {
            // Domain reaches below zero (custom specs): walk down additively.
            double step = 1.0;
            while (phi(lo).d1 > t) {
                hi = lo;
                lo = std::max(lo - step, std::nextafter(a_phi_, kInf));
                step *= 2.0;
                if (lo < -1e300 || (std::isfinite(a_phi_) && lo <= a_phi_ && phi(lo).d1 > t))
                    return kInf;
            }
            if (phi(hi).d1 < t) hi = 1.0;
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            PhiDerivatives p = phi(x);
            double fx = p.d1 - t;
            if (fx > 0.0)
                hi = x;
            else
                lo = x;
            double xn = p.d2 > 0.0 && std::isfinite(p.d2) ? x - fx / p.d2 : 0.5 * (lo + hi);
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (std::fabs(xn - x) <= 1e-14 * std::max(1.0, std::fabs(x))) {
                x = xn;
                break;
            }
            x = xn;
        }
        PhiDerivatives p = phi(x);
        return x * p.d1 - p.value;
    }

    void validate() const {
        if (!(a_phi_ < 1.0 && 1.0 < b_phi_))
            throw std::invalid_argument("divergence spec: requires a_phi < 1 < b_phi");
        PhiDerivatives at1 = phi(1.0);
        if (std::fabs(at1.value) > 1e-12 || std::fabs(at1.d1) > 1e-12)
            throw std::invalid_argument("divergence spec: phi(1) and phi'(1) must vanish");
        if (!(second_at_one_ > 0.0) || std::fabs(at1.d2 - second_at_one_) > 1e-8 * second_at_one_)
            throw std::invalid_argument("divergence spec: phi''(1) must be positive and match");
        if (!(a_conj_ < 0.0 && 0.0 < b_conj_))
            throw std::invalid_argument("divergence spec: requires a_conj < 0 < b_conj");
        // Strict convexity spot check on a log grid inside the domain.
        for (double x : {0.05, 0.3, 0.8, 1.0, 1.6, 4.0, 30.0}) {
            if (x <= a_phi_ || x >= b_phi_) continue;
            double d2 = phi(x).d2;
            if (!(d2 > 0.0))
                throw std::invalid_argument("divergence spec: phi'' must be positive inside domain");
        }
        verify_conjugate_endpoints();
    }

    /// Checks a_conj = lim phi(y)/y as y -> -inf and b_conj likewise at +inf
    /// on a geometric grid, Aitken-accelerated since the chord slope can
    /// converge as slowly as y^(gamma-1). Skipped for infinite endpoints.
    void verify_conjugate_endpoints() const {
        auto accel = [&](double sign) {
            double s[5];
            for (int k = 0; k < 5; ++k) {
                double y = sign * std::pow(10.0, k + 2);
                s[k] = phi(y).value / y;
            }
            double best = s[4];
            double d1 = s[3] - s[2], d2 = s[4] - s[3];
            double denom = d2 - d1;
            if (std::isfinite(denom) && std::fabs(denom) > 1e-300) {
                double aitken = s[4] - d2 * d2 / denom;
                if (std::isfinite(aitken)) best = aitken;
            }
            return best;
        };
        if (std::isfinite(b_conj_)) {
            double est = accel(1.0);
            if (std::fabs(est - b_conj_) > 1e-3 * std::max(1.0, std::fabs(b_conj_)))
                throw std::invalid_argument("divergence spec: stated b_conj does not match phi(y)/y limit");
        }
        if (std::isfinite(a_conj_)) {
            double est = accel(-1.0);
            if (std::fabs(est - a_conj_) > 1e-3 * std::max(1.0, std::fabs(a_conj_)))
                throw std::invalid_argument("divergence spec: stated a_conj does not match phi(y)/y limit");
        }
    }

    Kind kind_ = Kind::PowerGamma;
    double gamma_ = 0.0;
    CustomPhi custom_;
    double a_phi_ = 0.0, b_phi_ = kInf;
    double a_conj_ = -kInf, b_conj_ = kInf;
    double second_at_one_ = 1.0;
};

}  // namespace dualdiv
