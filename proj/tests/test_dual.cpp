#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dualdiv/dual.hpp"
#include "dualdiv/optimize.hpp"

using namespace dualdiv;

namespace {

/// Brute-force divergence oracle: quadrature of phi(p_theta/p_thetaT) dP_thetaT.
double divergence_quadrature(const ParametricModel& model, const DivergenceSpec& spec,
                             const Vec& theta, const Vec& theta_t) {
    auto r = model.integrate_against(theta_t, [&](const Vec& x) {
        double ratio = std::exp(model.log_density(theta, x) - model.log_density(theta_t, x));
        return spec.phi(ratio).value;
    });
    REQUIRE(r.ok);
    return r.value;
}

}  // namespace

TEST_CASE("kernels vanish at alpha = theta") {
    auto gauss = ParametricModel::gaussian_mean();
    for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        DualObjective dual(gauss, DivergenceSpec::power(g));
        for (double x : {-1.3, 0.0, 2.4}) {
            auto k = dual.kernels(vec1(0.7), vec1(0.7), vec1(x));
            CHECK(k.f == 0.0);
            CHECK(k.g == 0.0);
            CHECK(k.h_without_moment == 0.0);
        }
    }
}

TEST_CASE("kernel values against closed forms") {
    auto gauss = ParametricModel::gaussian_mean();
    // gamma = 0 at x = 0 with theta = 0, alpha = 1: r = exp(1/2).
    DualObjective klm(gauss, DivergenceSpec::power(0.0));
    auto k = klm.kernels(vec1(0.0), vec1(1.0), vec1(0.0));
    CHECK(k.f == Catch::Approx(0.39346934028736658).epsilon(1e-13));
    CHECK(k.g == Catch::Approx(0.5).epsilon(1e-13));
    CHECK(k.h_without_moment == Catch::Approx(-0.5).epsilon(1e-13));

    // gamma = 2 at ratio 3: f = 2, g = 4 (polynomial arithmetic).
    auto spec = DivergenceSpec::power(2.0);
    double r = 3.0;
    CHECK(spec.phi(r).d1 == Catch::Approx(2.0));
    CHECK(r * spec.phi(r).d1 - spec.phi(r).value == Catch::Approx(4.0));
}

TEST_CASE("moment term closed forms, shortcuts and quadrature agree") {
    auto gauss = ParametricModel::gaussian_mean();

    // Remark 3.2: gamma = 0 moment term is identically zero.
    DualObjective klm(gauss, DivergenceSpec::power(0.0));
    for (double a : {-1.0, 0.3, 2.0}) {
        auto m = klm.moment_term(vec1(0.8), vec1(a));
        REQUIRE(m.ok);
        CHECK(m.value == 0.0);
    }

    // Any gamma at alpha = theta: phi'(1) = 0.
    for (double g : {-1.0, 0.5, 1.0, 2.0}) {
        DualObjective dual(gauss, DivergenceSpec::power(g));
        auto m = dual.moment_term(vec1(0.4), vec1(0.4));
        REQUIRE(m.ok);
        CHECK(std::fabs(m.value) < 1e-12);
    }

    // gamma = 2 gaussian closed form e^{(theta-alpha)^2} - 1, checked against
    // the quadrature route.
    DualObjective chi2(gauss, DivergenceSpec::power(2.0));
    auto m = chi2.moment_term(vec1(0.0), vec1(0.5));
    REQUIRE(m.ok);
    CHECK(m.value == Catch::Approx(0.28402541668774148).epsilon(1e-12));
    auto quad = gauss.integrate_against(vec1(0.0), [&](const Vec& x) {
        return chi2.kernels(vec1(0.0), vec1(0.5), x).f;
    });
    REQUIRE(quad.ok);
    CHECK(quad.value == Catch::Approx(m.value).margin(1e-8));

    // Exponential closed form against quadrature for several gammas.
    auto expo = ParametricModel::exponential_rate();
    for (double g : {0.5, 1.0, 2.0}) {
        DualObjective dual(expo, DivergenceSpec::power(g));
        auto closed = dual.moment_term(vec1(1.3), vec1(0.9));
        auto direct = expo.integrate_against(vec1(1.3), [&](const Vec& x) {
            return dual.kernels(vec1(1.3), vec1(0.9), x).f;
        });
        REQUIRE(closed.ok);
        REQUIRE(direct.ok);
        CHECK(closed.value == Catch::Approx(direct.value).margin(1e-7));
    }

    // Exponential chi2 moment diverges when 2 theta - alpha <= 0.
    DualObjective expo_chi2(expo, DivergenceSpec::power(2.0));
    auto div = expo_chi2.moment_term(vec1(0.5), vec1(1.2));
    CHECK_FALSE(div.ok);
}

TEST_CASE("empirical objective: KLm reduces to a log-likelihood difference") {
    auto gauss = ParametricModel::gaussian_mean();
    DualObjective klm(gauss, DivergenceSpec::power(0.0));
    Mat sample(1, 3);
    sample << -0.4, 0.9, 2.2;
    Vec th = vec1(0.5), al = vec1(1.1);
    double got = klm.empirical_objective(th, al, sample);
    double want = 0.0;
    for (int j = 0; j < 3; ++j)
        want += gauss.log_density(al, sample.col(j)) - gauss.log_density(th, sample.col(j));
    want /= 3.0;
    CHECK(got == Catch::Approx(want).epsilon(1e-12));
    CHECK(klm.empirical_objective(th, th, sample) == 0.0);
}

TEST_CASE("empirical objective assembles the section-4 mixture kernels") {
    // gamma = 2, theta = 0: f(0,alpha) = p0/p_alpha - 1 and
    // g(0,alpha) = (1/2)(p0/p_alpha + 1)(p0/p_alpha - 1).
    auto ext = MixtureExtendedModel::two_known({0.0, 1.0}, {0.5, 1.0});
    DualObjective dual(ext, DivergenceSpec::power(2.0));
    Mat sample(1, 5);
    sample << -1.1, -0.2, 0.3, 0.9, 2.0;
    Vec th = vec1(0.0), al = vec1(0.35);

    auto p0 = [](double x) { return normal_pdf(x); };
    auto p1 = [](double x) { return normal_pdf(x - 0.5); };
    auto palpha = [&](double x) { return 0.65 * p0(x) + 0.35 * p1(x); };

    auto fm = dual.moment_term(th, al);
    REQUIRE(fm.ok);
    double gsum = 0.0;
    for (int j = 0; j < 5; ++j) {
        double r = p0(sample(0, j)) / palpha(sample(0, j));
        gsum += 0.5 * (r + 1.0) * (r - 1.0);
    }
    double assembled = fm.value - gsum / 5.0;
    CHECK(dual.empirical_objective(th, al, sample) == Catch::Approx(assembled).epsilon(1e-12));

    // And the moment term matches direct quadrature of p0^2/p_alpha - 1.
    auto direct = integrate_adaptive(
        [&](double x) { return p0(x) * p0(x) / palpha(x); },
        ext.probability_model().quantile(th, 1e-10, 0),
        ext.probability_model().quantile(th, 1.0 - 1e-10, 0));
    REQUIRE(direct.ok());
    CHECK(fm.value == Catch::Approx(direct.value - 1.0).margin(1e-8));
}

TEST_CASE("population objective closed forms (location and rate examples)") {
    auto gauss = ParametricModel::gaussian_mean();
    DualObjective klm_gauss(gauss, DivergenceSpec::power(0.0));
    // (theta - theta_T)^2/2 - (alpha - theta_T)^2/2 at (1, 0.5, 0).
    CHECK(klm_gauss.population_objective(vec1(1.0), vec1(0.5), vec1(0.0)) ==
          Catch::Approx(0.375).epsilon(1e-12));

    auto expo = ParametricModel::exponential_rate();
    DualObjective klm_expo(expo, DivergenceSpec::power(0.0));
    // -log theta + theta/theta_T + log alpha - alpha/theta_T at (2, 1, 1):
    // 1 - log 2.
    CHECK(klm_expo.population_objective(vec1(2.0), vec1(1.0), vec1(1.0)) ==
          Catch::Approx(0.30685281944005469).epsilon(1e-12));
}

TEST_CASE("population objective at alpha = theta_T equals the divergence") {
    auto gauss = ParametricModel::gaussian_mean();
    auto expo = ParametricModel::exponential_rate();
    for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        DivergenceSpec spec = DivergenceSpec::power(g);
        DualObjective dg(gauss, spec);
        double got = dg.population_objective(vec1(0.8), vec1(0.2), vec1(0.2));
        double want = divergence_quadrature(gauss, spec, vec1(0.8), vec1(0.2));
        CHECK(got == Catch::Approx(want).margin(1e-6));

        if (g == 2.0) continue;  // chi2 moment diverges for this rate pair
        DualObjective de(expo, spec);
        double got_e = de.population_objective(vec1(1.4), vec1(1.1), vec1(1.1));
        double want_e = divergence_quadrature(expo, spec, vec1(1.4), vec1(1.1));
        CHECK(got_e == Catch::Approx(want_e).margin(1e-6));
    }
}

TEST_CASE("population optimum sits at theta_T with the divergence as value") {
    auto gauss = ParametricModel::gaussian_mean();
    Rng rng(314);
    for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        DivergenceSpec spec = DivergenceSpec::power(g);
        DualObjective dual(gauss, spec);
        for (int trial = 0; trial < 4; ++trial) {
            Vec theta = vec1(2.0 * rng.uniform() - 1.0);
            Vec theta_t = vec1(2.0 * rng.uniform() - 1.0);
            Objective obj = [&](const Vec& a) {
                return dual.population_objective_grad(theta, a, theta_t);
            };
            auto rep = maximize(obj, {Interval{-5.0, 5.0}}, vec1(0.1), 1e-8);
            REQUIRE(rep.converged);
            CHECK(std::fabs(rep.argopt[0] - theta_t[0]) < 1e-5);
            double want = divergence_quadrature(gauss, spec, theta, theta_t);
            CHECK(rep.value == Catch::Approx(want).margin(1e-6));
        }
    }
}

TEST_CASE("nonnegativity of the population objective at the optimum") {
    auto gauss = ParametricModel::gaussian_mean();
    for (double g : {0.0, 0.5, 2.0}) {
        DualObjective dual(gauss, DivergenceSpec::power(g));
        for (double th : {-0.7, 0.0, 1.2}) {
            double v = dual.population_objective(vec1(th), vec1(0.3), vec1(0.3));
            CHECK(v >= -1e-12);
            if (std::fabs(th - 0.3) < 1e-12) CHECK(std::fabs(v) < 1e-12);
        }
    }
}

TEST_CASE("empirical objective approaches the population objective") {
    auto gauss = ParametricModel::gaussian_mean();
    DualObjective dual(gauss, DivergenceSpec::power(0.0));
    const int n = 100000;
    Mat sample = gauss.sample(vec1(0.0), n, 42);
    double bound = 5.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            Vec th = vec1(-0.9 + 0.2 * i);
            Vec al = vec1(-0.9 + 0.2 * j);
            double emp = dual.empirical_objective(th, al, sample);
            double pop = dual.population_objective(th, al, vec1(0.0));
            REQUIRE(std::fabs(emp - pop) < bound);
        }
    }
}

TEST_CASE("score-zero identity at alpha = theta_T") {
    // P_thetaT (d/dalpha) h(theta, alpha) = 0 at alpha = theta_T, checked by
    // quadrature of the derivative kernel.
    auto gauss = ParametricModel::gaussian_mean();
    auto expo = ParametricModel::exponential_rate();
    for (double g : {0.0, 0.5, 2.0}) {
        DualObjective dual(gauss, DivergenceSpec::power(g));
        Eval e = dual.population_objective_grad(vec1(0.9), vec1(0.2), vec1(0.2));
        CHECK(std::fabs(e.grad[0]) < 1e-6);

        DualObjective duale(expo, DivergenceSpec::power(g));
        Eval ee = duale.population_objective_grad(vec1(1.2), vec1(1.0), vec1(1.0));
        CHECK(std::fabs(ee.grad[0]) < 1e-6);
    }
}

TEST_CASE("analytic alpha-gradients match finite differences") {
    auto gauss = ParametricModel::gaussian_mean();
    auto mixext = MixtureExtendedModel::two_known({0.0, 1.0}, {0.5, 1.0});
    Mat sample = gauss.sample(vec1(0.2), 200, 9);
    const double h = 1e-6;
    for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        DualObjective dual(gauss, DivergenceSpec::power(g));
        Vec th = vec1(0.4), al = vec1(0.1);
        Eval e = dual.empirical_objective_grad(th, al, sample);
        double up = dual.empirical_objective(th, vec1(0.1 + h), sample);
        double dn = dual.empirical_objective(th, vec1(0.1 - h), sample);
        CHECK(e.value == Catch::Approx(dual.empirical_objective(th, al, sample)).epsilon(1e-12));
        CHECK(e.grad[0] == Catch::Approx((up - dn) / (2 * h)).margin(1e-5));
    }
    // signed regime
    Mat msample = mixext.probability_model().sample(vec1(0.0), 200, 11);
    DualObjective sdual(mixext, DivergenceSpec::power(2.0));
    Vec th0 = vec1(0.0), al = vec1(0.12);
    Eval e = sdual.empirical_objective_grad(th0, al, msample);
    double up = sdual.empirical_objective(th0, vec1(0.12 + h), msample);
    double dn = sdual.empirical_objective(th0, vec1(0.12 - h), msample);
    CHECK(e.grad[0] == Catch::Approx((up - dn) / (2 * h)).margin(1e-4));
}

TEST_CASE("moment cache returns the quadrature value") {
    auto mix = ParametricModel::two_mixture_known({0.0, 1.0}, {0.5, 1.0});
    DualObjective dual(mix, DivergenceSpec::power(2.0));
    Vec th = vec1(0.2), al = vec1(0.4);
    auto first = dual.moment_term(th, al);
    auto second = dual.moment_term(th, al);  // cached
    REQUIRE(first.ok);
    CHECK(first.value == second.value);
    auto fresh = mix.integrate_against(
        th, [&](const Vec& x) { return dual.kernels(th, al, x).f; });
    REQUIRE(fresh.ok);
    CHECK(std::fabs(first.value - fresh.value) < 1e-9);
}

TEST_CASE("signed-regime feasibility: strict nodes versus mass guard") {
    auto ext = MixtureExtendedModel::two_known({0.0, 1.0}, {0.5, 1.0});
    DualOptions strict;
    strict.feasibility = FeasibilityPolicy::StrictNodes;
    DualOptions guarded;
    guarded.feasibility = FeasibilityPolicy::MassGuard;

    DualObjective ds(ext, DivergenceSpec::power(2.0), strict);
    DualObjective dg(ext, DivergenceSpec::power(2.0), guarded);
    Vec th = vec1(0.0);

    // Inside [0,1] both agree and are feasible.
    auto both_in = ds.moment_term(th, vec1(0.4));
    auto both_in_g = dg.moment_term(th, vec1(0.4));
    REQUIRE(both_in.ok);
    REQUIRE(both_in_g.ok);
    CHECK(both_in.value == Catch::Approx(both_in_g.value).margin(1e-9));

    // Slightly negative alpha: the sign crossing sits in the far tail where
    // the strict rule already fails but the mass guard tolerates it.
    CHECK_FALSE(ds.moment_term(th, vec1(-0.08)).ok);
    CHECK(dg.moment_term(th, vec1(-0.08)).ok);

    // Far outside, the crossing carries visible mass: both infeasible.
    CHECK_FALSE(ds.moment_term(th, vec1(-0.45)).ok);
    CHECK_FALSE(dg.moment_term(th, vec1(-0.45)).ok);
}
