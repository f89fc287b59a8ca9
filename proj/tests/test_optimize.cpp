#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dualdiv/optimize.hpp"

using namespace dualdiv;

namespace {

Objective concave_quadratic(double center) {
    return [center](const Vec& x) {
        Eval e;
        e.value = -(x[0] - center) * (x[0] - center);
        e.grad = vec1(-2.0 * (x[0] - center));
        return e;
    };
}

}  // namespace

TEST_CASE("interior maximum of a concave quadratic") {
    auto rep = maximize(concave_quadratic(2.0), {Interval{0.0, 5.0}}, vec1(0.0));
    CHECK(rep.converged);
    CHECK(rep.argopt[0] == Catch::Approx(2.0).margin(1e-8));
    CHECK_FALSE(rep.boundary_active[0]);
}

TEST_CASE("projection pins the maximizer to the box face") {
    auto rep = maximize(concave_quadratic(2.0), {Interval{0.0, 1.0}}, vec1(0.0));
    CHECK(rep.argopt[0] == Catch::Approx(1.0).margin(1e-10));
    CHECK(rep.boundary_active[0]);
}

TEST_CASE("minimize wrapper finds the stationary point of -log x + x") {
    auto obj = [](const Vec& x) {
        Eval e;
        e.value = -std::log(x[0]) + x[0];
        e.grad = vec1(-1.0 / x[0] + 1.0);
        return e;
    };
    auto rep = minimize(obj, {Interval{0.1, 10.0}}, vec1(0.1));
    CHECK(rep.converged);
    CHECK(rep.argopt[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(rep.value == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("concave quadratics converge from any box corner within 50 iterations") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        // Random SPD curvature in 2D.
        double a = 1.0 + std::fabs(unif(gen)), c = 1.0 + std::fabs(unif(gen));
        double b = 0.5 * unif(gen);
        Vec center = vec2(unif(gen), unif(gen));
        Objective obj = [=](const Vec& x) {
            Vec d = x - center;
            Eval e;
            e.value = -(a * d[0] * d[0] + 2 * b * d[0] * d[1] + c * d[1] * d[1]);
            e.grad = vec2(-2 * (a * d[0] + b * d[1]), -2 * (b * d[0] + c * d[1]));
            return e;
        };
        Box box = {Interval{-3.0, 3.0}, Interval{-3.0, 3.0}};
        for (Vec corner : {vec2(-3, -3), vec2(-3, 3), vec2(3, -3), vec2(3, 3)}) {
            auto rep = maximize(obj, box, corner, 1e-8, 50);
            REQUIRE(rep.converged);
            REQUIRE(rep.gradient_norm < 1e-8);
        }
    }
}

TEST_CASE("infeasible regions are avoided by the line search") {
    // Objective is -inf left of 1; the maximizer sits at 2.
    Objective obj = [](const Vec& x) {
        Eval e;
        if (x[0] < 1.0) {
            e.value = -kInf;
            e.grad = vec1(0.0);
            return e;
        }
        e.value = -(x[0] - 2.0) * (x[0] - 2.0);
        e.grad = vec1(-2.0 * (x[0] - 2.0));
        return e;
    };
    auto rep = maximize(obj, {Interval{0.0, 10.0}}, vec1(5.0));
    CHECK(rep.converged);
    CHECK(rep.argopt[0] == Catch::Approx(2.0).margin(1e-8));
}

TEST_CASE("minimax solves the gaussian KLm saddle") {
    // P_h(theta, alpha) = (theta - t)^2/2 - (alpha - t)^2/2: saddle at (t, t).
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Box outer = {Interval{-5.0, 5.0}};
    Box inner = {Interval{-5.0, 5.0}};
    for (int trial = 0; trial < 20; ++trial) {
        double t = unif(gen);
        auto inner_for = [t](const Vec& th) -> Objective {
            double theta = th[0];
            return [theta, t](const Vec& a) {
                Eval e;
                e.value = 0.5 * (theta - t) * (theta - t) - 0.5 * (a[0] - t) * (a[0] - t);
                e.grad = vec1(-(a[0] - t));
                return e;
            };
        };
        auto res = minimax(inner_for, outer, inner, vec1(-4.0), vec1(4.0));
        REQUIRE(std::fabs(res.theta[0] - t) < 1e-6);
        REQUIRE(std::fabs(res.alpha[0] - t) < 1e-6);
        REQUIRE(std::fabs(res.value) < 1e-9);
    }
}

TEST_CASE("minimax on a plain quadratic saddle from a far corner") {
    auto inner_for = [](const Vec& th) -> Objective {
        double theta = th[0];
        return [theta](const Vec& a) {
            Eval e;
            e.value = (theta - 1.0) * (theta - 1.0) - (a[0] - 1.0) * (a[0] - 1.0);
            e.grad = vec1(-2.0 * (a[0] - 1.0));
            return e;
        };
    };
    auto res = minimax(inner_for, {Interval{-5, 5}}, {Interval{-5, 5}}, vec1(-5.0), vec1(5.0));
    CHECK(res.theta[0] == Catch::Approx(1.0).margin(1e-6));
    CHECK(res.alpha[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("degenerate outer objective stays at its initialization") {
    auto inner_for = [](const Vec&) -> Objective {
        return [](const Vec& a) {
            Eval e;
            e.value = -(a[0] - 0.7) * (a[0] - 0.7);
            e.grad = vec1(-2.0 * (a[0] - 0.7));
            return e;
        };
    };
    auto res = minimax(inner_for, {Interval{-1, 1}}, {Interval{-2, 2}}, vec1(0.25), vec1(0.0));
    CHECK(res.theta[0] == Catch::Approx(0.25).margin(1e-9));
    CHECK(res.value == Catch::Approx(0.0).margin(1e-12));
    CHECK(res.alpha[0] == Catch::Approx(0.7).margin(1e-7));
}
