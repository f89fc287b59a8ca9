#include <catch2/catch_amalgamated.hpp>

#include "dualdiv/ecdf.hpp"
#include "dualdiv/rng.hpp"
#include "dualdiv/special.hpp"

using namespace dualdiv;

namespace {

ReferenceCdf half_mass_reference() {
    return ReferenceCdf{[](double x) { return x < 0.0 ? 0.0 : 0.5 + 0.5 * chi2_cdf(1, x); },
                        [](double x) { return x <= 0.0 ? 0.0 : 0.5 + 0.5 * chi2_cdf(1, x); }};
}

}  // namespace

TEST_CASE("atom handling against the half-mass mixture") {
    std::vector<double> zeros(4, 0.0);
    CHECK(ecdf_ks(zeros, half_mass_reference()) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("matching atom gives zero distance") {
    ReferenceCdf dirac{[](double x) { return x < 1.0 ? 0.0 : 1.0; },
                       [](double x) { return x <= 1.0 ? 0.0 : 1.0; }};
    CHECK(ecdf_ks({1.0}, dirac) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("large sample from the reference is close in KS distance") {
    Rng rng(99);
    std::vector<double> sample(100000);
    for (auto& s : sample) s = rng.normal();
    EcdfSummary ecdf(std::move(sample));
    double d = ecdf.ks_distance_to([](double x) { return normal_cdf(x); });
    CHECK(d < 0.01);
    CHECK(d >= 0.0);
}

TEST_CASE("empty samples are rejected") {
    CHECK_THROWS_AS(EcdfSummary(std::vector<double>{}), std::invalid_argument);
}
