#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dynlab/poincare.hpp"

#include <cmath>

using namespace dynlab;

static MapSpec z2() { return MapSpec::unicritical(2, cplx(0.0, 0.0)); }
static MapSpec cheb() { return MapSpec::unicritical(2, cplx(-2.0, 0.0)); }

TEST_CASE("poincare level sums for z^2 at z=3") {
    auto crit = critical_points(z2());
    auto p2 = poincare_partial(z2(), cplx(3.0, 0.0), 2.0, 12, crit);
    REQUIRE(p2.level_sums.size() == 12);
    CHECK(!p2.admissibility_warning);
    // level sums ~ 2^-n-2: cumulative converges (tail increments shrink)
    CHECK(p2.level_sums[11] < p2.level_sums[0] * 0.01);
    CHECK(p2.cumulative[11] - p2.cumulative[8] < 0.01 * p2.cumulative[8]);

    auto p05 = poincare_partial(z2(), cplx(3.0, 0.0), 0.5, 12, crit);
    // clear divergence: level sums grow like 2^(n/2)
    CHECK(p05.level_sums[11] > p05.level_sums[3] * 8.0);

    auto p0 = poincare_partial(z2(), cplx(3.0, 0.0), 1.0, 0, crit);
    CHECK(p0.level_sums.empty());  // empty truncation
}

TEST_CASE("inadmissible base points carry a warning but still compute") {
    auto crit = critical_points(cheb());
    auto p = poincare_partial(cheb(), cplx(2.0, 0.0), 1.5, 6, crit);
    CHECK(p.admissibility_warning);
    CHECK(p.level_sums.size() == 6);
}

TEST_CASE("restricted series equals full series away from critical points") {
    auto crit = critical_points(z2());
    double delta = 1.2;
    auto full = poincare_partial(z2(), cplx(1.0, 0.0), delta, 8, crit);
    auto restr = restricted_poincare_partial(z2(), cplx(1.0, 0.0), delta, 0.15, 8, crit);
    REQUIRE(restr.level_sums.size() == 8);
    for (int n = 0; n < 8; ++n)
        CHECK(restr.level_sums[n] == doctest::Approx(full.level_sums[n]).epsilon(1e-9));

    // restriction bound holds levelwise for chebyshev near the critical orbit
    auto crit2 = critical_points(cheb());
    cplx zb(1.99, 0.0);
    auto f2 = poincare_partial(cheb(), zb, 1.0, 8, crit2);
    auto r2 = restricted_poincare_partial(cheb(), zb, 1.0, 0.02, 8, crit2);
    bool strictly_less_somewhere = false;
    for (int n = 0; n < 8; ++n) {
        CHECK(r2.level_sums[n] <= f2.level_sums[n] * (1.0 + 1e-12));
        if (r2.level_sums[n] < f2.level_sums[n] * 0.999) strictly_less_somewhere = true;
    }
    CHECK(strictly_less_somewhere);  // the branches through 0's neighborhood drop out
}

TEST_CASE("monotonicity of level sums in delta when moduli exceed one") {
    auto crit = critical_points(z2());
    auto a = poincare_partial(z2(), cplx(3.0, 0.0), 0.8, 10, crit);
    auto b = poincare_partial(z2(), cplx(3.0, 0.0), 1.3, 10, crit);
    for (int n = 0; n < 10; ++n) CHECK(a.level_sums[n] >= b.level_sums[n]);
}

TEST_CASE("exponent estimates hit the circle and segment dimension") {
    auto crit = critical_points(z2());
    auto est = estimate_poincare_exponent(z2(), cplx(3.0, 0.0), 14, 0.05, crit);
    REQUIRE(est.conclusive);
    CHECK(est.value > 0.9);
    CHECK(est.value < 1.1);
    CHECK(est.hi - est.lo <= 0.05 * 1.0001);

    auto crit2 = critical_points(cheb());
    auto est2 = estimate_poincare_exponent(cheb(), cplx(1.0, 1.0), 14, 0.05, crit2);
    REQUIRE(est2.conclusive);
    CHECK(est2.value > 0.9);
    CHECK(est2.value < 1.1);
}

TEST_CASE("base point stability of the exponent") {
    auto crit = critical_points(z2());
    double tol = 0.05;
    std::vector<cplx> bases{{3.0, 0.0}, {2.0, 1.0}, {0.3, 0.1}};
    std::vector<double> est;
    for (auto z : bases) {
        auto e = estimate_poincare_exponent(z2(), z, 14, tol, crit);
        REQUIRE(e.conclusive);
        est.push_back(e.value);
    }
    for (size_t i = 0; i < est.size(); ++i)
        for (size_t j = i + 1; j < est.size(); ++j)
            CHECK(std::abs(est[i] - est[j]) <= 2.0 * tol);
}

TEST_CASE("divergence probe at and around the critical exponent") {
    auto crit = critical_points(z2());
    auto est = estimate_poincare_exponent(z2(), cplx(3.0, 0.0), 14, 0.05, crit);
    REQUIRE(est.conclusive);

    auto at = divergence_type_probe(z2(), cplx(3.0, 0.0), est.value, 14);
    CHECK(at.verdict == DivergenceVerdict::DivergentConsistent);

    auto above = divergence_type_probe(z2(), cplx(3.0, 0.0), est.value + 0.3, 14);
    CHECK(above.verdict == DivergenceVerdict::ConvergentSide);

    auto below = divergence_type_probe(z2(), cplx(3.0, 0.0), est.value - 0.3, 14);
    CHECK(below.verdict == DivergenceVerdict::DivergentConsistent);
    CHECK(below.growth_law == "geometric");
}
