#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dynlab/real_dynamics.hpp"

#include <cmath>

using namespace dynlab;

static IntervalMap logistic() {
    // 4x(1-x) = 4x - 4x^2 on [0, 1]
    return IntervalMap::from_real_coeffs({0.0, 4.0, -4.0}, 0.0, 1.0);
}

TEST_CASE("interval map basics and invariance") {
    auto f = logistic();
    CHECK(f.invariant);
    CHECK(f.eval(0.5) == doctest::Approx(1.0));
    auto crit = f.critical_points_interior();
    REQUIRE(crit.size() == 1);
    CHECK(crit[0] == doctest::Approx(0.5));

    auto pre = f.real_preimages(0.75);
    REQUIRE(pre.size() == 2);
    CHECK(pre[0] == doctest::Approx(0.25));
    CHECK(pre[1] == doctest::Approx(0.75));

    // a non-invariant map is flagged
    auto g = IntervalMap::from_real_coeffs({0.0, 6.0, -6.0}, 0.0, 1.0);
    CHECK(!g.invariant);
}

TEST_CASE("schwarzian values from the closed form") {
    auto f = logistic();
    CHECK(schwarzian(f, 0.0) == doctest::Approx(-6.0));

    // x^3 at 1: 6/3 - (3/2)(6/3)^2 = -4
    auto cube = IntervalMap::from_real_coeffs({0.0, 0.0, 0.0, 1.0}, 0.25, 1.5);
    CHECK(schwarzian(cube, 1.0) == doctest::Approx(-4.0));

    // Moebius maps are annihilated
    auto moeb = IntervalMap::from_rational({1.0, 2.0}, {3.0, 1.0}, 0.0, 1.0);
    CHECK(schwarzian(moeb, 0.3) == doctest::Approx(0.0).epsilon(1e-9));

    // derivative vanishes: domain error
    CHECK_THROWS_AS(schwarzian(f, 0.5), std::domain_error);
}

TEST_CASE("negative schwarzian check") {
    auto f = logistic();
    auto ck = negative_schwarzian_check(f, 10000);
    CHECK(ck.negative_everywhere);
    CHECK(ck.max_value <= -6.0 * (1.0 - 1e-9));  // S = -6/(1-2x)^2 <= -6

    auto moeb = IntervalMap::from_rational({1.0, 2.0}, {3.0, 1.0}, 0.0, 1.0);
    auto cm = negative_schwarzian_check(moeb, 1000);
    CHECK(!cm.negative_everywhere);
    CHECK(std::abs(cm.max_value) < 1e-9);  // identically zero, margin 0
}

TEST_CASE("real transfer operator reaches the arcsine density") {
    auto f = logistic();
    std::vector<double> grid;
    for (double x = 0.05; x <= 0.95 + 1e-12; x += 0.05) grid.push_back(x);
    auto est = real_transfer_apply(f, grid, 18);
    for (size_t i = 0; i < grid.size(); ++i) {
        if (est.skipped[i]) continue;
        double oracle = 1.0 / (M_PI * std::sqrt(grid[i] * (1.0 - grid[i])));
        CHECK(std::abs(est.values[i] - oracle) / oracle < 0.05);
    }

    // N = 0 leaves the uniform density unchanged
    auto e0 = real_transfer_apply(f, grid, 0);
    for (size_t i = 0; i < grid.size(); ++i)
        CHECK(e0.values[i] == doctest::Approx(1.0));
}

TEST_CASE("the arcsine density is an exact fixed point of one application") {
    auto f = logistic();
    auto rho = [](double x) { return 1.0 / (M_PI * std::sqrt(x * (1.0 - x))); };
    std::vector<double> grid;
    for (double x = 0.05; x <= 0.95 + 1e-12; x += 0.01) grid.push_back(x);
    auto once = real_transfer_once(f, rho, grid);
    double worst = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(once[i] - rho(grid[i])));
    CHECK(worst < 1e-3);
}

TEST_CASE("transfer preserves the total integral") {
    // L(1)(x) = 1/(2 sqrt(1-x)) for the logistic map: integrable square-root
    // singularity at the critical value. Trapezoid over the interior plus the
    // closed-form tail correction 2h L(1-h) resolves the integral to 1e-6.
    auto f = logistic();
    std::vector<double> grid;
    int n = 20000;
    for (int i = 1; i < n; ++i) grid.push_back(double(i) / n);
    auto rho = [](double) { return 1.0; };
    // smooth part [0, 0.9] by trapezoid, singular part [0.9, 1] under the
    // substitution u = sqrt(1-x), which flattens the sqrt singularity
    grid.clear();
    for (int i = 0; i <= n; ++i) grid.push_back(0.9 * double(i) / n);
    auto smooth = real_transfer_once(f, rho, grid);
    double h = 0.9 / n;
    double integral = 0.0;
    for (size_t i = 0; i + 1 < smooth.size(); ++i)
        integral += 0.5 * (smooth[i] + smooth[i + 1]) * h;

    // u = 0 would evaluate at the critical value itself; the first cell is
    // covered by constant extrapolation of the flattened integrand
    int m = 400;
    double ucap = std::sqrt(0.1);
    std::vector<double> ug;
    for (int i = 1; i <= m; ++i) {
        double u = ucap * double(i) / m;
        ug.push_back(1.0 - u * u);
    }
    auto tail = real_transfer_once(f, rho, ug);
    double hu = ucap / m;
    integral += hu * (2.0 * hu * tail[0]);
    for (int i = 1; i + 1 <= m; ++i) {
        double u0 = ucap * double(i) / m, u1 = ucap * double(i + 1) / m;
        integral += 0.5 * (2.0 * u0 * tail[i - 1] + 2.0 * u1 * tail[i]) * hu;
    }
    CHECK(std::abs(integral - 1.0) < 1e-6);
}

TEST_CASE("repelling periodic points up to period 6") {
    auto f = logistic();
    auto rep = repelling_periodic_check(f, 6);
    CHECK(rep.all_repelling);
    CHECK(rep.points_found > 10);

    // a map with an attracting fixed point fails the precondition
    auto g = IntervalMap::from_real_coeffs({0.0, 2.5, -2.5}, 0.0, 1.0);
    auto rg = repelling_periodic_check(g, 6);
    CHECK(!rg.all_repelling);
}

TEST_CASE("theorem 6 bundle on the logistic map") {
    auto f = logistic();
    std::vector<double> grid;
    for (double x = 0.05; x <= 0.95 + 1e-12; x += 0.05) grid.push_back(x);
    auto oracle = std::function<double(double)>(
        [](double x) { return 1.0 / (M_PI * std::sqrt(x * (1.0 - x))); });

    auto rep = interval_theorem6_report(f, 0.3, 30, 18, grid, &oracle);
    CHECK(rep.schwarzian_ok);
    CHECK(rep.periodic_ok);
    CHECK(rep.threshold_ok);  // 0.3 < 1/3
    CHECK(rep.mu_max == 2);
    CHECK(rep.summability == SummabilityVerdict::Converges);
    CHECK(rep.hypotheses_met);
    CHECK(rep.oracle_max_rel_err >= 0.0);
    CHECK(rep.oracle_max_rel_err < 0.05);
    // sigma_n = 4^n from the orbit 1/2 -> 1 -> 0 -> 0
    REQUIRE(rep.sigma.values.size() >= 3);
    CHECK(rep.sigma.values[0] == doctest::Approx(4.0));
    CHECK(rep.sigma.values[1] == doctest::Approx(16.0));
    CHECK(rep.sigma.values[2] == doctest::Approx(64.0));

    // alpha above the threshold: verdict flips, computation still emitted
    auto bad = interval_theorem6_report(f, 0.4, 30, 10, grid, &oracle);
    CHECK(!bad.threshold_ok);
    CHECK(!bad.hypotheses_met);
    CHECK(bad.note == "hypothesis not met");
    CHECK(!bad.density.values.empty());
}
