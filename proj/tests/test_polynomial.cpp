#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dynlab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace dynlab;

TEST_CASE("horner evaluation and derivative") {
    // p(z) = z^2 - 2
    Polynomial p({cplx(-2.0), cplx(0.0), cplx(1.0)});
    CHECK(p.degree() == 2);
    CHECK(std::abs(p.eval(cplx(2.0)) - cplx(2.0)) < 1e-15);
    auto [v, d] = p.eval_with_derivative(cplx(2.0));
    CHECK(std::abs(v - cplx(2.0)) < 1e-15);
    CHECK(std::abs(d - cplx(4.0)) < 1e-15);
}

TEST_CASE("aberth finds all roots of products of linear factors") {
    // (z-1)(z-2i)(z+3)(z-0.5-0.5i)
    std::vector<cplx> roots_in = {cplx(1, 0), cplx(0, 2), cplx(-3, 0), cplx(0.5, 0.5)};
    Polynomial p = Polynomial::constant(1.0);
    for (auto r : roots_in) p = p * Polynomial({-r, cplx(1.0)});
    auto rr = find_roots(p);
    REQUIRE(rr.converged);
    REQUIRE(rr.roots.size() == 4);
    for (auto want : roots_in) {
        double best = 1e9;
        for (auto got : rr.roots) best = std::min(best, std::abs(got - want));
        CHECK(best < 1e-9);
    }
}

TEST_CASE("aberth handles multiple roots to the residual tolerance") {
    // (z-1)^3 (z+2)
    Polynomial p = Polynomial({cplx(-1.0), cplx(1.0)});
    p = p * p * p * Polynomial({cplx(2.0), cplx(1.0)});
    auto rr = find_roots(p);
    REQUIRE(rr.roots.size() == 4);
    int near_one = 0;
    for (auto r : rr.roots)
        if (std::abs(r - cplx(1.0)) < 1e-3) ++near_one;
    CHECK(near_one == 3);
    CHECK(rr.max_residual < 1e-9);
}

TEST_CASE("random polynomial root residuals stay small") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        int deg = 2 + int(rng() % 7);
        std::vector<cplx> c(deg + 1);
        for (auto& x : c) x = cplx(u(rng), u(rng));
        if (std::abs(c.back()) < 0.1) c.back() += cplx(1.0);
        Polynomial p(c);
        auto rr = find_roots(p);
        CHECK(rr.roots.size() == size_t(p.degree()));
        CHECK(rr.converged);
    }
}

TEST_CASE("solve_equals quadratic closed form matches both roots") {
    Polynomial p({cplx(-2.0), cplx(0.0), cplx(1.0)});  // z^2 - 2
    auto roots = solve_equals(p, cplx(2.0));           // y^2 - 2 = 2
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - cplx(-2.0)) < 1e-12);
    CHECK(std::abs(roots[1] - cplx(2.0)) < 1e-12);
    CHECK(std::is_sorted(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    }));
}
