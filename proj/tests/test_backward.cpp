#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dynlab/backward.hpp"
#include "dynlab/io_util.hpp"

#include <cmath>
#include <cstdio>
#include <set>

using namespace dynlab;

static MapSpec z2() { return MapSpec::unicritical(2, cplx(0.0, 0.0)); }
static MapSpec cheb() { return MapSpec::unicritical(2, cplx(-2.0, 0.0)); }

static ScaleConstants cheb_scales() {
    auto crit = critical_points(cheb());
    return measure_scale_constants(cheb(), crit, nullptr,
                                   BoundingBox{-2.5, 2.5, -2.5, 2.5});
}

TEST_CASE("preimages of z^2 at z=1 n=2 are the fourth roots of unity") {
    auto tree = preimages(z2(), cplx(1.0, 0.0), 2);
    REQUIRE(tree.size() == 4);
    std::set<std::pair<int, int>> found;
    for (const auto& b : tree) {
        cplx e = b.endpoint();
        found.insert({int(std::round(e.real() * 2)), int(std::round(e.imag() * 2))});
        CHECK(std::abs(b.cumulative_deriv() - 4.0) < 1e-9);
        // |F(y_k) - y_{k-1}| < tol
        for (int k = 1; k <= b.length(); ++k)
            CHECK(std::abs(z2().eval(b.point_at(k)) - b.point_at(k - 1)) < 1e-9);
        // cumulative = product of the step moduli
        double prod = 1.0;
        for (double d : b.step_deriv) prod *= d;
        CHECK(std::abs(prod - b.cumulative_deriv()) / prod < 1e-9);
    }
    CHECK(found.size() == 4);  // 1, -1, i, -i
}

TEST_CASE("preimage conventions: depth zero and branch counting") {
    auto t0 = preimages(cheb(), cplx(0.7, 0.1), 0);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].length() == 0);
    CHECK(std::abs(t0[0].cumulative_deriv() - 1.0) < 1e-15);

    auto t1 = preimages(cheb(), cplx(2.0, 0.0), 1);
    REQUIRE(t1.size() == 2);
    CHECK(std::abs(t1[0].endpoint() - cplx(-2.0)) < 1e-12);
    CHECK(std::abs(t1[1].endpoint() - cplx(2.0)) < 1e-12);
    CHECK(std::abs(t1[0].cumulative_deriv() - 4.0) < 1e-12);
    CHECK(std::abs(t1[1].cumulative_deriv() - 4.0) < 1e-12);

    // branch completeness at depth 6: deg^n branches, uniform weights sum 1
    auto t6 = preimages(z2(), cplx(0.3, 0.4), 6);
    CHECK(t6.size() == 64);
    double mass = 0.0;
    for (size_t i = 0; i < t6.size(); ++i) mass += 1.0 / 64.0;
    CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("shrinking neighborhoods avoid/hit critical points as constructed") {
    // z^2 near the circle: pullbacks stay away from 0
    auto tree = preimages(z2(), cplx(1.0, 0.0), 6);
    auto crit = critical_points(z2());
    auto sd = shrinking_neighborhoods(z2(), cplx(1.0, 0.0), 0.1, tree[0],
                                      default_delta_seq(6), crit);
    CHECK(sd.first_hit == -1);
    CHECK(sd.tracking_ok);
    // Delta_n > 1/2 always
    for (double d : sd.capital_delta) CHECK(d > 0.5);
    // U'_n inside U_n within polygon tolerance: compare max radii around the
    // branch point
    for (size_t n = 0; n < sd.U.size(); ++n) {
        cplx c = tree[0].point_at(int(n + 1));
        double rU = 0.0, rUp = 0.0;
        for (auto p : sd.U[n].pts) rU = std::max(rU, std::abs(p - c));
        for (auto p : sd.U_prime[n].pts) rUp = std::max(rUp, std::abs(p - c));
        CHECK(rUp <= rU * (1.0 + 1e-9));
    }

    // chebyshev: base near 2, branch through -2 toward 0; large r hits
    cplx zb(2.0 - 1e-3, 0.0);
    auto t2 = preimages(cheb(), zb, 3);
    // branch whose first step is the negative root
    const BackwardOrbit* branch = nullptr;
    for (const auto& b : t2)
        if (b.point_at(1).real() < 0 && std::abs(b.point_at(2).real()) < 0.1)
            branch = &b;
    REQUIRE(branch != nullptr);
    auto crit2 = critical_points(cheb());
    auto hit = shrinking_neighborhoods(cheb(), zb, 0.05, *branch,
                                       default_delta_seq(3), crit2);
    CHECK(hit.first_hit == 2);

    // r = 0: degenerate, never a hit
    auto none = shrinking_neighborhoods(cheb(), zb, 0.0, *branch,
                                        default_delta_seq(3), crit2);
    CHECK(none.first_hit == -1);
}

TEST_CASE("univalent pullback radius") {
    auto crit = critical_points(z2());
    auto tree = preimages(z2(), cplx(1.0, 0.0), 8);
    // every branch of z^2 over the circle admits a branch-independent radius
    double min_rad = 1e9;
    for (size_t i = 0; i < tree.size(); i += 16) {
        double r = univalent_pullback_radius(z2(), tree[i], crit, 1.0);
        min_rad = std::min(min_rad, r);
    }
    CHECK(min_rad > 0.2);  // distance from the circle chain to 0 stays large

    // branch ending at a critical point: radius 0
    // the double root at 0 splits by ~sqrt(eps) in floating point
    auto t2 = preimages(cheb(), cplx(2.0, 0.0), 2);
    const BackwardOrbit* through_zero = nullptr;
    for (const auto& b : t2)
        if (std::abs(b.endpoint()) < 1e-6) through_zero = &b;
    REQUIRE(through_zero != nullptr);
    auto crit2 = critical_points(cheb());
    CHECK(univalent_pullback_radius(cheb(), *through_zero, crit2, 1.0) == 0.0);

    // passing near 0 shrinks the admissible radius
    cplx zb(2.0 - 1e-3, 0.0);
    auto t3 = preimages(cheb(), zb, 2);
    double far = 0, near_r = 1e9;
    for (const auto& b : t3) {
        double r = univalent_pullback_radius(cheb(), b, crit2, 1.0);
        if (std::abs(b.point_at(2)) < 0.1)
            near_r = std::min(near_r, r);
        else
            far = std::max(far, r);
    }
    CHECK(near_r < far);
}

TEST_CASE("block decomposition: hyperbolic map gives all type 2") {
    auto crit = critical_points(z2());
    auto scales = measure_scale_constants(z2(), crit, nullptr,
                                          BoundingBox{-2.0, 2.0, -2.0, 2.0});
    CHECK(scales.R_prime > 0);
    CHECK(scales.R_prime < scales.R);

    auto tree = preimages(z2(), cplx(1.0, 0.0), 10);
    SigmaSeq vac = SigmaSeq::vacuous_marker(10);
    auto tech = technical_sequences(vac, 0.5, 2, 2);
    int count = 0;
    for (size_t i = 0; i < tree.size(); i += 64) {
        auto bc = decompose_blocks(z2(), tree[i], 0.05, tech, scales, crit);
        CHECK(bc.grammar_ok());
        CHECK(bc.total_length() == 10);
        for (const auto& b : bc.blocks) CHECK(b.type == '2');
        ++count;
    }
    CHECK(count > 10);

    // stopping rule: code "2" of full length on 100% of branches
    for (size_t i = 0; i < tree.size(); ++i) {
        auto bc = decompose_with_stopping(z2(), tree[i], scales, crit);
        REQUIRE(bc.blocks.size() == 1);
        CHECK(bc.blocks[0].type == '2');
        CHECK(bc.blocks[0].length == 10);
    }
}

TEST_CASE("block decomposition: chebyshev branch through 0 contains a 3") {
    auto crit = critical_points(cheb());
    auto scales = cheb_scales();
    cplx zb(2.0 - 1e-3, 0.0);
    auto tree = preimages(cheb(), zb, 12);

    bool found3 = false;
    for (const auto& b : tree) {
        auto bc = decompose_with_stopping(cheb(), b, scales, crit);
        CHECK(bc.grammar_ok());
        CHECK(bc.total_length() == 12);
        for (size_t k = 0; k < bc.blocks.size(); ++k) {
            if (bc.blocks[k].type == '3') {
                found3 = true;
                // cross-validate the hit level against shrinking_neighborhoods
                auto sd = shrinking_neighborhoods(cheb(), zb, bc.blocks[k].radius, b,
                                                  default_delta_seq(12), crit);
                CHECK(sd.first_hit == bc.blocks[k].length);
            }
        }
        // stopping-rule codes are restricted to 2, 1...13, 21...13
        auto code = bc.code_string();
        bool ok_shape = code == "2" || (code.find('3') == code.size() - 1);
        CHECK(ok_shape);
    }
    CHECK(found3);

    // full decomposition also emits grammatical codes
    auto s20 = sigma_sequence(cheb(), crit, 40);
    auto tech = technical_sequences(s20, 0.5, 2, 2);
    for (size_t i = 0; i < tree.size(); i += 7) {
        auto bc = decompose_blocks(cheb(), tree[i], 1e-4, tech, scales, crit);
        CHECK(bc.grammar_ok());
        CHECK(bc.total_length() == 12);
    }
}

TEST_CASE("koebe distortion certification on certified pullbacks") {
    auto crit = critical_points(z2());
    int passed = 0, total = 0;
    // deterministic sweep over base points and depths
    for (int j = 0; j < 25 && total < 1000; ++j) {
        double ang = 2.0 * M_PI * j / 25.0 + 0.05;
        cplx z(1.02 * std::cos(ang), 1.02 * std::sin(ang));
        auto tree = preimages(z2(), z, 6);
        for (const auto& b : tree) {
            double rad = univalent_pullback_radius(z2(), b, crit, 0.8);
            if (rad <= 0.01) continue;
            auto kc = koebe_certify(z2(), z, rad * 0.9, b, 16);
            ++total;
            if (kc.pass) ++passed;
        }
    }
    CHECK(total >= 1000);
    CHECK(passed == total);
}

TEST_CASE("pullback diameter sums decay or grow with the exponent") {
    auto crit = critical_points(z2());
    auto r1 = pullback_diameter_sum(z2(), cplx(1.0, 0.0), 0.05, 1.5, 10, crit);
    CHECK(r1.fitted_ratio < 0.9);
    CHECK(r1.fitted_ratio > 0.0);

    auto r2 = pullback_diameter_sum(z2(), cplx(1.0, 0.0), 0.05, 0.5, 10, crit);
    CHECK(r2.fitted_ratio > 1.1);

    // ball inside the superattracting basin: degree stays 1 per component
    auto r3 = pullback_diameter_sum(z2(), cplx(0.4, 0.0), 0.02, 1.5, 6, crit);
    for (const auto& l : r3.levels) CHECK(l.components == (1 << l.n));
}

TEST_CASE("pullback contraction envelope for chebyshev") {
    auto crit = critical_points(cheb());
    auto rep = pullback_contraction(cheb(), cplx(1.7, 0.0), 0.1, 12, crit);
    REQUIRE(rep.levels.size() == 12);
    CHECK(rep.levels.back().max_diam < 1e-2);
    // n = 0 would be the ball itself; level 1 is already smaller
    CHECK(rep.levels[0].max_diam < 2.0 * 0.1);
    // min |(F^n)'| is emitted as the computable face of the expansion
    CHECK(rep.levels.back().min_branch_deriv > 0.0);
}

TEST_CASE("large scale statistics on the circle") {
    auto crit = critical_points(z2());
    std::vector<cplx> samples;
    for (int i = 0; i < 60; ++i) {
        double a = 2.0 * M_PI * i / 60.0;
        samples.push_back(cplx(std::cos(a), std::sin(a)));
    }
    auto scales = measure_scale_constants(z2(), crit, nullptr,
                                          BoundingBox{-2.0, 2.0, -2.0, 2.0});
    auto rep = large_scale_statistics(z2(), samples, scales.R_prime, 25, 0.5, crit);
    CHECK(rep.fraction_with_passages == doctest::Approx(1.0));
    for (const auto& s : rep.samples) {
        CHECK(s.passage_times.size() == 25);  // univalent at every depth
        CHECK(s.eps_frequent);
    }

    // depth 0: empty statistics are valid data
    auto rep0 = large_scale_statistics(z2(), samples, scales.R_prime, 0, 0.5, crit);
    for (const auto& s : rep0.samples) CHECK(s.passage_times.empty());
}

TEST_CASE("preimage cache round trip") {
    auto tree = preimages(cheb(), cplx(0.3, 0.2), 5);
    std::array<uint8_t, 32> hash = sha256_bytes("cheb", 4);
    write_preimage_cache("test_cache.bin", hash, cplx(0.3, 0.2), 5, 1e-8, tree);
    cplx z;
    int depth;
    auto back = read_preimage_cache("test_cache.bin", hash, &z, &depth);
    REQUIRE(back.size() == tree.size());
    CHECK(depth == 5);
    CHECK(std::abs(z - cplx(0.3, 0.2)) < 1e-15);
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(std::abs(back[i].endpoint() - tree[i].endpoint()) < 1e-15);
        CHECK(back[i].path == tree[i].path);
    }
    // wrong hash must be rejected
    std::array<uint8_t, 32> other = sha256_bytes("steh", 4);
    CHECK_THROWS(read_preimage_cache("test_cache.bin", other));
    std::remove("test_cache.bin");
}

TEST_CASE("expansion trend over the univalence-restricted tree") {
    // computable face of the expansion envelope for z^2-2: the per-level
    // minimum of |(F^n)'| over H(z, Delta), scaled by Delta^(1/mu-1), trends
    // upward and clears 10 by n = 20
    auto crit = critical_points(cheb());
    double Delta = 0.05;
    auto env = min_univalent_expansion(cheb(), cplx(1.0, 1.0), Delta, 20, crit);
    REQUIRE(env.min_deriv.size() == 20);
    CHECK(env.branch_count[19] > 0);
    double scale = std::pow(Delta, 1.0 / 2.0 - 1.0);
    CHECK(env.min_deriv[19] * scale > 10.0);
    CHECK(env.nondecreasing_from >= 0);
    CHECK(env.nondecreasing_from < 19);
    for (int i = env.nondecreasing_from; i + 1 < 20; ++i)
        CHECK(env.min_deriv[i + 1] >= env.min_deriv[i] * (1.0 - 1e-12));
}

TEST_CASE("preimage budget is enforced") {
    PreimageOptions opt;
    opt.branch_budget = 128;
    CHECK_THROWS(preimages(z2(), cplx(1.0, 0.0), 10, opt));
}
