#include "dynlab/dimensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynlab {

BoxCountReport box_counting_dimension(const DyadicRaster& raster, int min_levels) {
    BoxCountReport rep;
    size_t ones = raster.count_ones();
    if (ones == 0 || ones == size_t(raster.side) * raster.side) {
        rep.degenerate = true;
        rep.note = "degenerate raster";
        return rep;
    }

    // OR-coarsening pyramid
    std::vector<uint8_t> cur = raster.bits;
    int side = raster.side;
    int level = 0;
    double cell = raster.cell_width();
    while (side >= 1) {
        long cnt = 0;
        for (const auto b : cur) cnt += (b != 0);
        rep.scales.push_back({level, cell * double(1 << level), cnt});
        if (side == 1) break;
        int half = side / 2;
        std::vector<uint8_t> nxt(size_t(half) * half, 0);
        for (int y = 0; y < half; ++y)
            for (int x = 0; x < half; ++x) {
                uint8_t v = cur[size_t(2 * y) * side + 2 * x] |
                            cur[size_t(2 * y) * side + 2 * x + 1] |
                            cur[size_t(2 * y + 1) * side + 2 * x] |
                            cur[size_t(2 * y + 1) * side + 2 * x + 1];
                nxt[size_t(y) * half + x] = v;
            }
        cur = std::move(nxt);
        side = half;
        ++level;
    }

    // scale window: drop the two finest levels and any level with N < 32
    for (size_t i = 2; i < rep.scales.size(); ++i)
        if (rep.scales[i].count >= 32) rep.used.push_back(rep.scales[i]);
    if (static_cast<int>(rep.used.size()) < min_levels) {
        rep.degenerate = true;
        rep.note = "fewer than the required usable scales";
        return rep;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : rep.used) {
        double x = std::log(1.0 / s.rho), y = std::log(double(s.count));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = double(rep.used.size());
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // two-point slopes (finer scale listed first, rho_i < rho_{i+1})
    rep.upper = 0.0;
    rep.lower = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < rep.used.size(); ++i) {
        double dr = std::log(rep.used[i + 1].rho / rep.used[i].rho);
        double dn = std::log(double(rep.used[i].count) / double(rep.used[i + 1].count));
        double two_point = dn / dr;
        rep.upper = std::max(rep.upper, two_point);
        rep.lower = std::min(rep.lower, two_point);
    }
    return rep;
}

namespace {

struct DistGrid {
    const DyadicRaster* raster;
    std::vector<double> dt;
    // min distance from the square [x0,x0+s]x[y0,y0+s] to the 1-cells,
    // bounded below by the cell-center transform minus half a diagonal
    double square_dist(double x0, double y0, double s) const {
        double best = std::numeric_limits<double>::infinity();
        int n = 5;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                cplx p(x0 + s * i / n, y0 + s * j / n);
                best = std::min(best, raster_distance(*raster, dt, p));
            }
        return best;
    }
};

} // namespace

WhitneyReport whitney_exponent(const DyadicRaster& raster, double delta_lo,
                               double delta_hi, double tol) {
    WhitneyReport rep;
    if (raster.count_ones() == 0) {
        rep.note = "empty raster";
        return rep;
    }
    DistGrid dg{&raster, distance_transform(raster)};

    int max_level = raster.k;  // stop at raster resolution
    std::vector<long> counts(max_level + 1, 0);
    rep.min_dist_ratio = std::numeric_limits<double>::infinity();

    // recursive dyadic subdivision: retain when diam <= dist(Q, K), subdivide
    // otherwise; squares at the floor level touching K are discarded
    struct Item {
        double x0, y0;
        int level;
    };
    std::vector<Item> stack{{raster.bbox.x_min, raster.bbox.y_min, 0}};
    double W = raster.bbox.width();
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        double side = W / double(1 << it.level);
        double diam = side * std::sqrt(2.0);
        double dist = dg.square_dist(it.x0, it.y0, side);
        if (dist >= diam) {
            // drop the large squares ("diam <= 1" convention, relative cap
            // at an eighth of the box)
            if (side <= W / 8.0) {
                counts[it.level]++;
                double ratio = dist / diam;
                rep.min_dist_ratio = std::min(rep.min_dist_ratio, ratio);
                rep.max_dist_ratio = std::max(rep.max_dist_ratio, ratio);
            }
            continue;
        }
        if (it.level >= max_level) continue;  // below raster resolution
        double h = side / 2.0;
        stack.push_back({it.x0, it.y0, it.level + 1});
        stack.push_back({it.x0 + h, it.y0, it.level + 1});
        stack.push_back({it.x0, it.y0 + h, it.level + 1});
        stack.push_back({it.x0 + h, it.y0 + h, it.level + 1});
    }

    for (int l = 0; l <= max_level; ++l) {
        if (counts[l] == 0) continue;
        WhitneySquare ws;
        ws.level = l;
        ws.count = counts[l];
        ws.diam = W / double(1 << l) * std::sqrt(2.0);
        rep.per_level.push_back(ws);
    }
    if (rep.per_level.size() < 4) {
        rep.note = "insufficient levels";
        return rep;
    }

    // exponent of convergence of sum diam^delta: per-level sums
    // t_l = count_l * diam_l^delta, geometric-ratio bisection as in the
    // Poincare estimator. Levels within three dyadic steps of the raster
    // resolution are dropped (the distance transform cannot resolve them),
    // as are levels with poor statistics.
    int win_lo = std::min(5, max_level - 5);
    auto ratio_at = [&](double delta) {
        std::vector<double> xs, ys;
        for (const auto& ws : rep.per_level) {
            if (ws.count < 16) continue;
            if (ws.level < win_lo || ws.level > max_level - 3) continue;  // asymptotic window
            xs.push_back(double(ws.level));
            ys.push_back(std::log(double(ws.count)) + delta * std::log(ws.diam));
        }
        if (xs.size() < 3) return 0.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double n = double(xs.size());
        return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
    };

    double lo = delta_lo, hi = delta_hi;
    if (ratio_at(lo) <= 1.0 || ratio_at(hi) >= 1.0) {
        rep.note = "whitney sums do not bracket the critical exponent";
        return rep;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (ratio_at(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    rep.lo = lo;
    rep.hi = hi;
    rep.exponent = 0.5 * (lo + hi);
    rep.conclusive = true;
    return rep;
}

DimensionComparison dimension_comparison(const MapSpec& map,
                                         const DimensionConfig& cfg) {
    DimensionComparison cmp;
    cmp.note = "box/Whitney estimators bound HDim from above only";

    auto raster = julia_membership_grid(map, cfg.bbox, cfg.raster_k,
                                        cfg.raster_max_iter, 0.0);
    auto box = box_counting_dimension(raster);
    if (box.degenerate) {
        cmp.note = "box estimator failed: " + box.note;
        return cmp;
    }
    cmp.box = box.slope;
    cmp.box_lo = box.lower;
    cmp.box_hi = box.upper;

    auto wh = whitney_exponent(raster);
    if (!wh.conclusive) {
        cmp.note = "whitney estimator failed: " + wh.note;
        return cmp;
    }
    cmp.whitney = wh.exponent;
    cmp.whitney_lo = wh.lo;
    cmp.whitney_hi = wh.hi;

    auto crit = critical_points(map);
    auto est = estimate_poincare_exponent(map, cfg.poincare_base, cfg.poincare_depth,
                                          cfg.poincare_tol, crit);
    if (!est.conclusive) {
        cmp.note = "poincare estimator failed: " + est.note;
        return cmp;
    }
    cmp.poincare = est.value;
    cmp.poincare_lo = est.lo;
    cmp.poincare_hi = est.hi;

    double g1 = std::abs(cmp.poincare - cmp.whitney);
    double g2 = std::abs(cmp.poincare - cmp.box);
    double g3 = std::abs(cmp.whitney - cmp.box);
    cmp.max_pairwise_gap = std::max({g1, g2, g3});

    double bw = (cmp.poincare_hi - cmp.poincare_lo) + (cmp.whitney_hi - cmp.whitney_lo);
    double bb = (cmp.poincare_hi - cmp.poincare_lo) + 0.1;
    cmp.fact81_ok = cmp.whitney <= std::max(cmp.box_hi, cmp.box) + cfg.fact81_slack;
    cmp.pass = g1 <= std::max(bw, 0.1) && g2 <= std::max(bb, 0.1) &&
               g3 <= std::max(0.1, bw) && cmp.fact81_ok;
    return cmp;
}

} // namespace dynlab
