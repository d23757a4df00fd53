#include "dynlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynlab {

double PreimageLogTree::level_sum(int n, double delta) const {
    double s = 0.0;
    for (double lg : logs[n - 1]) s += std::exp(-delta * lg);
    return s;
}

PreimageLogTree enumerate_log_tree(const MapSpec& map, cplx z, int n_max,
                                   const PreimageOptions& opt) {
    double width = std::pow(double(map.degree()), double(n_max));
    if (width > double(opt.branch_budget))
        throw std::runtime_error("poincare: deg^n exceeds the branch budget");

    PreimageLogTree t;
    t.base = z;
    t.depth = n_max;
    t.logs.resize(n_max);

    std::vector<std::pair<cplx, double>> cur{{z, 0.0}};
    for (int n = 1; n <= n_max; ++n) {
        std::vector<std::pair<cplx, double>> next;
        next.reserve(cur.size() * map.degree());
        auto& lvl = t.logs[n - 1];
        lvl.reserve(cur.size() * map.degree());
        for (const auto& [w, lg] : cur) {
            auto roots = map.preimages_of(w);
            for (const auto& y : roots) {
                double d = std::abs(map.derivative(y));
                double nl = lg + std::log(std::max(d, 1e-300));
                lvl.push_back(nl);
                next.emplace_back(y, nl);
            }
        }
        cur = std::move(next);
    }
    return t;
}

bool is_admissible(const MapSpec& map, const std::vector<CriticalDatum>& crit,
                   cplx z, double adm_tol, int horizon) {
    for (const auto& c : crit) {
        if (c.at_infinity) continue;
        if (std::abs(z - c.location) < adm_tol) return false;
        cplx w = c.location;
        for (int i = 0; i < horizon; ++i) {
            try {
                w = map.eval(w);
            } catch (const PoleError&) {
                break;
            }
            if (std::abs(z - w) < adm_tol) return false;
            if (std::abs(w) > 1e9) break;
        }
    }
    return true;
}

PoincareLevels poincare_partial(const MapSpec& map, cplx z, double delta, int n_max,
                                const std::vector<CriticalDatum>& crit,
                                const PreimageOptions& opt) {
    PoincareLevels out;
    out.delta = delta;
    out.admissibility_warning = !is_admissible(map, crit, z);
    if (out.admissibility_warning)
        out.note = "base point is within tolerance of a critical orbit";
    if (n_max == 0) return out;
    auto tree = enumerate_log_tree(map, z, n_max, opt);
    double cum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        double s = tree.level_sum(n, delta);
        out.level_sums.push_back(s);
        cum += s;
        out.cumulative.push_back(cum);
    }
    return out;
}

PoincareLevels restricted_poincare_partial(const MapSpec& map, cplx z, double delta,
                                           double Delta, int n_max,
                                           const std::vector<CriticalDatum>& crit,
                                           const PreimageOptions& opt) {
    PoincareLevels out;
    out.delta = delta;
    out.admissibility_warning = !is_admissible(map, crit, z);
    if (n_max == 0) return out;
    double width = std::pow(double(map.degree()), double(n_max));
    if (width > double(opt.branch_budget))
        throw std::runtime_error("poincare: deg^n exceeds the branch budget");

    // tree descent carrying the pullback polygon of the circle of radius
    // Delta; once a critical point enters a component every deeper branch
    // through it leaves H(z, Delta)
    const int samples = 32;
    struct Node {
        cplx y;
        double lg = 0.0;
        std::vector<cplx> poly;
    };
    auto orbits_depth = n_max;
    std::vector<std::vector<cplx>> orbits(crit.size());
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity) continue;
        cplx w = crit[i].location;
        for (int k = 0; k < orbits_depth; ++k) {
            try {
                w = map.eval(w);
            } catch (const PoleError&) {
                w = cplx(1e18, 1e18);
            }
            orbits[i].push_back(w);
        }
    }

    std::vector<Node> cur;
    {
        Node root;
        root.y = z;
        root.poly.resize(samples);
        for (int i = 0; i < samples; ++i) {
            double a = 2.0 * M_PI * i / samples;
            root.poly[i] = z + Delta * cplx(std::cos(a), std::sin(a));
        }
        cur.push_back(std::move(root));
    }

    out.level_sums.assign(n_max, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        std::vector<Node> next;
        next.reserve(cur.size() * map.degree());
        for (const auto& node : cur) {
            auto roots = map.preimages_of(node.y);
            for (const auto& y : roots) {
                Node child;
                child.y = y;
                double d = std::abs(map.derivative(y));
                child.lg = node.lg + std::log(std::max(d, 1e-300));
                child.poly.resize(samples);
                Polygon pg;
                pg.pts.resize(samples);
                bool tracking_ok = true;
                for (int i = 0; i < samples; ++i) {
                    cplx pred = (d > 1e-12)
                                    ? y + (node.poly[i] - node.y) / map.derivative(y)
                                    : y;
                    auto rts = map.preimages_of(node.poly[i]);
                    double best = std::numeric_limits<double>::infinity(),
                           second = best;
                    cplx pick = rts.front();
                    for (const auto& r : rts) {
                        double dd = std::abs(r - pred);
                        if (dd < best) {
                            second = best;
                            best = dd;
                            pick = r;
                        } else if (dd < second) {
                            second = dd;
                        }
                    }
                    if (rts.size() > 1 && second < 1.25 * best && best > 1e-12)
                        tracking_ok = false;
                    pg.pts[i] = pick;
                    child.poly[i] = pick;
                }
                bool univalent = tracking_ok;
                if (univalent) {
                    for (size_t ci = 0; ci < crit.size() && univalent; ++ci) {
                        if (crit[ci].at_infinity) continue;
                        if (std::abs(orbits[ci][n - 1] - z) > Delta * 1.5) continue;
                        if (pg.hits(crit[ci].location)) univalent = false;
                    }
                }
                if (univalent) {
                    out.level_sums[n - 1] += std::exp(-delta * child.lg);
                    next.push_back(std::move(child));
                }
                // non-univalent branches are pruned: no deeper preimage of
                // this branch belongs to H(z, Delta)
            }
        }
        cur = std::move(next);
    }
    double cum = 0.0;
    for (double s : out.level_sums) {
        cum += s;
        out.cumulative.push_back(cum);
    }
    return out;
}

namespace {

// fitted geometric ratio of the last <=6 level sums, with rms fit residual
std::pair<double, double> level_ratio_fit(const std::vector<double>& s) {
    std::vector<double> xs, ys;
    size_t n = s.size();
    size_t start = n > 6 ? n - 6 : 0;
    for (size_t i = start; i < n; ++i) {
        if (s[i] <= 0.0) continue;
        xs.push_back(double(i));
        ys.push_back(std::log(s[i]));
    }
    if (xs.size() < 3) return {0.0, 1e9};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = xs.size();
    for (size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double icpt = (sy - slope * sx) / m;
    double rss = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double e = ys[i] - (icpt + slope * xs[i]);
        rss += e * e;
    }
    return {std::exp(slope), std::sqrt(rss / m)};
}

} // namespace

ExponentEstimate estimate_exponent_on_tree(const PreimageLogTree& tree, double tol) {
    ExponentEstimate est;
    est.depth = tree.depth;
    if (tree.depth < 8) {
        est.note = "need at least 8 levels";
        return est;
    }
    auto ratio_at = [&](double delta) {
        std::vector<double> s(tree.depth);
        for (int n = 1; n <= tree.depth; ++n) s[n - 1] = tree.level_sum(n, delta);
        return level_ratio_fit(s);
    };

    double lo = 0.05, hi = 2.5;
    auto rlo = ratio_at(lo), rhi = ratio_at(hi);
    if (rlo.first <= 1.0 || rhi.first >= 1.0) {
        est.note = "level sums do not bracket the critical ratio";
        return est;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        auto r = ratio_at(mid);
        if (r.first > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    est.lo = lo;
    est.hi = hi;
    est.value = 0.5 * (lo + hi);
    auto rf = ratio_at(est.value);
    est.ratio_at_value = rf.first;
    est.fit_residual = rf.second;
    est.conclusive = rf.second < 1.5;  // log-scale rms; larger means erratic levels
    if (!est.conclusive) est.note = "non-geometric level behavior at the horizon";
    return est;
}

ExponentEstimate estimate_poincare_exponent(const MapSpec& map, cplx z, int n_max,
                                            double tol,
                                            const std::vector<CriticalDatum>& crit,
                                            const PreimageOptions& opt) {
    (void)crit;
    auto tree = enumerate_log_tree(map, z, n_max, opt);
    return estimate_exponent_on_tree(tree, tol);
}

DivergenceProbe divergence_type_probe(const MapSpec& map, cplx z, double delta,
                                      int n_max, const PreimageOptions& opt) {
    DivergenceProbe probe;
    auto tree = enumerate_log_tree(map, z, n_max, opt);
    std::vector<double> s(n_max);
    double cum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        s[n - 1] = tree.level_sum(n, delta);
        cum += s[n - 1];
        probe.cumulative.push_back(cum);
    }
    auto [ratio, resid] = level_ratio_fit(s);
    probe.level_ratio = ratio;
    const double band = 0.08;
    if (ratio >= 1.0 + band) {
        probe.verdict = DivergenceVerdict::DivergentConsistent;
        probe.growth_law = "geometric";
    } else if (ratio > 1.0 - band) {
        probe.verdict = DivergenceVerdict::DivergentConsistent;
        probe.growth_law = ratio >= 1.0 ? "linear" : "logarithmic";
    } else if (ratio > 0.0) {
        probe.verdict = DivergenceVerdict::ConvergentSide;
        probe.growth_law = "plateau";
    } else {
        probe.verdict = DivergenceVerdict::Inconclusive;
        probe.growth_law = "none";
    }
    if (resid > 2.0) probe.verdict = DivergenceVerdict::Inconclusive;
    return probe;
}

} // namespace dynlab
