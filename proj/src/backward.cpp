#include "dynlab/backward.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dynlab {

// ---------------------------------------------------------------------------
// preimage enumeration

std::vector<BackwardOrbit> preimages(const MapSpec& map, cplx z, int n,
                                     const PreimageOptions& opt) {
    double levels = std::pow(double(map.degree()), double(n));
    if (levels > double(opt.branch_budget))
        throw std::runtime_error("preimages: deg^n exceeds the branch budget");

    std::vector<BackwardOrbit> cur;
    BackwardOrbit root;
    root.base = z;
    cur.push_back(root);

    for (int level = 1; level <= n; ++level) {
        std::vector<BackwardOrbit> next;
        next.reserve(cur.size() * map.degree());
        for (const auto& b : cur) {
            cplx target = b.endpoint();
            auto roots = map.preimages_of(target);
            for (size_t ri = 0; ri < roots.size(); ++ri) {
                cplx y = roots[ri];
                double resid = std::abs(map.eval(y) - target);
                if (resid > opt.root_tol * std::max(1.0, std::abs(target)))
                    throw std::runtime_error("preimages: root residual " +
                                             std::to_string(resid) + " at level " +
                                             std::to_string(level));
                BackwardOrbit nb = b;
                double d = std::abs(map.derivative(y));
                nb.points.push_back(y);
                nb.step_deriv.push_back(d);
                double prev = nb.cum_log_deriv.empty() ? 0.0 : nb.cum_log_deriv.back();
                nb.cum_log_deriv.push_back(prev + std::log(d));
                nb.path.push_back(static_cast<uint8_t>(ri));
                next.push_back(std::move(nb));
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// polygons

double Polygon::diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
}

double Polygon::max_adjacent_gap() const {
    double g = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        g = std::max(g, std::abs(pts[i] - pts[(i + 1) % pts.size()]));
    return g;
}

bool Polygon::contains(cplx p) const {
    bool in = false;
    size_t n = pts.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double yi = pts[i].imag(), yj = pts[j].imag();
        double xi = pts[i].real(), xj = pts[j].real();
        if ((yi > p.imag()) != (yj > p.imag())) {
            double xcross = xi + (p.imag() - yi) / (yj - yi) * (xj - xi);
            if (p.real() < xcross) in = !in;
        }
    }
    return in;
}

double Polygon::boundary_distance(cplx p) const {
    double d = std::numeric_limits<double>::infinity();
    size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        cplx a = pts[i], b = pts[(i + 1) % n];
        cplx ab = b - a;
        double len2 = std::norm(ab);
        double t = len2 > 0 ? std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0)
                            : 0.0;
        d = std::min(d, std::abs(p - (a + t * ab)));
    }
    return d;
}

bool Polygon::hits(cplx p, double extra_tol) const {
    double margin = 2.0 * max_adjacent_gap() + extra_tol;
    return contains(p) || boundary_distance(p) <= margin;
}

namespace {

// one root-continuation step: preimage of w near the branch point y_next
struct TrackStep {
    cplx value;
    bool ok = true;
};

TrackStep track_preimage(const MapSpec& map, cplx w, cplx level_base_prev,
                         cplx y_next, double deriv_at_ynext) {
    TrackStep out;
    cplx pred = y_next;
    if (deriv_at_ynext > 1e-12)
        pred = y_next + (w - level_base_prev) / map.derivative(y_next);
    auto roots = map.preimages_of(w);
    double best = std::numeric_limits<double>::infinity(), second = best;
    cplx pick = roots.front();
    for (const auto& r : roots) {
        double d = std::abs(r - pred);
        if (d < best) {
            second = best;
            best = d;
            pick = r;
        } else if (d < second) {
            second = d;
        }
    }
    out.value = pick;
    // ambiguity: two distinct roots nearly equidistant from the prediction
    if (roots.size() > 1 && second < 1.25 * best &&
        std::abs(best - second) > 1e-13 && best > 1e-12)
        out.ok = false;
    return out;
}

} // namespace

CirclePullback pull_circle(const MapSpec& map, cplx center, double r,
                           const BackwardOrbit& branch, int offset, int depth,
                           int samples) {
    CirclePullback out;
    if (offset + depth > branch.length())
        throw std::invalid_argument("pull_circle: depth exceeds branch length");

    std::vector<cplx> cur(samples);
    for (int i = 0; i < samples; ++i) {
        double a = 2.0 * M_PI * i / samples;
        cur[i] = center + r * cplx(std::cos(a), std::sin(a));
    }
    cplx base_prev = branch.point_at(offset);
    out.levels.reserve(depth);
    for (int l = 1; l <= depth; ++l) {
        cplx y_next = branch.point_at(offset + l);
        double dm = branch.step_deriv[offset + l - 1];
        Polygon poly;
        poly.pts.resize(samples);
        for (int i = 0; i < samples; ++i) {
            auto st = track_preimage(map, cur[i], base_prev, y_next, dm);
            if (!st.ok && out.ok) {
                out.ok = false;
                out.fail_level = offset + l;
                out.note = "root-tracking ambiguity";
            }
            poly.pts[i] = st.value;
        }
        cur = poly.pts;
        base_prev = y_next;
        out.levels.push_back(std::move(poly));
    }
    return out;
}

std::vector<double> default_delta_seq(int n) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = 0.25 * std::pow(2.0, -double(i + 1));
    return d;
}

ShrinkData shrinking_neighborhoods(const MapSpec& map, cplx z, double r,
                                   const BackwardOrbit& branch,
                                   const std::vector<double>& delta_seq,
                                   const std::vector<CriticalDatum>& crit,
                                   double hit_tol) {
    int n = branch.length();
    ShrinkData sd;
    sd.center = z;
    sd.radius = r;
    sd.delta_seq.assign(delta_seq.begin(),
                        delta_seq.begin() + std::min<size_t>(delta_seq.size(), n));
    while (static_cast<int>(sd.delta_seq.size()) < n)
        sd.delta_seq.push_back(sd.delta_seq.empty() ? 0.125 : sd.delta_seq.back() * 0.5);

    double sum_delta = 0.0;
    for (double d : sd.delta_seq) sum_delta += d;
    if (sum_delta >= 0.5)
        throw std::invalid_argument("shrinking_neighborhoods: sum delta_k must be < 1/2");

    sd.capital_delta.resize(n);
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        prod *= (1.0 - sd.delta_seq[i]);
        sd.capital_delta[i] = prod;
    }

    for (int level = 1; level <= n; ++level) {
        // U_level: pull B_{r Delta_level} back `level` steps;
        // U'_level: same with Delta_{level+1}
        double rad = r * sd.capital_delta[level - 1];
        double rad_next = rad * (level < n ? (1.0 - sd.delta_seq[level]) : 1.0);
        auto pb = pull_circle(map, z, rad, branch, 0, level);
        auto pbp = pull_circle(map, z, rad_next, branch, 0, level);
        if (!pb.ok && sd.tracking_ok) {
            sd.tracking_ok = false;
            sd.fail_level = pb.fail_level;
        }
        sd.U.push_back(pb.levels.back());
        sd.U_prime.push_back(pbp.levels.back());
        if (sd.first_hit < 0 && r > 0.0) {
            for (size_t ci = 0; ci < crit.size(); ++ci) {
                if (crit[ci].at_infinity) continue;
                if (sd.U.back().hits(crit[ci].location, hit_tol)) {
                    sd.first_hit = level;
                    sd.hit_crit = static_cast<int>(ci);
                    break;
                }
            }
        }
    }
    return sd;
}

namespace {

// critical forward orbits, cached once per decomposition run
std::vector<std::vector<cplx>> critical_orbits(const MapSpec& map,
                                               const std::vector<CriticalDatum>& crit,
                                               int depth) {
    std::vector<std::vector<cplx>> orbits(crit.size());
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity) continue;
        orbits[i].reserve(depth);
        cplx w = crit[i].location;
        bool dead = false;
        for (int k = 0; k < depth; ++k) {
            if (!dead) {
                try {
                    w = map.eval(w);
                } catch (const PoleError&) {
                    dead = true;
                }
            }
            orbits[i].push_back(dead ? cplx(1e18, 1e18) : w);
        }
    }
    return orbits;
}

struct HitProbe {
    int level = -1;    // first level with a confirmed critical hit
    int crit = -1;
};

// First k <= depth at which the shrinking neighborhood U_k for B_r(z_offset)
// contains a critical point. The forward-orbit distance test filters the
// levels cheaply; a polygon pullback confirms the component.
HitProbe shrink_hit_probe(const MapSpec& map, const BackwardOrbit& branch,
                          int offset, int depth, double r,
                          const std::vector<double>& capital_delta,
                          const std::vector<CriticalDatum>& crit,
                          const std::vector<std::vector<cplx>>& orbits) {
    HitProbe hp;
    cplx z = branch.point_at(offset);
    for (int k = 1; k <= depth; ++k) {
        double rad = r * capital_delta[k - 1];
        for (size_t ci = 0; ci < crit.size(); ++ci) {
            if (crit[ci].at_infinity) continue;
            // necessary condition: F^k(c) in B_{r Delta_k}(z), with slack for
            // the polygon margin
            double d = std::abs(orbits[ci][k - 1] - z);
            if (d > rad + 0.35 * rad + 1e-14) continue;
            auto pb = pull_circle(map, z, rad, branch, offset, k);
            if (pb.levels.back().hits(crit[ci].location)) {
                hp.level = k;
                hp.crit = static_cast<int>(ci);
                return hp;
            }
        }
    }
    return hp;
}

} // namespace

bool univalent_on_branch(const MapSpec& map, const BackwardOrbit& branch,
                         int offset, int depth, double radius,
                         const std::vector<CriticalDatum>& crit) {
    if (depth <= 0) return true;
    cplx z = branch.point_at(offset);
    // forward critical orbits for the cheap filter
    auto orbits = critical_orbits(map, crit, depth);

    int samples = 64;
    std::vector<cplx> cur(samples);
    for (int i = 0; i < samples; ++i) {
        double a = 2.0 * M_PI * i / samples;
        cur[i] = z + radius * cplx(std::cos(a), std::sin(a));
    }
    cplx base_prev = z;
    for (int l = 1; l <= depth; ++l) {
        cplx y_next = branch.point_at(offset + l);
        double dm = branch.step_deriv[offset + l - 1];
        Polygon poly;
        poly.pts.resize(samples);
        for (int i = 0; i < samples; ++i) {
            auto st = track_preimage(map, cur[i], base_prev, y_next, dm);
            if (!st.ok) return false;  // ambiguity: cannot certify univalence
            poly.pts[i] = st.value;
        }
        for (size_t ci = 0; ci < crit.size(); ++ci) {
            if (crit[ci].at_infinity) continue;
            if (std::abs(orbits[ci][l - 1] - z) > radius * 1.5 + 1e-14) continue;
            if (poly.hits(crit[ci].location)) return false;
        }
        cur = poly.pts;
        base_prev = y_next;
    }
    return true;
}

double univalent_pullback_radius(const MapSpec& map, const BackwardOrbit& branch,
                                 const std::vector<CriticalDatum>& crit,
                                 double upper, double rel_tol) {
    int n = branch.length();
    if (n == 0) return upper;
    // a critical endpoint kills univalence at any radius
    for (const auto& c : crit) {
        if (c.at_infinity) continue;
        if (std::abs(branch.endpoint() - c.location) < 1e-12) return 0.0;
    }
    double lo = 0.0, hi = upper;
    if (univalent_on_branch(map, branch, 0, n, hi, crit)) return hi;
    // establish a positive lower end
    double probe = hi / 1024.0;
    while (probe > 1e-14 && !univalent_on_branch(map, branch, 0, n, probe, crit))
        probe /= 1024.0;
    if (probe <= 1e-14) return 0.0;
    lo = probe;
    while ((hi - lo) > rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (univalent_on_branch(map, branch, 0, n, mid, crit))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// scale constants

ScaleConstants measure_scale_constants(const MapSpec& map,
                                       const std::vector<CriticalDatum>& crit,
                                       const TechSequences* tech,
                                       const BoundingBox& working_box) {
    ScaleConstants sc;
    double boxdiam = std::hypot(working_box.width(), working_box.height());
    sc.sup_deriv = map.sup_derivative(
        0.5 * std::max(working_box.width(), working_box.height()) +
        std::max(std::abs(working_box.x_min + working_box.x_max),
                 std::abs(working_box.y_min + working_box.y_max)));

    // R: pairwise critical separation / 100, capped so (1+sup|F'|) R < 1
    double sep = boxdiam;
    int finite_crit = 0;
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity) continue;
        ++finite_crit;
        for (size_t j = i + 1; j < crit.size(); ++j) {
            if (crit[j].at_infinity) continue;
            sep = std::min(sep, std::abs(crit[i].location - crit[j].location));
        }
    }
    if (finite_crit < 2) sep = boxdiam;
    sc.R = std::min(sep / 100.0, 0.9 / (1.0 + sc.sup_deriv));

    // M: distortion constant over rings around the critical points
    double M = 1.0;
    for (const auto& c : crit) {
        if (c.at_infinity) continue;
        double mu = c.multiplicity;
        double rmax = 5.0 * std::pow(sc.R, 1.0 / mu);
        for (int ir = 1; ir <= 8; ++ir) {
            double rho = rmax * std::pow(2.0, -double(8 - ir));
            for (int ia = 0; ia < 16; ++ia) {
                double a = 2.0 * M_PI * ia / 16.0;
                cplx y = c.location + rho * cplx(std::cos(a), std::sin(a));
                try {
                    double r1 = std::abs(map.derivative(y)) / std::pow(rho, mu - 1.0);
                    double r2 = std::abs(map.eval(y) - map.eval(c.location)) /
                                std::pow(rho, mu);
                    for (double v : {r1, r2})
                        if (v > 0 && std::isfinite(v)) M = std::max(M, std::max(v, 1.0 / v));
                } catch (const PoleError&) {
                }
            }
        }
    }
    sc.M = 1.1 * M;

    // tau: first return of the critical orbits to the R-neighborhoods of the
    // critical values (pulled back one step)
    int tau = 200;
    auto orbits = critical_orbits(map, crit, 200);
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity || crit[i].in_julia == JuliaMembership::No) continue;
        for (int m = 1; m < 199; ++m) {
            bool returned = false;
            for (size_t j = 0; j < crit.size(); ++j) {
                if (crit[j].at_infinity) continue;
                if (std::abs(orbits[i][m] - orbits[j][0]) < sc.R) returned = true;
            }
            if (returned) {
                tau = std::min(tau, m);
                break;
            }
        }
    }
    sc.tau = tau;

    // R' by the distortion inequality (certified value), then the working
    // value: the certified one collapses at desk scale, so the decompositions
    // run at a practical fraction of R and both numbers are reported
    double inf_alpha2 = 1.0;
    if (tech && !tech->alpha_n.empty()) {
        inf_alpha2 = tech->alpha_n[0] * tech->alpha_n[0];
        for (double a : tech->alpha_n) inf_alpha2 = std::min(inf_alpha2, a * a);
    }
    sc.R_prime_cert = sc.R / sc.M * inf_alpha2 / (16.0 * std::max(1.0, sc.sup_deriv));
    double rp = std::min(sc.R / 4.0, 0.05 * boxdiam / 5.65);
    // condition (iv): keep Fatou critical points out of the 2R' neighborhood
    // of the Julia set; their distance to J is unknown here, so bound by the
    // distance to the bounded critical orbits instead
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity || crit[i].in_julia != JuliaMembership::No) continue;
        for (size_t j = 0; j < crit.size(); ++j) {
            if (crit[j].at_infinity || crit[j].in_julia == JuliaMembership::No) continue;
            rp = std::min(rp, std::abs(crit[i].location - crit[j].location) / 4.0);
        }
    }
    sc.R_prime = std::max(rp, 1e-6);

    // certification: alpha_k > 16^mu M^2 for k >= tau is the paper's demand
    bool alpha_ok = false;
    if (tech && static_cast<int>(tech->alpha_n.size()) > tau) {
        double need = std::pow(16.0, double(tech->mu_max)) * sc.M * sc.M;
        alpha_ok = tech->alpha_n[tau] > need;
    }

    // L, K, R_2t: empirical surrogates over sampled univalent branches
    double max_expansion_at_L = 1.0;
    {
        std::vector<cplx> seeds;
        // coarse sweep for bounded-orbit seed points in the working box
        for (int iy = 0; iy < 9 && seeds.size() < 4; ++iy) {
            for (int ix = 0; ix < 9 && seeds.size() < 4; ++ix) {
                cplx z(working_box.x_min + working_box.width() * (ix + 0.5) / 9.0,
                       working_box.y_min + working_box.height() * (iy + 0.5) / 9.0);
                cplx w = z;
                int t = 0;
                double esc = map.default_escape_radius();
                for (; t < 60; ++t) {
                    try {
                        w = map.eval(w);
                    } catch (const PoleError&) {
                        break;
                    }
                    if (std::abs(w) > esc) break;
                }
                if (t >= 25) seeds.push_back(z);
            }
        }
        int probe_depth = 9;
        std::vector<double> min_exp(probe_depth + 1,
                                    std::numeric_limits<double>::infinity());
        for (const auto& s : seeds) {
            std::vector<BackwardOrbit> tree;
            try {
                PreimageOptions po;
                po.branch_budget = 4096;
                tree = preimages(map, s, probe_depth, po);
            } catch (const std::exception&) {
                continue;
            }
            for (const auto& b : tree) {
                if (!univalent_on_branch(map, b, 0, b.length(), sc.R_prime, crit))
                    continue;
                for (int l = 1; l <= b.length(); ++l)
                    min_exp[l] = std::min(min_exp[l], b.segment_expansion(0, l));
            }
        }
        int L = 0;
        for (int l = 1; l <= probe_depth; ++l) {
            if (std::isfinite(min_exp[l]) && min_exp[l] > 6.0) {
                L = l;
                break;
            }
        }
        sc.L = L > 0 ? L : 6;
        double K = 1.0;
        for (int l = 1; l <= std::min<int>(int(sc.L), probe_depth); ++l)
            if (std::isfinite(min_exp[l])) K = std::min(K, min_exp[l]);
        sc.K = std::max(K, 1e-6);
        // max expansion at length L over the same samples
        for (const auto& s : seeds) {
            std::vector<BackwardOrbit> tree;
            try {
                PreimageOptions po;
                po.branch_budget = 4096;
                tree = preimages(map, s, std::min<int>(int(sc.L), probe_depth), po);
            } catch (const std::exception&) {
                continue;
            }
            for (const auto& b : tree)
                max_expansion_at_L = std::max(max_expansion_at_L, b.cumulative_deriv());
        }
    }
    sc.R_2t = sc.R_prime / (8.0 * max_expansion_at_L);

    double inf_alpha = tech && !tech->alpha_n.empty() ? tech->alpha_n[0] : 1.0;
    if (tech)
        for (double a : tech->alpha_n) inf_alpha = std::min(inf_alpha, a);
    sc.C_3t = inf_alpha / (std::pow(8.0, tech ? tech->mu_max : 2.0) * sc.M *
                           std::max(1.0, sc.sup_deriv));

    // L'': alpha_n C_3t R_2t^(mu-1) >= 1, default 20 when never satisfied
    sc.L_dprime = 20;
    bool ldp_cert = false;
    if (tech) {
        double mu = tech->mu_max;
        for (size_t i = 0; i < tech->alpha_n.size(); ++i) {
            if (tech->alpha_n[i] * sc.C_3t * std::pow(sc.R_2t, mu - 1.0) >= 1.0) {
                sc.L_dprime = double(i + 1);
                ldp_cert = true;
                break;
            }
        }
    }
    sc.L_prime = sc.L + sc.L_dprime;

    sc.certified = alpha_ok && ldp_cert &&
                   sc.R_prime <= sc.R_prime_cert;
    if (!sc.certified)
        sc.notes = "scales are empirical surrogates; the compactness constants "
                   "could not be certified at this horizon";
    return sc;
}

// ---------------------------------------------------------------------------
// block decomposition

std::string BlockCode::code_string() const {
    std::string s;
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) s.push_back(it->type);
    return s;
}

bool BlockCode::grammar_ok() const {
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].type != '3') continue;
        if (i == 0) continue;                  // code starts with 3
        if (blocks[i - 1].type != '2') return false;
    }
    return true;
}

int BlockCode::total_length() const {
    int n = 0;
    for (const auto& b : blocks) n += b.length;
    return n;
}

namespace {

struct RaceOutcome {
    bool hit = false;
    int level = 0;
    int crit = -1;
    double radius = 0.0;
};

// Radius race: grow r until a shrinking neighborhood hits a critical point,
// or r reaches 2R'. Bisection on r to relative tolerance 1e-3.
RaceOutcome radius_race(const MapSpec& map, const BackwardOrbit& branch, int offset,
                        int depth, double r_cap,
                        const std::vector<double>& capital_delta,
                        const std::vector<CriticalDatum>& crit,
                        const std::vector<std::vector<cplx>>& orbits_from_offset) {
    RaceOutcome out;
    auto probe = [&](double r) {
        return shrink_hit_probe(map, branch, offset, depth, r, capital_delta, crit,
                                orbits_from_offset);
    };
    auto top = probe(r_cap);
    if (top.level < 0) {
        out.hit = false;
        out.radius = r_cap;
        return out;
    }
    double lo = 0.0, hi = r_cap;
    HitProbe hi_probe = top;
    for (int it = 0; it < 40 && (hi - lo) > 1e-3 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        auto p = probe(mid);
        if (p.level >= 0) {
            hi = mid;
            hi_probe = p;
        } else {
            lo = mid;
        }
    }
    out.hit = true;
    out.level = hi_probe.level;
    out.crit = hi_probe.crit;
    out.radius = hi;
    return out;
}

} // namespace

BlockCode decompose_blocks(const MapSpec& map, const BackwardOrbit& branch,
                           double delta_ball, const TechSequences& tech,
                           const ScaleConstants& scales,
                           const std::vector<CriticalDatum>& crit) {
    (void)delta_ball;
    BlockCode bc;
    bc.certified = scales.certified && tech.feasible;
    if (!scales.certified) bc.note = scales.notes;

    int n = branch.length();
    if (n == 0) return bc;

    std::vector<double> dseq =
        tech.feasible && !tech.delta_n.empty() ? tech.delta_n : default_delta_seq(n);
    while (static_cast<int>(dseq.size()) < n) dseq.push_back(dseq.back() * 0.5);
    std::vector<double> cap(n);
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        prod *= (1.0 - std::min(dseq[i], 0.49));
        cap[i] = prod;
    }

    auto orbits = critical_orbits(map, crit, n);
    int L = std::max(1, int(scales.L));
    double r_cap = 2.0 * scales.R_prime;

    int pos = 0;
    char prev = 0;  // 0 = start
    while (pos < n) {
        int remaining = n - pos;
        auto race = radius_race(map, branch, pos, remaining, r_cap, cap, crit, orbits);
        Block b;
        if (!race.hit) {
            b.type = '2';
            b.length = std::min(L, remaining);
        } else {
            b.type = (prev == '1' || prev == '3') ? '1' : '3';
            b.length = race.level;
            b.radius = race.radius;
            b.hit_crit = race.crit;
            b.hit_level = race.level;
        }
        b.expansion = branch.segment_expansion(pos, pos + b.length);
        b.terminal = branch.point_at(pos + b.length);
        pos += b.length;
        prev = b.type;
        bc.blocks.push_back(b);
    }

    // re-coding: short [2][3][1...1] stretches collapse into a single type-2
    // block (threshold L'' on the orbit length of the 3,1... part)
    std::vector<Block> recoded;
    size_t i = 0;
    while (i < bc.blocks.size()) {
        if (bc.blocks[i].type == '2' && i + 1 < bc.blocks.size() &&
            bc.blocks[i + 1].type == '3') {
            size_t j = i + 2;
            int stretch = bc.blocks[i + 1].length;
            while (j < bc.blocks.size() && bc.blocks[j].type == '1') {
                stretch += bc.blocks[j].length;
                ++j;
            }
            if (stretch < scales.L_dprime) {
                Block merged;
                merged.type = '2';
                merged.length = bc.blocks[i].length + stretch;
                merged.terminal = bc.blocks[j - 1].terminal;
                double exp = 1.0;
                for (size_t k = i; k < j; ++k) exp *= bc.blocks[k].expansion;
                merged.expansion = exp;
                recoded.push_back(merged);
                bc.recoded = true;
                i = j;
                continue;
            }
        }
        recoded.push_back(bc.blocks[i]);
        ++i;
    }
    bc.blocks = std::move(recoded);
    return bc;
}

BlockCode decompose_with_stopping(const MapSpec& map, const BackwardOrbit& branch,
                                  const ScaleConstants& scales,
                                  const std::vector<CriticalDatum>& crit) {
    BlockCode bc;
    bc.certified = scales.certified;
    int n = branch.length();
    if (n == 0) return bc;

    std::vector<double> dseq = default_delta_seq(n);
    std::vector<double> cap(n);
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        prod *= (1.0 - dseq[i]);
        cap[i] = prod;
    }
    double r_cap = 2.0 * scales.R_prime;
    auto orbits = critical_orbits(map, crit, n);

    int pos = 0;
    bool first = true;
    while (pos < n) {
        int remaining = n - pos;
        auto race = radius_race(map, branch, pos, remaining, r_cap, cap, crit, orbits);
        Block b;
        if (!race.hit) {
            // stopping rule: the first type-2 block ends the construction
            b.type = '2';
            b.length = remaining;
            b.expansion = branch.segment_expansion(pos, n);
            b.terminal = branch.endpoint();
            bc.blocks.push_back(b);
            return bc;
        }
        b.type = first ? '3' : '1';
        b.length = race.level;
        b.radius = race.radius;
        b.hit_crit = race.crit;
        b.hit_level = race.level;
        b.expansion = branch.segment_expansion(pos, pos + b.length);
        b.terminal = branch.point_at(pos + b.length);
        bc.blocks.push_back(b);
        pos += b.length;
        first = false;
    }
    return bc;
}

// ---------------------------------------------------------------------------
// backward summability diagnostics

BackwardClassSums backward_summability_check(const MapSpec& map, cplx z,
                                             double delta_ball, double beta,
                                             const TechSequences& tech,
                                             const ScaleConstants& scales,
                                             const std::vector<CriticalDatum>& crit,
                                             int depth, const PreimageOptions& opt) {
    BackwardClassSums out;
    auto tree = preimages(map, z, depth, opt);
    for (const auto& b : tree) {
        if (!univalent_on_branch(map, b, 0, b.length(), delta_ball, crit))
            continue;  // outside H(z, Delta)
        auto bc = decompose_blocks(map, b, delta_ball, tech, scales, crit);
        // walk construction order; group [3][1...] stretches
        int pos = 0;
        size_t i = 0;
        while (i < bc.blocks.size()) {
            const Block& blk = bc.blocks[i];
            if (blk.type == '2') {
                double w = std::pow(blk.expansion, -beta);
                if (blk.length >= scales.L && blk.length < scales.L_prime) {
                    out.sum_type2_long += w;
                    out.count_type2_long++;
                } else if (blk.length < scales.L) {
                    out.sum_type2_short += w;
                    out.count_type2_short++;
                }
                pos += blk.length;
                ++i;
                continue;
            }
            // a 3 opens a type-1 class; each subsequent 1-block endpoint is a
            // member of I(x|z)
            int start = pos;
            pos += blk.length;
            ++i;
            out.sum_type1 += std::pow(b.segment_expansion(start, pos), -beta);
            out.count_type1++;
            while (i < bc.blocks.size() && bc.blocks[i].type == '1') {
                pos += bc.blocks[i].length;
                out.sum_type1 += std::pow(b.segment_expansion(start, pos), -beta);
                out.count_type1++;
                ++i;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// pullback diameter sums and contraction

namespace {

struct PbNode {
    BackwardOrbit branch;
    Polygon poly;
};

std::vector<PullbackLevel> pullback_levels(const MapSpec& map, cplx center,
                                           double radius, int n_max, double p,
                                           bool weighted,
                                           const std::vector<CriticalDatum>& crit,
                                           const PreimageOptions& opt) {
    double width = std::pow(double(map.degree()), double(n_max));
    if (width > double(opt.branch_budget))
        throw std::runtime_error("pullback: budget exceeded");

    const int samples = 32;
    std::vector<PbNode> cur;
    {
        PbNode root;
        root.branch.base = center;
        root.poly.pts.resize(samples);
        for (int i = 0; i < samples; ++i) {
            double a = 2.0 * M_PI * i / samples;
            root.poly.pts[i] = center + radius * cplx(std::cos(a), std::sin(a));
        }
        cur.push_back(std::move(root));
    }

    std::vector<PullbackLevel> out;
    for (int level = 1; level <= n_max; ++level) {
        std::vector<PbNode> next;
        next.reserve(cur.size() * map.degree());
        for (const auto& node : cur) {
            cplx target = node.branch.endpoint();
            auto roots = map.preimages_of(target);
            for (size_t ri = 0; ri < roots.size(); ++ri) {
                PbNode child;
                child.branch = node.branch;
                cplx y = roots[ri];
                double d = std::abs(map.derivative(y));
                child.branch.points.push_back(y);
                child.branch.step_deriv.push_back(d);
                double prev = child.branch.cum_log_deriv.empty()
                                  ? 0.0
                                  : child.branch.cum_log_deriv.back();
                child.branch.cum_log_deriv.push_back(prev + std::log(std::max(d, 1e-300)));
                child.branch.path.push_back(static_cast<uint8_t>(ri));
                // polygon continuation toward this root
                child.poly.pts.resize(samples);
                for (int i = 0; i < samples; ++i) {
                    auto st = track_preimage(map, node.poly.pts[i], target, y, d);
                    child.poly.pts[i] = st.value;
                }
                next.push_back(std::move(child));
            }
        }
        cur = std::move(next);

        // cluster into components: endpoints lying inside another branch's
        // polygon belong to the same component (distance pre-filter keeps
        // this quadratic pass cheap)
        std::vector<double> diam(cur.size());
        for (size_t i = 0; i < cur.size(); ++i) diam[i] = cur[i].poly.diameter();
        std::vector<int> comp(cur.size(), -1);
        int ncomp = 0;
        for (size_t i = 0; i < cur.size(); ++i) {
            if (comp[i] >= 0) continue;
            comp[i] = ncomp;
            for (size_t j = i + 1; j < cur.size(); ++j) {
                if (comp[j] >= 0) continue;
                double gap = std::abs(cur[i].branch.endpoint() - cur[j].branch.endpoint());
                if (gap > diam[i] + diam[j]) continue;
                if (cur[i].poly.hits(cur[j].branch.endpoint(), 0.0) ||
                    cur[j].poly.hits(cur[i].branch.endpoint(), 0.0))
                    comp[j] = ncomp;
            }
            ++ncomp;
        }
        PullbackLevel pl;
        pl.n = level;
        pl.components = ncomp;
        pl.min_branch_deriv = std::numeric_limits<double>::infinity();
        std::vector<double> cdiam(ncomp, 0.0);
        std::vector<int> csize(ncomp, 0);
        for (size_t i = 0; i < cur.size(); ++i) {
            cdiam[comp[i]] = std::max(cdiam[comp[i]], cur[i].poly.diameter());
            csize[comp[i]]++;
            pl.min_branch_deriv =
                std::min(pl.min_branch_deriv, cur[i].branch.cumulative_deriv());
        }
        for (int c = 0; c < ncomp; ++c) {
            pl.max_diam = std::max(pl.max_diam, cdiam[c]);
            pl.sum += (weighted ? std::pow(cdiam[c], p) * csize[c] : 0.0);
        }
        out.push_back(pl);
        (void)crit;
    }
    return out;
}

double fit_ratio(const std::vector<double>& level_values) {
    std::vector<double> xs, ys;
    size_t n = level_values.size();
    size_t start = n > 6 ? n - 6 : 0;
    for (size_t i = start; i < n; ++i) {
        if (level_values[i] <= 0) continue;
        xs.push_back(double(i));
        ys.push_back(std::log(level_values[i]));
    }
    if (xs.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = xs.size() * sxx - sx * sx;
    return denom != 0 ? std::exp((xs.size() * sxy - sx * sy) / denom) : 0.0;
}

} // namespace

PullbackSumReport pullback_diameter_sum(const MapSpec& map, cplx center,
                                        double radius, double p, int n_max,
                                        const std::vector<CriticalDatum>& crit,
                                        const PreimageOptions& opt) {
    PullbackSumReport rep;
    rep.levels = pullback_levels(map, center, radius, n_max, p, true, crit, opt);
    std::vector<double> sums;
    for (const auto& l : rep.levels) {
        rep.total += l.sum;
        sums.push_back(l.sum);
    }
    rep.fitted_ratio = fit_ratio(sums);
    return rep;
}

PullbackSumReport pullback_contraction(const MapSpec& map, cplx center,
                                       double radius, int n_max,
                                       const std::vector<CriticalDatum>& crit,
                                       const PreimageOptions& opt) {
    PullbackSumReport rep;
    rep.levels = pullback_levels(map, center, radius, n_max, 0.0, false, crit, opt);
    std::vector<double> env;
    for (const auto& l : rep.levels) env.push_back(l.max_diam);
    rep.fitted_ratio = fit_ratio(env);
    return rep;
}

// ---------------------------------------------------------------------------
// large-scale statistics

LargeScaleReport large_scale_statistics(const MapSpec& map,
                                        const std::vector<cplx>& samples,
                                        double r_prime, int depth, double eps,
                                        const std::vector<CriticalDatum>& crit) {
    LargeScaleReport rep;
    rep.eps = eps;
    rep.r_prime = r_prime;
    int with_passage = 0;
    for (const auto& x : samples) {
        LargeScaleSample s;
        s.x = x;
        // forward orbit and cumulative derivative
        std::vector<cplx> orbit{x};
        std::vector<double> cumlog{0.0};
        cplx z = x;
        bool dead = false;
        for (int k = 1; k <= depth; ++k) {
            try {
                auto [fz, dz] = map.eval_with_derivative(z);
                cumlog.push_back(cumlog.back() + std::log(std::abs(dz)));
                z = fz;
                orbit.push_back(z);
            } catch (const PoleError&) {
                dead = true;
                break;
            }
        }
        int reach = static_cast<int>(orbit.size()) - 1;
        (void)dead;
        for (int k = 1; k <= reach; ++k) {
            // branch retracing the forward orbit: y_j = orbit[k - j]
            BackwardOrbit br;
            br.base = orbit[k];
            for (int j = 1; j <= k; ++j) {
                cplx y = orbit[k - j];
                br.points.push_back(y);
                double d = std::abs(map.derivative(y));
                br.step_deriv.push_back(d);
                double prev = br.cum_log_deriv.empty() ? 0.0 : br.cum_log_deriv.back();
                br.cum_log_deriv.push_back(prev + std::log(std::max(d, 1e-300)));
                br.path.push_back(0);
            }
            if (univalent_on_branch(map, br, 0, k, r_prime, crit))
                s.passage_times.push_back(k);
        }
        // eps-frequency: the paper's n_j is any chosen subsequence, so the
        // check reports the index past which consecutive passages already
        // satisfy |(F^{n_{j+1}})'(x)| < |(F^{n_j})'(x)|^{1+eps}
        if (s.passage_times.size() >= 2) {
            int from = -1;
            for (int j = int(s.passage_times.size()) - 2; j >= 0; --j) {
                double a = cumlog[s.passage_times[j]];
                double b = cumlog[s.passage_times[j + 1]];
                bool ok = a > 0 && b < (1.0 + eps) * a;
                if (!ok) break;
                from = j;
            }
            s.eps_frequent_from = from;
            s.eps_frequent = from >= 0;
        }
        if (!s.passage_times.empty()) ++with_passage;
        rep.samples.push_back(std::move(s));
    }
    rep.fraction_with_passages =
        samples.empty() ? 0.0 : double(with_passage) / double(samples.size());
    return rep;
}

// ---------------------------------------------------------------------------
// expansion envelope over the univalence-restricted tree

namespace {

struct EnvelopeFrame {
    cplx y;
    double lg;
    std::vector<cplx> poly;
};

void envelope_dfs(const MapSpec& map, const EnvelopeFrame& node, int level, int depth,
                  cplx base, double Delta,
                  const std::vector<CriticalDatum>& crit,
                  const std::vector<std::vector<cplx>>& orbits,
                  ExpansionEnvelope& env) {
    if (level == depth) return;
    auto roots = map.preimages_of(node.y);
    int samples = static_cast<int>(node.poly.size());
    for (const auto& y : roots) {
        double d = std::abs(map.derivative(y));
        EnvelopeFrame child;
        child.y = y;
        child.lg = node.lg + std::log(std::max(d, 1e-300));
        child.poly.resize(samples);
        Polygon pg;
        pg.pts.resize(samples);
        bool ok = true;
        for (int i = 0; i < samples; ++i) {
            auto st = track_preimage(map, node.poly[i], node.y, y, d);
            if (!st.ok) ok = false;
            pg.pts[i] = st.value;
            child.poly[i] = st.value;
        }
        if (!ok) continue;  // ambiguous tracking: not certifiable univalent
        bool univalent = true;
        for (size_t ci = 0; ci < crit.size() && univalent; ++ci) {
            if (crit[ci].at_infinity) continue;
            if (std::abs(orbits[ci][level] - base) > Delta * 1.5) continue;
            if (pg.hits(crit[ci].location)) univalent = false;
        }
        if (!univalent) continue;
        env.min_deriv[level] = std::min(env.min_deriv[level], std::exp(child.lg));
        env.branch_count[level]++;
        envelope_dfs(map, child, level + 1, depth, base, Delta, crit, orbits, env);
    }
}

} // namespace

ExpansionEnvelope min_univalent_expansion(const MapSpec& map, cplx z, double Delta,
                                          int depth,
                                          const std::vector<CriticalDatum>& crit,
                                          int samples) {
    ExpansionEnvelope env;
    env.min_deriv.assign(depth, std::numeric_limits<double>::infinity());
    env.branch_count.assign(depth, 0);
    auto orbits = critical_orbits(map, crit, depth);
    EnvelopeFrame root;
    root.y = z;
    root.lg = 0.0;
    root.poly.resize(samples);
    for (int i = 0; i < samples; ++i) {
        double a = 2.0 * M_PI * i / samples;
        root.poly[i] = z + Delta * cplx(std::cos(a), std::sin(a));
    }
    envelope_dfs(map, root, 0, depth, z, Delta, crit, orbits, env);
    env.nondecreasing_from = depth - 1;
    for (int i = depth - 1; i > 0; --i) {
        if (env.min_deriv[i] >= env.min_deriv[i - 1] * (1.0 - 1e-12))
            env.nondecreasing_from = i - 1;
        else
            break;
    }
    return env;
}

// ---------------------------------------------------------------------------
// Koebe certification

KoebeCheck koebe_certify(const MapSpec& map, cplx z, double r,
                         const BackwardOrbit& branch, int samples) {
    KoebeCheck kc;
    int n = branch.length();
    double inv_deriv = 1.0 / branch.cumulative_deriv();
    double s = 0.5;
    double lo_bound = (1.0 - s) / std::pow(1.0 + s, 3.0);
    double hi_bound = (1.0 + s) / std::pow(1.0 - s, 3.0);
    kc.pass = true;
    for (int i = 0; i < samples; ++i) {
        double a = 2.0 * M_PI * i / samples;
        cplx w = z + (r / 2.0) * cplx(std::cos(a), std::sin(a));
        // track w down the branch
        cplx cur = w, base_prev = z;
        bool ok = true;
        for (int l = 1; l <= n; ++l) {
            auto st = track_preimage(map, cur, base_prev, branch.point_at(l),
                                     branch.step_deriv[l - 1]);
            if (!st.ok) {
                ok = false;
                break;
            }
            cur = st.value;
            base_prev = branch.point_at(l);
        }
        if (!ok) continue;
        double ratio = std::abs(cur - branch.endpoint()) / (std::abs(w - z) * inv_deriv);
        kc.points++;
        kc.worst_low = std::min(kc.worst_low, ratio / lo_bound);
        kc.worst_high = std::max(kc.worst_high, ratio / hi_bound);
        if (ratio < lo_bound || ratio > hi_bound) kc.pass = false;
    }
    if (kc.points == 0) kc.pass = false;
    return kc;
}

// ---------------------------------------------------------------------------
// cache I/O

namespace {
constexpr char kCacheMagic[4] = {'D', 'L', 'P', 'T'};
constexpr uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& f, T& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
}
} // namespace

void write_preimage_cache(const std::string& path,
                          const std::array<uint8_t, 32>& map_hash, cplx z,
                          int depth, double root_tol,
                          const std::vector<BackwardOrbit>& tree) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open cache for writing: " + path);
    f.write(kCacheMagic, 4);
    put(f, kCacheVersion);
    f.write(reinterpret_cast<const char*>(map_hash.data()), 32);
    double zr = z.real(), zi = z.imag();
    put(f, zr);
    put(f, zi);
    uint32_t d = depth;
    put(f, d);
    put(f, root_tol);
    uint64_t count = tree.size();
    put(f, count);
    for (const auto& b : tree) {
        for (int l = 0; l < depth; ++l)
            put(f, l < b.length() ? b.path[l] : uint8_t(0));
        double er = b.endpoint().real(), ei = b.endpoint().imag();
        put(f, er);
        put(f, ei);
        double cl = b.cum_log_deriv.empty() ? 0.0 : b.cum_log_deriv.back();
        put(f, cl);
    }
}

std::vector<BackwardOrbit> read_preimage_cache(const std::string& path,
                                               const std::array<uint8_t, 32>& expect_hash,
                                               cplx* z_out, int* depth_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open cache: " + path);
    char magic[4];
    f.read(magic, 4);
    if (std::memcmp(magic, kCacheMagic, 4) != 0)
        throw std::runtime_error("cache: bad magic");
    uint32_t ver;
    get(f, ver);
    if (ver != kCacheVersion) throw std::runtime_error("cache: bad version");
    std::array<uint8_t, 32> h;
    f.read(reinterpret_cast<char*>(h.data()), 32);
    if (h != expect_hash) throw std::runtime_error("cache: map hash mismatch");
    double zr, zi, root_tol;
    get(f, zr);
    get(f, zi);
    uint32_t depth;
    get(f, depth);
    get(f, root_tol);
    uint64_t count;
    get(f, count);
    if (z_out) *z_out = cplx(zr, zi);
    if (depth_out) *depth_out = static_cast<int>(depth);
    std::vector<BackwardOrbit> tree(count);
    for (auto& b : tree) {
        b.base = cplx(zr, zi);
        b.path.resize(depth);
        f.read(reinterpret_cast<char*>(b.path.data()), depth);
        double er, ei, cl;
        get(f, er);
        get(f, ei);
        get(f, cl);
        b.points.assign(1, cplx(er, ei));  // endpoint only in the cache
        b.cum_log_deriv.assign(1, cl);
        b.step_deriv.assign(1, std::exp(cl));
    }
    return tree;
}

} // namespace dynlab
