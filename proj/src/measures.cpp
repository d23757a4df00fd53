#include "dynlab/measures.hpp"

#include "dynlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace dynlab {

AtomicMeasure atomic_conformal_measure(const MapSpec& map, cplx z, double p,
                                       int n_max, long branch_budget) {
    double width = std::pow(double(map.degree()), double(n_max));
    if (width > double(branch_budget))
        throw std::runtime_error("atomic_conformal_measure: budget exceeded");

    AtomicMeasure nu;
    nu.exponent = p;
    nu.base_point = z;
    nu.depth = n_max;

    std::vector<std::pair<cplx, double>> cur{{z, 0.0}};
    double total = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<std::pair<cplx, double>> next;
        next.reserve(cur.size() * map.degree());
        for (const auto& [w, lg] : cur) {
            auto roots = map.preimages_of(w);
            for (const auto& y : roots) {
                double d = std::abs(map.derivative(y));
                double nl = lg + std::log(std::max(d, 1e-300));
                double weight = std::exp(-p * nl);
                nu.points.push_back(y);
                nu.weights.push_back(weight);
                nu.depths.push_back(n);
                total += weight;
                next.emplace_back(y, nl);
            }
        }
        cur = std::move(next);
    }
    if (total <= 0.0 || !std::isfinite(total))
        throw std::runtime_error("atomic_conformal_measure: zero or infinite mass");
    nu.total_unnormalized = total;
    for (auto& w : nu.weights) w /= total;
    return nu;
}

AtomicMeasure AtomicMeasure::tail_restricted(int min_depth) const {
    AtomicMeasure out;
    out.exponent = exponent;
    out.base_point = base_point;
    out.depth = depth;
    out.patterson = patterson;
    double mass = 0.0;
    for (size_t i = 0; i < size(); ++i) {
        if (depths[i] < min_depth) continue;
        out.points.push_back(points[i]);
        out.weights.push_back(weights[i]);
        out.depths.push_back(depths[i]);
        mass += weights[i];
    }
    if (mass <= 0.0) throw std::runtime_error("tail_restricted: empty tail");
    out.total_unnormalized = total_unnormalized * mass;
    for (auto& w : out.weights) w /= mass;
    return out;
}

namespace {

// half-open dyadic binning over the box
int bin_index(const BoundingBox& bbox, int per_side, cplx p) {
    double fx = (p.real() - bbox.x_min) / bbox.width();
    double fy = (p.imag() - bbox.y_min) / bbox.height();
    if (fx < 0.0 || fx >= 1.0 || fy < 0.0 || fy >= 1.0) return -1;
    int ix = static_cast<int>(fx * per_side);
    int iy = static_cast<int>(fy * per_side);
    return iy * per_side + ix;
}

} // namespace

ScheduleReport conformal_p_schedule(const MapSpec& map, cplx z,
                                    const std::vector<double>& p_schedule, int n_max,
                                    const BoundingBox& bbox, int bins_per_side) {
    ScheduleReport rep;
    rep.bins_per_side = bins_per_side;
    std::vector<double> prev;
    for (double p : p_schedule) {
        auto nu = atomic_conformal_measure(map, z, p, n_max)
                      .tail_restricted(n_max / 2 + 1);
        std::vector<double> bins(size_t(bins_per_side) * bins_per_side, 0.0);
        for (size_t i = 0; i < nu.size(); ++i) {
            int b = bin_index(bbox, bins_per_side, nu.points[i]);
            if (b >= 0) bins[b] += nu.weights[i];
        }
        rep.exponents.push_back(p);
        if (!prev.empty()) {
            double drift = 0.0;
            for (size_t i = 0; i < bins.size(); ++i)
                drift = std::max(drift, std::abs(bins[i] - prev[i]));
            rep.bin_drift.push_back(drift);
        }
        prev = std::move(bins);
    }
    rep.final_bins = prev;
    return rep;
}

ConformalityReport conformality_residual(const AtomicMeasure& nu, const MapSpec& map,
                                         double p, const BoundingBox& bbox,
                                         int cells_per_side) {
    ConformalityReport rep;
    int ncells = cells_per_side * cells_per_side;
    double cw = bbox.width() / cells_per_side;
    double ch = bbox.height() / cells_per_side;
    double cell_diam = std::hypot(cw, ch);

    auto crit = critical_points(map);

    // image atoms: depth <= N-1 atoms plus the base point as virtual depth 0
    // with weight 1/Z (the weight the transfer identity assigns to it)
    std::vector<cplx> img_pts;
    std::vector<double> img_wts;
    img_pts.push_back(nu.base_point);
    img_wts.push_back(1.0 / nu.total_unnormalized);
    for (size_t i = 0; i < nu.size(); ++i) {
        if (nu.depths[i] <= nu.depth - 1) {
            img_pts.push_back(nu.points[i]);
            img_wts.push_back(nu.weights[i]);
        }
    }
    // roots of each image atom (for geometric membership of F(B))
    std::vector<std::vector<cplx>> img_roots(img_pts.size());
    for (size_t i = 0; i < img_pts.size(); ++i)
        img_roots[i] = map.preimages_of(img_pts[i]);

    double sum_abs = 0.0, sum_rel = 0.0;
    for (int cell = 0; cell < ncells; ++cell) {
        int cx = cell % cells_per_side, cy = cell / cells_per_side;
        double x0 = bbox.x_min + cx * cw, y0 = bbox.y_min + cy * ch;
        cplx center(x0 + cw / 2, y0 + ch / 2);
        auto in_cell = [&](cplx q) {
            return q.real() >= x0 && q.real() < x0 + cw && q.imag() >= y0 &&
                   q.imag() < y0 + ch;
        };

        // integral side: all atoms in B
        double integral = 0.0;
        bool any_atom = false;
        for (size_t i = 0; i < nu.size(); ++i) {
            if (!in_cell(nu.points[i])) continue;
            any_atom = true;
            integral += nu.weights[i] *
                        std::pow(std::abs(map.derivative(nu.points[i])), p);
        }
        if (!any_atom) continue;

        // injectivity surrogate: no critical point inside, diameter below
        // half the sibling-preimage separation at the center
        bool skip = false;
        for (const auto& c : crit) {
            if (c.at_infinity) continue;
            if (in_cell(c.location)) skip = true;
        }
        if (!skip) {
            auto sib = map.preimages_of(map.eval(center));
            double dmin = std::numeric_limits<double>::infinity(), dbest = dmin;
            cplx self = center;
            for (const auto& s : sib)
                if (std::abs(s - center) < dbest) {
                    dbest = std::abs(s - center);
                    self = s;
                }
            for (const auto& s : sib) {
                if (std::abs(s - self) < 1e-12) continue;
                dmin = std::min(dmin, std::abs(s - self));
            }
            if (cell_diam >= 0.5 * dmin) skip = true;
        }
        if (skip) {
            rep.cells_skipped++;
            continue;
        }

        // pushforward side: image atoms with a root in B
        double flow = 0.0;
        for (size_t i = 0; i < img_pts.size(); ++i) {
            for (const auto& u : img_roots[i]) {
                if (in_cell(u)) {
                    flow += img_wts[i];
                    break;
                }
            }
        }

        double abs_res = std::abs(flow - integral);
        double denom = std::max(flow, integral);
        rep.cells_used++;
        sum_abs += abs_res;
        rep.max_abs = std::max(rep.max_abs, abs_res);
        if (denom > 1e-14) {
            double rel = abs_res / denom;
            sum_rel += rel;
            rep.max_rel = std::max(rep.max_rel, rel);
        }
    }
    if (rep.cells_used > 0) {
        rep.mean_abs = sum_abs / rep.cells_used;
        rep.mean_rel = sum_rel / rep.cells_used;
    } else {
        rep.note = "no usable cells";
    }
    return rep;
}

GaugeReport gauge_check(const AtomicMeasure& nu, double q, double eps,
                        int sample_count, int j_min, int j_max) {
    GaugeReport rep;
    rep.lower_family_min = rep.upper_family_min = std::numeric_limits<double>::infinity();
    rep.lower_family_max = rep.upper_family_max = 0.0;

    size_t stride = std::max<size_t>(1, nu.size() / std::max(1, sample_count));
    for (size_t si = 0; si < nu.size() && rep.samples_used < sample_count;
         si += stride) {
        cplx x = nu.points[si];
        bool usable = true;
        double lo_min = std::numeric_limits<double>::infinity(), lo_max = 0.0;
        double up_min = lo_min, up_max = 0.0;
        for (int j = j_min; j <= j_max; ++j) {
            double r = std::pow(2.0, -double(j));
            double mass = 0.0;
            int inside = 0;
            for (size_t i = 0; i < nu.size(); ++i) {
                if (std::abs(nu.points[i] - x) <= r) {
                    mass += nu.weights[i];
                    ++inside;
                }
            }
            if (inside < 3) {
                usable = false;
                break;
            }
            double f1 = mass / std::pow(r, q);
            double f2 = mass / std::pow(r, q - eps);
            lo_min = std::min(lo_min, f1);
            lo_max = std::max(lo_max, f1);
            up_min = std::min(up_min, f2);
            up_max = std::max(up_max, f2);
        }
        if (!usable) {
            rep.samples_skipped++;
            continue;
        }
        rep.samples_used++;
        rep.lower_family_min = std::min(rep.lower_family_min, lo_min);
        rep.lower_family_max = std::max(rep.lower_family_max, lo_max);
        rep.upper_family_min = std::min(rep.upper_family_min, up_min);
        rep.upper_family_max = std::max(rep.upper_family_max, up_max);
    }
    rep.pass = rep.samples_used > 0 && rep.lower_family_min > 0.0 &&
               std::isfinite(rep.upper_family_max);
    return rep;
}

IntegrabilityReport integrability_check(const AtomicMeasure& nu,
                                        const std::vector<cplx>& critical_orbit,
                                        double eta, int horizon, double user_bound,
                                        double exclusion_tol) {
    IntegrabilityReport rep;
    rep.bound = user_bound;
    int n = std::min<int>(horizon, static_cast<int>(critical_orbit.size()));
    for (int i = 0; i < n; ++i) {
        cplx target = critical_orbit[i];
        double integral = 0.0;
        for (size_t a = 0; a < nu.size(); ++a) {
            double d = std::abs(nu.points[a] - target);
            if (d < exclusion_tol) {
                rep.excluded_atoms++;
                continue;
            }
            integral += nu.weights[a] * std::pow(d, -eta);
        }
        rep.integrals.push_back(integral);
        rep.sup = std::max(rep.sup, integral);
    }
    rep.bounded_by = rep.sup < user_bound;
    return rep;
}

namespace {

// depth-first accumulation of all level sums sum |(F^i)'|^-delta, i<=N
void transfer_dfs(const MapSpec& map, cplx w, double lg, int level, int N,
                  double delta, std::vector<double>& level_sums) {
    if (level == N) return;
    auto roots = map.preimages_of(w);
    for (const auto& y : roots) {
        double d = std::abs(map.derivative(y));
        double nl = lg + std::log(std::max(d, 1e-300));
        level_sums[level] += std::exp(-delta * nl);
        transfer_dfs(map, y, nl, level + 1, N, delta, level_sums);
    }
}

bool near_critical_orbit(const MapSpec& map, cplx z, double tol, int horizon) {
    auto crit = critical_points(map);
    return !is_admissible(map, crit, z, tol, horizon);
}

} // namespace

TransferValues transfer_apply(const MapSpec& map, double delta,
                              const std::vector<cplx>& points, int N,
                              long branch_budget) {
    double width = std::pow(double(map.degree()), double(N));
    if (width > double(branch_budget))
        throw std::runtime_error("transfer_apply: budget exceeded");
    TransferValues out;
    for (const auto& z : points) {
        out.singular_warning.push_back(near_critical_orbit(map, z, 1e-9, 64));
        if (N == 0) {
            out.values.push_back(1.0);
            continue;
        }
        std::vector<double> sums(N, 0.0);
        transfer_dfs(map, z, 0.0, 0, N, delta, sums);
        out.values.push_back(sums[N - 1]);
    }
    return out;
}

DensityField invariant_density_estimate(const MapSpec& map, double delta,
                                        const std::vector<cplx>& grid, int N,
                                        const TechSequences* tech,
                                        const std::vector<CriticalDatum>* crit,
                                        long branch_budget) {
    double width = std::pow(double(map.degree()), double(N));
    if (width > double(branch_budget))
        throw std::runtime_error("invariant_density_estimate: budget exceeded");
    DensityField df;
    df.delta = delta;
    df.iterations = N;
    df.points = grid;
    df.min_value = std::numeric_limits<double>::infinity();
    double max_env = 0.0;
    bool env_ok = tech && tech->feasible && crit;
    for (const auto& z : grid) {
        std::vector<double> sums(std::max(N, 1), 0.0);
        if (N >= 1) transfer_dfs(map, z, 0.0, 0, N, delta, sums);
        // Cesaro over the first N iterates L^1, ..., L^N
        double acc = 0.0;
        for (int i = 0; i < N; ++i) acc += sums[i];
        double avg = N >= 1 ? acc / N : 1.0;
        double last = N >= 2 ? (sums[N - 1] - avg) / N : 0.0;
        df.values.push_back(avg);
        df.trace_last_delta.push_back(last);
        df.min_value = std::min(df.min_value, avg);
        if (env_ok) {
            // g(z) = sum gamma_k^-delta dist(F^k(Crit), z)^-(1-1/mu)delta
            double g = 0.0;
            double expn = (1.0 - 1.0 / tech->mu_max) * delta;
            for (const auto& c : *crit) {
                if (c.at_infinity) continue;
                for (size_t k = 0;
                     k < tech->gamma_n.size() && k < c.forward_orbit.size(); ++k) {
                    double dist = std::abs(c.forward_orbit[k] - z);
                    if (dist < 1e-12) continue;
                    g += std::pow(tech->gamma_n[k], -delta) * std::pow(dist, -expn);
                }
            }
            if (g > 0.0) max_env = std::max(max_env, avg / g);
        }
    }
    df.envelope_available = env_ok;
    df.envelope_ratio = max_env;
    return df;
}

BirkhoffHistogram birkhoff_measure(const MapSpec& map, cplx x0, long n,
                                   const BinSpec& bins) {
    BirkhoffHistogram h;
    h.mass.assign(bins.count, 0.0);
    double esc = map.default_escape_radius();
    cplx z = x0;
    long counted = 0;
    for (long i = 0; i <= n; ++i) {
        int b = -1;
        if (bins.kind == BinSpec::RealLine) {
            double x = z.real();
            if (x >= bins.lo && x < bins.hi)
                b = static_cast<int>((x - bins.lo) / (bins.hi - bins.lo) * bins.count);
        } else {
            double a = std::arg(z);
            if (a < 0) a += 2.0 * M_PI;
            b = std::min(bins.count - 1,
                         static_cast<int>(a / (2.0 * M_PI) * bins.count));
        }
        if (b >= 0 && b < bins.count) {
            h.mass[b] += 1.0;
            ++counted;
        } else {
            ++h.out_of_range;
        }
        if (i == n) break;
        try {
            z = map.eval(z);
        } catch (const PoleError&) {
            h.orbit_escaped = true;
            h.escape_step = static_cast<int>(i);
            break;
        }
        if (std::abs(z) > 4.0 * esc) {
            h.orbit_escaped = true;
            h.escape_step = static_cast<int>(i + 1);
            break;
        }
    }
    h.total_points = counted;
    if (counted > 0)
        for (auto& m : h.mass) m /= double(counted);
    return h;
}

ErgodicStats entropy_lyapunov(const MapSpec& map, cplx x0, long n, int bins,
                              double lo, double hi) {
    ErgodicStats st;
    st.orbit_length = n;
    BinSpec bs;
    bs.kind = BinSpec::RealLine;
    bs.count = bins;
    bs.lo = lo;
    bs.hi = hi;
    auto hist = birkhoff_measure(map, x0, n, bs);

    // Lyapunov: Birkhoff average of log |F'|
    cplx z = x0;
    double acc = 0.0;
    long used = 0;
    for (long i = 0; i < n; ++i) {
        auto [fz, dz] = map.eval_with_derivative(z);
        double m = std::abs(dz);
        if (m > 1e-300) {
            acc += std::log(m);
            ++used;
        }
        z = fz;
        if (std::abs(z) > 4.0 * map.default_escape_radius()) break;
    }
    st.lyapunov = used > 0 ? acc / double(used) : 0.0;

    // entropy: h = sum sigma(A) log(sigma(F A)/sigma(A)) over bins where F is
    // monotone (bins containing critical points are excluded and reported)
    auto crit = critical_points(map);
    double w = (hi - lo) / bins;
    double h_acc = 0.0, mass_used = 0.0;
    st.min_jacobian = std::numeric_limits<double>::infinity();
    for (int b = 0; b < bins; ++b) {
        if (hist.mass[b] <= 0.0) continue;
        double a0 = lo + b * w, a1 = a0 + w;
        bool has_crit = false;
        for (const auto& c : crit) {
            if (c.at_infinity) continue;
            if (std::abs(c.location.imag()) < 1e-9 && c.location.real() >= a0 &&
                c.location.real() <= a1)
                has_crit = true;
        }
        if (has_crit) {
            st.bins_excluded++;
            continue;
        }
        double f0 = map.eval(cplx(a0, 0.0)).real();
        double f1 = map.eval(cplx(a1, 0.0)).real();
        double i0 = std::min(f0, f1), i1 = std::max(f0, f1);
        // image intervals narrower than one histogram bin cannot support a
        // measure-ratio estimate (the density varies too much within a bin)
        if (i1 - i0 < w) {
            st.bins_excluded++;
            continue;
        }
        // mass of the image interval from the histogram (partial bins
        // weighted by overlap)
        double img_mass = 0.0;
        for (int c = 0; c < bins; ++c) {
            double c0 = lo + c * w, c1 = c0 + w;
            double ov = std::max(0.0, std::min(i1, c1) - std::max(i0, c0));
            if (ov > 0) img_mass += hist.mass[c] * (ov / w);
        }
        if (img_mass <= 0.0) {
            st.bins_excluded++;
            continue;
        }
        double jac = img_mass / hist.mass[b];
        st.min_jacobian = std::min(st.min_jacobian, jac);
        h_acc += hist.mass[b] * std::log(jac);
        mass_used += hist.mass[b];
    }
    st.entropy = mass_used > 0 ? h_acc / mass_used : 0.0;
    st.coarse_bins_warning = st.bins_excluded > bins / 4;
    return st;
}

PushforwardAudit pushforward_audit(const AtomicMeasure& nu, const MapSpec& map,
                                   const BoundingBox& cell) {
    PushforwardAudit audit;
    auto in_cell = [&](cplx q) {
        return q.real() >= cell.x_min && q.real() < cell.x_max &&
               q.imag() >= cell.y_min && q.imag() < cell.y_max;
    };
    // route 1: atoms whose image lands in A
    for (size_t i = 0; i < nu.size(); ++i)
        if (in_cell(map.eval(nu.points[i]))) audit.membership += nu.weights[i];
    // route 2: atoms in A pull their own weight back via the Jacobian
    // relation w(u) = w(F(u)) |F'(u)|^-p, so sum over atom parents in A
    for (size_t i = 0; i < nu.size(); ++i) {
        if (nu.depths[i] >= 2) {
            cplx parent = map.eval(nu.points[i]);
            if (in_cell(parent)) audit.transfer += nu.weights[i];
        } else {
            if (in_cell(nu.base_point)) audit.transfer += nu.weights[i];
        }
    }
    audit.difference = std::abs(audit.membership - audit.transfer);
    return audit;
}

void write_measure_json(const AtomicMeasure& nu, const std::string& path) {
    nlohmann::json j;
    j["exponent"] = nu.exponent;
    j["base"] = {nu.base_point.real(), nu.base_point.imag()};
    j["depth"] = nu.depth;
    j["patterson"] = nu.patterson;
    j["total_unnormalized"] = nu.total_unnormalized;
    nlohmann::json atoms = nlohmann::json::array();
    for (size_t i = 0; i < nu.size(); ++i)
        atoms.push_back({nu.points[i].real(), nu.points[i].imag(), nu.weights[i]});
    j["atoms"] = std::move(atoms);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

AtomicMeasure read_measure_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    f >> j;
    AtomicMeasure nu;
    nu.exponent = j["exponent"].get<double>();
    nu.base_point = cplx(j["base"][0].get<double>(), j["base"][1].get<double>());
    nu.depth = j["depth"].get<int>();
    nu.patterson = j.value("patterson", false);
    nu.total_unnormalized = j.value("total_unnormalized", 0.0);
    for (const auto& a : j["atoms"]) {
        nu.points.emplace_back(a[0].get<double>(), a[1].get<double>());
        nu.weights.push_back(a[2].get<double>());
        nu.depths.push_back(0);
    }
    return nu;
}

} // namespace dynlab
