#include "dynlab/real_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynlab {

IntervalMap IntervalMap::from_real_coeffs(std::vector<double> num, double a, double b) {
    IntervalMap f;
    std::vector<cplx> cc(num.begin(), num.end());
    f.num = Polynomial(std::move(cc));
    f.den = Polynomial::constant(1.0);
    f.a = a;
    f.b = b;
    f.analyze();
    return f;
}

IntervalMap IntervalMap::from_rational(std::vector<double> num, std::vector<double> den,
                                       double a, double b) {
    IntervalMap f;
    std::vector<cplx> nn(num.begin(), num.end()), dd(den.begin(), den.end());
    f.num = Polynomial(std::move(nn));
    f.den = Polynomial(std::move(dd));
    f.a = a;
    f.b = b;
    f.analyze();
    return f;
}

double IntervalMap::eval(double x) const {
    double q = den.eval(cplx(x, 0.0)).real();
    if (std::abs(q) < 1e-14) throw PoleError("interval map pole");
    return num.eval(cplx(x, 0.0)).real() / q;
}

double IntervalMap::derivative(double x, int order) const {
    if (den.degree() == 0) {
        Polynomial d = num;
        for (int i = 0; i < order; ++i) d = d.derivative();
        return d.eval(cplx(x, 0.0)).real() / den.coeffs()[0].real();
    }
    // rational: derivatives via the quotient rule applied recursively on
    // exact polynomial data (num/den stay low degree in practice)
    if (order == 0) return eval(x);
    // f = p/q => f' = (p'q - pq')/q^2; recurse symbolically
    IntervalMap d;
    d.num = num.derivative() * den - num * den.derivative();
    d.den = den * den;
    d.a = a;
    d.b = b;
    return order == 1 ? d.eval(x) : d.derivative(x, order - 1);
}

std::vector<double> IntervalMap::real_preimages(double x) const {
    Polynomial p = den.degree() == 0
                       ? num * (cplx(1.0) / den.coeffs()[0])
                       : num - den * cplx(x, 0.0);
    std::vector<cplx> roots = den.degree() == 0 ? solve_equals(p, cplx(x, 0.0))
                                                : solve_equals(p, cplx(0.0));
    std::vector<double> out;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > 1e-8) continue;
        double v = r.real();
        if (v >= a - 1e-12 && v <= b + 1e-12) out.push_back(std::clamp(v, a, b));
    }
    std::sort(out.begin(), out.end());
    // collapse double roots only when they are genuinely coincident
    out.erase(std::unique(out.begin(), out.end(),
                          [](double u, double v) { return std::abs(u - v) < 1e-13; }),
              out.end());
    return out;
}

std::vector<double> IntervalMap::critical_points_interior(double tol) const {
    Polynomial dp = den.degree() == 0
                        ? num.derivative()
                        : num.derivative() * den - num * den.derivative();
    std::vector<double> out;
    if (dp.degree() < 1) return out;
    auto rr = find_roots(dp);
    for (const auto& r : rr.roots) {
        if (std::abs(r.imag()) > 1e-8) continue;
        double v = r.real();
        if (v > a + tol && v < b - tol) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double u, double v) { return std::abs(u - v) < 1e-10; }),
              out.end());
    return out;
}

void IntervalMap::analyze() {
    // extrema of f on [a,b] occur at endpoints or interior critical points
    double lo = std::min(eval(a), eval(b));
    double hi = std::max(eval(a), eval(b));
    for (double c : critical_points_interior()) {
        double v = eval(c);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    invariant = lo >= a - 1e-12 && hi <= b + 1e-12;
}

double schwarzian(const IntervalMap& f, double x, double deriv_tol) {
    double d1 = f.derivative(x, 1);
    if (std::abs(d1) <= deriv_tol)
        throw std::domain_error("schwarzian: derivative vanishes at the point");
    double d2 = f.derivative(x, 2);
    double d3 = f.derivative(x, 3);
    double r = d2 / d1;
    return d3 / d1 - 1.5 * r * r;
}

SchwarzianCheck negative_schwarzian_check(const IntervalMap& f, int grid_points,
                                          double crit_avoid_tol) {
    SchwarzianCheck ck;
    auto crits = f.critical_points_interior();
    for (int i = 1; i < grid_points; ++i) {
        double x = f.a + (f.b - f.a) * i / grid_points;
        bool near_crit = false;
        for (double c : crits)
            if (std::abs(x - c) < crit_avoid_tol) near_crit = true;
        if (near_crit) {
            ck.points_skipped++;
            continue;
        }
        double s = schwarzian(f, x);
        ck.max_value = std::max(ck.max_value, s);
        ck.points_used++;
    }
    ck.negative_everywhere = ck.points_used > 0 && ck.max_value < 0.0;
    ck.min_margin = -ck.max_value;
    return ck;
}

namespace {

// all per-level values of (1/N) L^i(rho0) at x via depth-first recursion
void real_dfs(const IntervalMap& f, double x, double logw, int level, int N,
              std::vector<double>& level_sums) {
    if (level == N) return;
    for (double y : f.real_preimages(x)) {
        double d = std::abs(f.derivative(y));
        if (d < 1e-12) continue;  // critical preimage: measure-zero branch
        double nl = logw - std::log(d);
        level_sums[level] += std::exp(nl);
        real_dfs(f, y, nl, level + 1, N, level_sums);
    }
}

} // namespace

RealDensityEstimate real_transfer_apply(const IntervalMap& f,
                                        const std::vector<double>& grid, int N) {
    RealDensityEstimate est;
    est.grid = grid;
    est.iterations = N;
    double rho0 = 1.0 / (f.b - f.a);
    auto crits = f.critical_points_interior();
    for (double x : grid) {
        bool is_cv = false;
        for (double c : crits)
            if (std::abs(f.eval(c) - x) < 1e-10) is_cv = true;
        est.skipped.push_back(is_cv);
        if (is_cv) {
            est.values.push_back(0.0);
            continue;
        }
        std::vector<double> sums(std::max(N, 1), 0.0);
        if (N >= 1) real_dfs(f, x, 0.0, 0, N, sums);
        // Cesaro over the first N iterates L^1..L^N of the uniform density
        double acc = 0.0;
        for (int i = 0; i < N; ++i) acc += sums[i];
        est.values.push_back(N >= 1 ? rho0 * acc / N : rho0);
    }
    return est;
}

std::vector<double> real_transfer_once(const IntervalMap& f,
                                       const std::function<double(double)>& rho,
                                       const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        double s = 0.0;
        for (double y : f.real_preimages(x)) {
            double d = std::abs(f.derivative(y));
            if (d < 1e-12) continue;
            s += rho(y) / d;
        }
        out.push_back(s);
    }
    return out;
}

PeriodicPointReport repelling_periodic_check(const IntervalMap& f, int max_period,
                                             int scan_points) {
    PeriodicPointReport rep;
    rep.worst_multiplier = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_period; ++k) {
        // sign changes of f^k(x) - x on a dense grid, refined by bisection
        auto fk = [&](double x) {
            double v = x;
            for (int i = 0; i < k; ++i) v = f.eval(v);
            return v - x;
        };
        double prev_x = f.a, prev_v = fk(f.a);
        for (int i = 1; i <= scan_points; ++i) {
            double x = f.a + (f.b - f.a) * i / scan_points;
            double v = fk(x);
            if ((prev_v < 0) != (v < 0)) {
                double lo = prev_x, hi = x;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if ((fk(lo) < 0) != (fk(mid) < 0))
                        hi = mid;
                    else
                        lo = mid;
                }
                double p = 0.5 * (lo + hi);
                double mult = 1.0, z = p;
                for (int j = 0; j < k; ++j) {
                    mult *= f.derivative(z);
                    z = f.eval(z);
                }
                rep.points_found++;
                double m = std::abs(mult);
                if (m < rep.worst_multiplier) {
                    rep.worst_multiplier = m;
                    rep.worst_period = k;
                }
                if (m <= 1.0 + 1e-9) rep.all_repelling = false;
            }
            prev_x = x;
            prev_v = v;
        }
    }
    return rep;
}

Theorem6Report interval_theorem6_report(
    const IntervalMap& f, double alpha, int n_max, int density_N,
    const std::vector<double>& density_grid,
    const std::function<double(double)>* oracle_density) {
    Theorem6Report rep;
    rep.alpha = alpha;

    auto sck = negative_schwarzian_check(f, 10000);
    rep.schwarzian_ok = sck.negative_everywhere;

    auto pck = repelling_periodic_check(f, 6);
    rep.periodic_ok = pck.all_repelling;

    // sigma over the interior critical points (multiplicity from vanishing
    // derivatives)
    auto crits = f.critical_points_interior();
    rep.mu_max = 2;
    for (double c : crits) {
        int mu = 2;
        for (int k = 2; k <= f.num.degree() + 1; ++k) {
            if (std::abs(f.derivative(c, k)) > 1e-6) {
                mu = k;
                break;
            }
        }
        rep.mu_max = std::max(rep.mu_max, mu);
    }
    rep.threshold = 1.0 / (1.0 + rep.mu_max);
    rep.threshold_ok = alpha < rep.threshold;

    if (crits.empty()) {
        rep.sigma = SigmaSeq::vacuous_marker(n_max);
    } else {
        std::vector<double> vals(n_max);
        std::vector<double> pos(crits.size());
        std::vector<double> logs(crits.size(), 0.0);
        for (size_t i = 0; i < crits.size(); ++i) pos[i] = f.eval(crits[i]);
        for (int nstep = 1; nstep <= n_max; ++nstep) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < crits.size(); ++i) {
                logs[i] += std::log(std::abs(f.derivative(pos[i])));
                pos[i] = f.eval(pos[i]);
                best = std::min(best, logs[i]);
            }
            vals[nstep - 1] = std::exp(best);
        }
        rep.sigma = SigmaSeq::from_values(std::move(vals));
    }
    auto summ = summability_report(rep.sigma, alpha, false, rep.mu_max);
    rep.summability = summ.verdict;

    rep.hypotheses_met = rep.schwarzian_ok && rep.periodic_ok && rep.threshold_ok &&
                         (rep.summability == SummabilityVerdict::Converges ||
                          rep.summability == SummabilityVerdict::ConvergesVacuously);
    if (!rep.hypotheses_met) rep.note = "hypothesis not met";

    rep.density = real_transfer_apply(f, density_grid, density_N);
    if (oracle_density) {
        double worst = 0.0;
        for (size_t i = 0; i < density_grid.size(); ++i) {
            if (rep.density.skipped[i]) continue;
            double ref = (*oracle_density)(density_grid[i]);
            if (ref <= 0) continue;
            worst = std::max(worst, std::abs(rep.density.values[i] - ref) / ref);
        }
        rep.oracle_max_rel_err = worst;
    }
    return rep;
}

} // namespace dynlab
