#include "dynlab/orbit_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynlab {

SigmaSeq SigmaSeq::from_values(std::vector<double> v) {
    SigmaSeq s;
    s.horizon = static_cast<int>(v.size());
    s.values = std::move(v);
    s.contributor.assign(s.values.size(), 0);
    return s;
}

SigmaSeq SigmaSeq::vacuous_marker(int n) {
    SigmaSeq s;
    s.vacuous = true;
    s.horizon = n;
    s.values.assign(n, std::numeric_limits<double>::infinity());
    s.contributor.assign(n, -1);
    return s;
}

SigmaSeq sigma_sequence(const MapSpec& map, const std::vector<CriticalDatum>& crit,
                        int n) {
    // contributing set: finite critical points not classified off the Julia set
    std::vector<int> contributing;
    for (size_t i = 0; i < crit.size(); ++i) {
        if (crit[i].at_infinity) continue;
        if (crit[i].in_julia == JuliaMembership::No) continue;
        contributing.push_back(static_cast<int>(i));
    }
    if (contributing.empty()) return SigmaSeq::vacuous_marker(n);

    SigmaSeq s;
    s.horizon = n;
    s.values.assign(n, 0.0);
    s.contributor.assign(n, -1);

    // running products of |F'| along each forward orbit of F(c)
    std::vector<cplx> pos(contributing.size());
    std::vector<double> logprod(contributing.size(), 0.0);
    for (size_t j = 0; j < contributing.size(); ++j)
        pos[j] = map.eval(crit[contributing[j]].location);

    for (int step = 1; step <= n; ++step) {
        // track the minimum in log scale to dodge overflow
        double best_log = std::numeric_limits<double>::infinity();
        int who = -1;
        for (size_t j = 0; j < contributing.size(); ++j) {
            auto [fz, dz] = map.eval_with_derivative(pos[j]);
            logprod[j] += std::log(std::abs(dz));
            pos[j] = fz;
            if (logprod[j] < best_log) {
                best_log = logprod[j];
                who = contributing[j];
            }
        }
        s.values[step - 1] = std::exp(best_log);
        s.contributor[step - 1] = who;
    }
    return s;
}

namespace {

// least-squares slope of y against x
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

} // namespace

SummabilityReport summability_report(const SigmaSeq& sigma, double alpha,
                                     bool polynomial_weight, int mu_max,
                                     const std::vector<double>& threshold_deltas) {
    SummabilityReport rep;
    rep.alpha = alpha;
    rep.polynomial_weight = polynomial_weight;
    for (double d : threshold_deltas)
        rep.thresholds.emplace_back(d, d / (d + mu_max));

    if (sigma.vacuous) {
        rep.verdict = SummabilityVerdict::ConvergesVacuously;
        rep.note = "empty contributing critical set";
        return rep;
    }

    int n = sigma.horizon;
    std::vector<double> terms(n);
    double sum = 0.0;
    rep.partial_sums.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::pow(sigma.values[i], -alpha);
        if (polynomial_weight) t *= (i + 1);
        terms[i] = t;
        sum += t;
        rep.partial_sums[i] = sum;
    }

    // geometric ratio over the trailing window
    int win = std::min(8, n / 2);
    if (win >= 2) {
        std::vector<double> xs, ys;
        for (int i = n - win; i < n; ++i) {
            if (terms[i] <= 0.0) continue;
            xs.push_back(i);
            ys.push_back(std::log(terms[i]));
        }
        if (xs.size() >= 2) rep.fitted_ratio = std::exp(lsq_slope(xs, ys));
    }

    const double conv_margin = 1e-3;
    if (rep.fitted_ratio > 0.0 && rep.fitted_ratio < 1.0 - conv_margin) {
        rep.verdict = SummabilityVerdict::Converges;
        double r = rep.fitted_ratio;
        rep.tail_estimate = terms[n - 1] * r / (1.0 - r);
        rep.total_estimate = sum + rep.tail_estimate;
        rep.note = "geometric-tail certificate";
        return rep;
    }

    // no geometric decay: check for power-law terms t_n ~ n^p with p >= -1
    // (divergence) by slope of log t against log n
    if (n >= 8) {
        std::vector<double> xs, ys;
        for (int i = n / 2; i < n; ++i) {
            if (terms[i] <= 0.0) continue;
            xs.push_back(std::log(double(i + 1)));
            ys.push_back(std::log(terms[i]));
        }
        if (xs.size() >= 4) {
            double p = lsq_slope(xs, ys);
            if (p >= -1.0 - 1e-6) {
                rep.verdict = SummabilityVerdict::Diverges;
                rep.total_estimate = sum;
                rep.note = "terms decay no faster than 1/n (fitted power " +
                           std::to_string(p) + ")";
                return rep;
            }
            rep.verdict = SummabilityVerdict::Converges;
            // crude integral-test tail for power-law terms
            rep.tail_estimate = terms[n - 1] * double(n) / (-p - 1.0);
            rep.total_estimate = sum + rep.tail_estimate;
            rep.note = "power-law tail (fitted power " + std::to_string(p) + ")";
            return rep;
        }
    }
    rep.verdict = SummabilityVerdict::Inconclusive;
    rep.total_estimate = sum;
    return rep;
}

TechSequences technical_sequences(const SigmaSeq& sigma, double alpha, int deg,
                                  int mu_max) {
    TechSequences t;
    t.alpha = alpha;
    t.mu_max = mu_max;
    t.deg = deg;
    if (alpha <= 0.0 || alpha >= 1.0) {
        t.failure = "exponent must lie in (0,1) for a finite beta";
        return t;
    }
    t.beta = mu_max * alpha / (1.0 - alpha);
    int n = sigma.horizon;
    if (n <= 0) {
        t.failure = "empty horizon";
        return t;
    }

    const double gamma_cap = 1.0 / (16.0 * deg * mu_max);
    t.alpha_n.resize(n);
    t.gamma_n.resize(n);
    t.delta_n.resize(n);

    // slowly growing envelope
    std::vector<double> alpha_prime(n);
    for (int i = 0; i < n; ++i)
        alpha_prime[i] = std::sqrt(std::max(1.0, std::log(1.0 + double(i + 1))));

    if (sigma.vacuous) {
        // no sigma constraint: geometric gamma under the cap, geometric delta
        double cgamma = std::pow(2.0 / gamma_cap, 1.0 / t.beta);
        for (int i = 0; i < n; ++i) {
            t.gamma_n[i] = cgamma * std::pow(2.0, double(i + 1) / t.beta);
            t.delta_n[i] = 0.25 * std::pow(2.0, -double(i + 1));
            t.alpha_n[i] = alpha_prime[i];
        }
    } else {
        std::vector<double> delta_p(n), gamma_p(n);
        double sum_dp = 0.0, sum_gp = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = sigma.values[i];
            delta_p[i] = std::pow(s, -alpha);
            gamma_p[i] = std::pow(s, (1.0 - alpha) / mu_max) /
                         std::pow(alpha_prime[i], 2.0 / mu_max);
            sum_dp += delta_p[i];
            sum_gp += std::pow(gamma_p[i], -t.beta);
        }
        if (sum_dp <= 0.0 || sum_gp <= 0.0) {
            t.failure = "degenerate sigma";
            return t;
        }
        // C_delta: sum delta = 1/4; C_gamma: sum gamma^-beta = cap/2
        double c_delta = 0.25 / sum_dp;
        double c_gamma = std::pow(sum_gp / (0.5 * gamma_cap), 1.0 / t.beta);
        double c_alpha =
            std::sqrt(c_delta / std::pow(c_gamma, double(mu_max))) * (1.0 - 1e-9);
        for (int i = 0; i < n; ++i) {
            t.delta_n[i] = c_delta * delta_p[i];
            t.gamma_n[i] = c_gamma * gamma_p[i];
            t.alpha_n[i] = c_alpha * alpha_prime[i];
        }
    }

    for (int i = 0; i < n; ++i) {
        t.sum_delta += t.delta_n[i];
        t.sum_gamma_beta += std::pow(t.gamma_n[i], -t.beta);
    }
    // monotone index of alpha_n
    t.monotone_from = n - 1;
    for (int i = n - 1; i > 0; --i) {
        if (t.alpha_n[i] >= t.alpha_n[i - 1] * (1.0 - 1e-12))
            t.monotone_from = i - 1;
        else
            break;
    }

    std::string why;
    t.feasible = t.verify(sigma, &why);
    if (!t.feasible) t.failure = why;
    return t;
}

bool TechSequences::verify(const SigmaSeq& sigma, std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    double sd = 0.0, sg = 0.0;
    for (size_t i = 0; i < delta_n.size(); ++i) {
        sd += delta_n[i];
        sg += std::pow(gamma_n[i], -beta);
    }
    if (!(sd < 0.5)) return fail("sum delta_n >= 1/2");
    if (!(sg < 1.0 / (16.0 * deg * mu_max)))
        return fail("sum gamma_n^-beta >= 1/(16 deg mu_max)");
    if (!sigma.vacuous) {
        for (size_t i = 0; i < delta_n.size() && i < sigma.values.size(); ++i) {
            double rhs = alpha_n[i] * alpha_n[i] * std::pow(gamma_n[i], double(mu_max)) /
                         delta_n[i];
            if (!(sigma.values[i] >= rhs))
                return fail("sigma_n < alpha_n^2 gamma_n^mu / delta_n at n=" +
                            std::to_string(i + 1));
        }
    }
    for (size_t i = monotone_from; i + 1 < alpha_n.size(); ++i)
        if (alpha_n[i + 1] < alpha_n[i] * (1.0 - 1e-12))
            return fail("alpha_n not nondecreasing beyond the reported index");
    return true;
}

LyapunovResult lyapunov_exponent(const MapSpec& map, cplx z, long n, double crit_tol,
                                 double compact_radius) {
    LyapunovResult res;
    double bound = compact_radius > 0 ? compact_radius : 4.0 * map.default_escape_radius();
    double acc = 0.0;
    long trace_stride = std::max<long>(1, n / 1000);
    for (long i = 0; i < n; ++i) {
        cplx fz, dz;
        try {
            auto pr = map.eval_with_derivative(z);
            fz = pr.first;
            dz = pr.second;
        } catch (const PoleError&) {
            res.orbit_escaped = true;
            res.note = "orbit hit a pole at step " + std::to_string(i);
            break;
        }
        if (std::abs(dz) < crit_tol) {
            res.minus_infinity = true;
            res.note = "orbit hit a critical point at step " + std::to_string(i);
            break;
        }
        acc += std::log(std::abs(dz));
        z = fz;
        res.steps_used = static_cast<int>(i + 1);
        if ((i + 1) % trace_stride == 0) res.trace.push_back(acc / double(i + 1));
        if (std::abs(z) > bound) {
            res.orbit_escaped = true;
            res.note = "orbit left the working compact at step " + std::to_string(i + 1);
            break;
        }
    }
    if (res.minus_infinity) {
        res.value = -std::numeric_limits<double>::infinity();
    } else if (res.steps_used > 0) {
        res.value = acc / double(res.steps_used);
    }
    return res;
}

FamilyCheckReport s_alpha_uniform_check(const std::vector<MapSpec>& family,
                                        const MapSpec& limit, double alpha,
                                        const FamilyCheckConfig& cfg) {
    FamilyCheckReport rep;
    rep.eps = cfg.eps;
    rep.M = cfg.M;
    rep.alpha = alpha;

    auto limit_crit = critical_points(limit);
    size_t limit_count = 0;
    for (const auto& c : limit_crit)
        if (!c.at_infinity) ++limit_count;

    // the uniform-convergence definition excludes parabolic orbits; suspects
    // are reported, not rejected
    rep.parabolic_warning = detect_parabolic_cycles(limit, 2).parabolic_suspect;
    for (const auto& f : family)
        if (!rep.parabolic_warning && detect_parabolic_cycles(f, 2).parabolic_suspect)
            rep.parabolic_warning = true;

    rep.correspondence_ok = true;
    for (size_t m = 0; m < family.size(); ++m) {
        auto crit = critical_points(family[m]);
        size_t count = 0;
        for (const auto& c : crit)
            if (!c.at_infinity) ++count;
        if (count != limit_count) {
            rep.correspondence_ok = false;
            rep.note = "critical point count mismatch at member " + std::to_string(m);
            return rep;
        }
    }

    bool all_ok = true;
    for (size_t m = 0; m < family.size(); ++m) {
        const MapSpec& f = family[m];
        auto raster = julia_membership_grid(f, cfg.bbox, cfg.raster_k,
                                            cfg.raster_max_iter, 0.0);
        auto dt = distance_transform(raster);
        auto crit = critical_points(f);
        for (const auto& c : crit) {
            if (c.at_infinity) continue;
            if (raster_distance(raster, dt, c.location) > cfg.eps) continue;

            FamilyMemberCheck ck;
            ck.member = static_cast<int>(m);
            ck.critical_point = c.location;
            // E(eps): first j with F^j(c) outside the eps-neighborhood of J
            cplx z = c.location;
            cplx deriv_prod(1.0);
            double sum = 0.0;
            ck.escape_time = -1;
            for (int j = 1; j <= cfg.horizon; ++j) {
                auto [fz, dz] = f.eval_with_derivative(z);
                deriv_prod *= dz;
                z = fz;
                // (F^j)'(c) along the critical orbit
                double mod = std::abs(deriv_prod);
                if (mod > 0.0) sum += std::pow(mod, -alpha);
                if (raster_distance(raster, dt, z) > cfg.eps) {
                    ck.escape_time = j;
                    break;
                }
            }
            ck.partial_sum = sum;
            ck.within_bound = sum < cfg.M;
            if (!ck.within_bound) all_ok = false;
            rep.checks.push_back(ck);
        }
    }
    rep.pass = all_ok && rep.correspondence_ok;
    return rep;
}

} // namespace dynlab
