#include "dynlab/param_space.hpp"

#include <algorithm>
#include <cmath>

namespace dynlab {

std::vector<double> default_potential_schedule(double g0, double g_min) {
    std::vector<double> g;
    double v = g0;
    while (v > g_min) {
        g.push_back(v);
        v *= 0.5;
    }
    g.push_back(g_min);
    return g;
}

namespace {

// f_c^n(c) and its c-derivative (z_0 = c, z_{k+1} = z_k^d + c)
std::pair<cplx, cplx> iterate_with_param_deriv(int d, cplx c, int n) {
    cplx z = c, w = 1.0;
    for (int k = 0; k < n; ++k) {
        cplx zp = std::pow(z, d - 1);
        w = double(d) * zp * w + cplx(1.0);
        z = zp * z + c;
    }
    return {z, w};
}

// iterate count for a potential level: smallest n with d^n G >= target_log
int levels_needed(int d, double G, double target_log = 9.2) {
    int n = 0;
    double v = G;
    while (v < target_log && n < 60) {
        v *= d;
        ++n;
    }
    return n;
}

} // namespace

RayTrace trace_external_ray(int d, double theta, const std::vector<double>& potentials,
                            double newton_tol, int max_newton) {
    RayTrace ray;
    cplx c;
    bool have_start = false;
    for (size_t gi = 0; gi < potentials.size(); ++gi) {
        double G = potentials[gi];
        int n = levels_needed(d, G);
        // target for f_c^n(c): exp(d^n (G + 2 pi i theta))
        double scale = std::pow(double(d), double(n));
        cplx target = std::exp(cplx(scale * G, scale * 2.0 * M_PI * theta));
        if (!have_start) {
            c = std::exp(cplx(G, 2.0 * M_PI * theta));  // Phi(c) ~ c far out
            have_start = true;
        }
        RayPoint pt;
        pt.theta = theta;
        pt.potential = G;
        bool ok = false;
        cplx ck = c;
        // the n-fold iterate carries a floating noise floor of ~2^n eps, so
        // residual acceptance is floored and a small Newton step also counts
        double tol_eff = std::max(newton_tol, std::pow(double(d), double(n)) * 1e-15);
        for (int it = 0; it < max_newton; ++it) {
            auto [z, w] = iterate_with_param_deriv(d, ck, n);
            cplx r = z - target;
            double rel = std::abs(r) / std::max(1.0, std::abs(target));
            pt.residual = rel;
            pt.newton_iters = it;
            if (rel < tol_eff) {
                ok = true;
                break;
            }
            if (std::abs(w) < 1e-300 || !std::isfinite(std::abs(w))) break;
            cplx step = r / w;
            // damp long steps to keep the continuation on the ray
            double cap = 0.5 * std::max(std::abs(ck), 0.1);
            if (std::abs(step) > cap) step *= cap / std::abs(step);
            ck -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(ck))) {
                ok = true;
                auto [z2, w2] = iterate_with_param_deriv(d, ck, n);
                pt.residual = std::abs(z2 - target) / std::max(1.0, std::abs(target));
                break;
            }
            if (!std::isfinite(ck.real()) || !std::isfinite(ck.imag())) break;
        }
        if (!ok) {
            ray.fail_index = static_cast<int>(gi);
            ray.note = "continuation divergence at potential " + std::to_string(G);
            return ray;
        }
        c = ck;
        pt.c = c;
        ray.points.push_back(pt);
    }
    ray.completed = true;
    return ray;
}

CeRayReport ce_along_ray(int d, const std::vector<RayPoint>& ray, int n) {
    CeRayReport rep;
    rep.min_lambda = std::numeric_limits<double>::infinity();
    for (const auto& pt : ray) {
        CeFit fit;
        fit.c = pt.c;
        // |(f_c^n)'(z)| at z = c: product of d z_k^(d-1)
        cplx z = pt.c;
        double lg = 0.0;
        for (int k = 0; k < n; ++k) {
            double m = double(d) * std::pow(std::abs(z), double(d - 1));
            if (m < 1e-300) break;
            lg += std::log(m);
            fit.log_derivs.push_back(lg);
            z = std::pow(z, d) + pt.c;
            if (std::abs(z) > 1e12) {
                fit.escaping = true;
                break;
            }
        }
        // escape detection: second differences of log|derivs| growing
        size_t m = fit.log_derivs.size();
        if (m >= 6) {
            double d1 = fit.log_derivs[m - 1] - fit.log_derivs[m - 2];
            double d0 = fit.log_derivs[m / 2] - fit.log_derivs[m / 2 - 1];
            if (d1 > 4.0 * std::max(d0, 1.0)) fit.escaping = true;
        }
        // least squares on log |(f^n)'(c)| = log K + n log Lambda
        if (m >= 3) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t i = 0; i < m; ++i) {
                double x = double(i + 1);
                sx += x;
                sy += fit.log_derivs[i];
                sxx += x * x;
                sxy += x * fit.log_derivs[i];
            }
            double nn = double(m);
            double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
            double icpt = (sy - slope * sx) / nn;
            fit.lambda = std::exp(slope);
            fit.K = std::exp(icpt);
        }
        if (!fit.escaping && fit.lambda > 0.0)
            rep.min_lambda = std::min(rep.min_lambda, fit.lambda);
        rep.fits.push_back(std::move(fit));
    }
    rep.uniform = std::isfinite(rep.min_lambda) && rep.min_lambda > 1.0;
    return rep;
}

RayDimensionReport dimension_along_ray(int d, const std::vector<RayPoint>& ray,
                                       const std::vector<int>& subsample_indices,
                                       const DimensionConfig& cfg) {
    RayDimensionReport rep;
    for (int idx : subsample_indices) {
        if (idx < 0 || idx >= static_cast<int>(ray.size())) continue;
        RayDimensionPoint pt;
        pt.potential = ray[idx].potential;
        pt.c = ray[idx].c;
        MapSpec map = MapSpec::unicritical(d, pt.c);
        pt.dims = dimension_comparison(map, cfg);
        pt.ok = pt.dims.pass || pt.dims.box > 0.0;
        rep.points.push_back(pt);
    }
    // Richardson-style extrapolation on the box estimates against potential
    std::vector<std::pair<double, double>> seq;
    for (const auto& p : rep.points)
        if (p.ok) seq.emplace_back(p.potential, p.dims.box);
    if (seq.size() >= 2) {
        auto [g1, v1] = seq[seq.size() - 1];
        auto [g2, v2] = seq[seq.size() - 2];
        // linear-in-G extrapolation to G = 0
        rep.extrapolated = g2 != g1 ? v1 + (v2 - v1) * (0.0 - g1) / (g2 - g1) : v1;
    } else if (seq.size() == 1) {
        rep.extrapolated = seq[0].second;
    }
    if (!ray.empty()) {
        MapSpec landing = MapSpec::unicritical(d, ray.back().c);
        auto dims = dimension_comparison(landing, cfg);
        rep.landing_estimate = dims.box;
        rep.landing_available = dims.box > 0.0;
    }
    return rep;
}

} // namespace dynlab
