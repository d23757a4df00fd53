// dynlab: numerical experiments on rational-map dynamics from the command
// line. Every command writes its artifacts plus a manifest.json with SHA-256
// hashes of all inputs and outputs; `replay` re-executes a manifest and
// verifies byte identity.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynlab/backward.hpp"
#include "dynlab/dimensions.hpp"
#include "dynlab/io_util.hpp"
#include "dynlab/measures.hpp"
#include "dynlab/orbit_analysis.hpp"
#include "dynlab/param_space.hpp"
#include "dynlab/poincare.hpp"
#include "dynlab/real_dynamics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dynlab;

namespace {

constexpr const char* kVersion = "dynlab 1.0.0";

struct RunContext {
    fs::path out;
    json params;
    std::vector<std::string> outputs;   // filenames relative to out
    std::vector<std::string> inputs;    // absolute paths

    fs::path path(const std::string& name) {
        outputs.push_back(name);
        return out / name;
    }
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx param_complex(const json& p, const std::string& re, const std::string& im) {
    return {p.value(re, 0.0), p.value(im, 0.0)};
}

BoundingBox param_bbox(const json& p) {
    BoundingBox bb;
    bb.x_min = p.value("xmin", -2.0);
    bb.x_max = p.value("xmax", 2.0);
    bb.y_min = p.value("ymin", -2.0);
    bb.y_max = p.value("ymax", 2.0);
    return bb;
}

MapSpec load_map_for(RunContext& ctx) {
    std::string path = ctx.params.at("map").get<std::string>();
    ctx.inputs.push_back(fs::absolute(path).string());
    return load_map_spec(path);
}

std::string verdict_name(SummabilityVerdict v) {
    switch (v) {
        case SummabilityVerdict::Converges: return "converges";
        case SummabilityVerdict::ConvergesVacuously: return "converges (vacuously)";
        case SummabilityVerdict::Diverges: return "diverges";
        default: return "inconclusive";
    }
}

SigmaSeq sigma_from_params(const MapSpec& map, const json& p) {
    std::string fixture = p.value("fixture", std::string());
    int n = p.value("n", 20);
    if (fixture == "geometric4") {
        std::vector<double> v(n);
        double x = 1.0;
        for (int i = 0; i < n; ++i) {
            x *= 4.0;
            v[i] = x;
        }
        return SigmaSeq::from_values(v);
    }
    if (fixture == "cubic") {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = std::pow(double(i + 1), 3.0);
        return SigmaSeq::from_values(v);
    }
    auto crit = collapse_critical_blocks(critical_points(map), 64, 1e-9);
    return sigma_sequence(map, crit, n);
}

// ---------------------------------------------------------------------------
// command handlers; each fills ctx.outputs

void cmd_sigma(RunContext& ctx) {
    auto map = load_map_for(ctx);
    double alpha = ctx.params.value("alpha", 1.0 / 3.0);
    auto sig = sigma_from_params(map, ctx.params);
    auto rep = summability_report(sig, alpha);
    CsvWriter csv(ctx.path("sigma.csv").string(), {"n", "sigma_n", "partial_sum_alpha"});
    for (size_t i = 0; i < sig.values.size(); ++i)
        csv.row({double(i + 1), sig.values[i],
                 sig.vacuous ? 0.0 : rep.partial_sums[i]});
    json j;
    j["vacuous"] = sig.vacuous;
    j["alpha"] = alpha;
    j["verdict"] = verdict_name(rep.verdict);
    j["total_estimate"] = rep.total_estimate;
    std::ofstream(ctx.path("sigma_report.json")) << j.dump(2) << "\n";
}

void cmd_summability(RunContext& ctx) {
    auto map = load_map_for(ctx);
    double alpha = ctx.params.value("alpha", 1.0 / 3.0);
    bool poly = ctx.params.value("polynomial_weight", false);
    auto sig = sigma_from_params(map, ctx.params);
    std::vector<double> deltas = ctx.params.value("thresholds", std::vector<double>{});
    int mu_max = ctx.params.value("mu_max", 2);
    auto rep = summability_report(sig, alpha, poly, mu_max, deltas);
    json j;
    j["alpha"] = alpha;
    j["polynomial_weight"] = poly;
    j["verdict"] = verdict_name(rep.verdict);
    j["tail_estimate"] = rep.tail_estimate;
    j["total_estimate"] = rep.total_estimate;
    j["fitted_ratio"] = rep.fitted_ratio;
    j["note"] = rep.note;
    json th = json::array();
    for (auto& [d, t] : rep.thresholds) th.push_back({{"delta", d}, {"alpha_bound", t}});
    j["thresholds"] = th;
    std::ofstream(ctx.path("summability.json")) << j.dump(2) << "\n";
    CsvWriter csv(ctx.path("partial_sums.csv").string(), {"n", "partial_sum"});
    for (size_t i = 0; i < rep.partial_sums.size(); ++i)
        csv.row({double(i + 1), rep.partial_sums[i]});
}

void cmd_techseq(RunContext& ctx) {
    auto map = load_map_for(ctx);
    double alpha = ctx.params.value("alpha", 0.5);
    int mu_max = ctx.params.value("mu_max", 2);
    auto sig = sigma_from_params(map, ctx.params);
    auto t = technical_sequences(sig, alpha, map.degree(), mu_max);
    CsvWriter csv(ctx.path("techseq.csv").string(), {"n", "alpha_n", "gamma_n", "delta_n"});
    for (size_t i = 0; i < t.alpha_n.size(); ++i)
        csv.row({double(i + 1), t.alpha_n[i], t.gamma_n[i], t.delta_n[i]});
    json j;
    j["feasible"] = t.feasible;
    j["beta"] = t.beta;
    j["sum_delta"] = t.sum_delta;
    j["sum_gamma_beta"] = t.sum_gamma_beta;
    j["gamma_cap"] = 1.0 / (16.0 * map.degree() * mu_max);
    j["monotone_from"] = t.monotone_from;
    j["failure"] = t.failure;
    std::ofstream(ctx.path("techseq.json")) << j.dump(2) << "\n";
    if (!t.feasible) throw std::runtime_error("technical sequences infeasible: " + t.failure);
}

void cmd_preimages(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    int depth = ctx.params.value("depth", 8);
    auto tree = preimages(map, z, depth);
    CsvWriter csv(ctx.path("preimages.csv").string(),
                  {"branch", "endpoint_re", "endpoint_im", "cum_log_deriv"});
    for (size_t i = 0; i < tree.size(); ++i)
        csv.row({double(i), tree[i].endpoint().real(), tree[i].endpoint().imag(),
                 std::log(tree[i].cumulative_deriv())});
    auto hash = sha256_file(ctx.params.at("map").get<std::string>());
    write_preimage_cache(ctx.path("preimages.bin").string(), hash, z, depth, 1e-8,
                         tree);
}

void cmd_blocks(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    int depth = ctx.params.value("depth", 10);
    bool stopping = ctx.params.value("stopping", false);
    double alpha = ctx.params.value("alpha", 0.5);
    auto crit = collapse_critical_blocks(critical_points(map), 64, 1e-9);
    auto sig = sigma_sequence(map, crit, std::max(40, depth));
    auto tech = technical_sequences(sig, alpha, map.degree(), 2);
    auto scales = measure_scale_constants(map, crit, tech.feasible ? &tech : nullptr,
                                          param_bbox(ctx.params));
    auto tree = preimages(map, z, depth);
    CsvWriter csv(ctx.path("blocks.csv").string(),
                  {"branch", "code", "blocks", "certified", "grammar_ok"});
    long with3 = 0;
    bool all_grammar = true;
    for (size_t i = 0; i < tree.size(); ++i) {
        BlockCode bc = stopping
                           ? decompose_with_stopping(map, tree[i], scales, crit)
                           : decompose_blocks(map, tree[i], 1e-3, tech, scales, crit);
        if (bc.code_string().find('3') != std::string::npos) ++with3;
        all_grammar = all_grammar && bc.grammar_ok();
        csv.raw_row({std::to_string(i), bc.code_string(),
                     std::to_string(bc.blocks.size()), bc.certified ? "1" : "0",
                     bc.grammar_ok() ? "1" : "0"});
    }
    json j;
    j["branches"] = tree.size();
    j["with_type3"] = with3;
    j["grammar_ok"] = all_grammar;
    j["scales"] = {{"R", scales.R},
                   {"R_prime", scales.R_prime},
                   {"R_prime_cert", scales.R_prime_cert},
                   {"M", scales.M},
                   {"tau", scales.tau},
                   {"L", scales.L},
                   {"L_prime", scales.L_prime},
                   {"L_dprime", scales.L_dprime},
                   {"K", scales.K},
                   {"R_2t", scales.R_2t},
                   {"C_3t", scales.C_3t},
                   {"certified", scales.certified}};
    std::ofstream(ctx.path("blocks.json")) << j.dump(2) << "\n";
}

void cmd_poincare(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    double delta = ctx.params.value("delta", 1.0);
    int depth = ctx.params.value("depth", 12);
    auto crit = critical_points(map);
    PoincareLevels lv;
    if (ctx.params.contains("restrict_radius")) {
        lv = restricted_poincare_partial(map, z, delta,
                                         ctx.params["restrict_radius"].get<double>(),
                                         depth, crit);
    } else {
        lv = poincare_partial(map, z, delta, depth, crit);
    }
    CsvWriter csv(ctx.path("poincare.csv").string(), {"n", "level_sum", "cumulative"});
    for (size_t i = 0; i < lv.level_sums.size(); ++i)
        csv.row({double(i + 1), lv.level_sums[i], lv.cumulative[i]});
    auto probe = divergence_type_probe(map, z, delta, depth);
    json j;
    j["delta"] = delta;
    j["admissibility_warning"] = lv.admissibility_warning;
    j["level_ratio"] = probe.level_ratio;
    j["growth_law"] = probe.growth_law;
    j["divergent_consistent"] = probe.verdict == DivergenceVerdict::DivergentConsistent;
    std::ofstream(ctx.path("poincare.json")) << j.dump(2) << "\n";
}

void cmd_exponent(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    int depth = ctx.params.value("depth", 14);
    double tol = ctx.params.value("tol", 0.05);
    auto crit = critical_points(map);
    auto est = estimate_poincare_exponent(map, z, depth, tol, crit);
    json j;
    j["value"] = est.value;
    j["lo"] = est.lo;
    j["hi"] = est.hi;
    j["conclusive"] = est.conclusive;
    j["ratio_at_value"] = est.ratio_at_value;
    j["fit_residual"] = est.fit_residual;
    j["note"] = est.note;
    std::ofstream(ctx.path("exponent.json")) << j.dump(2) << "\n";
    if (!est.conclusive) throw std::runtime_error("exponent estimate inconclusive");
}

void cmd_measure(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    double p = ctx.params.value("p", 1.0);
    int depth = ctx.params.value("depth", 12);
    auto nu = atomic_conformal_measure(map, z, p, depth);
    write_measure_json(nu, ctx.path("measure.json").string());
    if (ctx.params.value("schedule", false)) {
        std::vector<double> ps{p + 0.4, p + 0.2, p + 0.1, p + 0.05, p};
        auto rep = conformal_p_schedule(map, z, ps, depth, param_bbox(ctx.params),
                                        ctx.params.value("bins", 8));
        CsvWriter csv(ctx.path("schedule.csv").string(), {"p", "bin_drift"});
        for (size_t i = 1; i < rep.exponents.size(); ++i)
            csv.row({rep.exponents[i], rep.bin_drift[i - 1]});
    }
}

void cmd_conformality(RunContext& ctx) {
    auto map = load_map_for(ctx);
    std::string mfile = ctx.params.value("measure", std::string());
    cplx z = param_complex(ctx.params, "z_re", "z_im");
    double p_build = ctx.params.value("p_build", 1.0);
    int depth = ctx.params.value("depth", 12);
    // the residual needs per-atom depths, so a measure file serves as a
    // parameter source and the atoms are rebuilt
    AtomicMeasure nu;
    if (!mfile.empty() && fs::exists(mfile)) {
        ctx.inputs.push_back(fs::absolute(mfile).string());
        nu = read_measure_json(mfile);
        nu = atomic_conformal_measure(map, nu.base_point, nu.exponent, nu.depth);
    } else {
        nu = atomic_conformal_measure(map, z, p_build, depth);
    }
    double p = ctx.params.value("p", 1.0);
    int cells = ctx.params.value("cells", 8);
    auto rep = conformality_residual(nu, map, p, param_bbox(ctx.params), cells);
    json j;
    j["p"] = p;
    j["max_abs"] = rep.max_abs;
    j["mean_abs"] = rep.mean_abs;
    j["max_rel"] = rep.max_rel;
    j["mean_rel"] = rep.mean_rel;
    j["cells_used"] = rep.cells_used;
    j["cells_skipped"] = rep.cells_skipped;
    std::ofstream(ctx.path("conformality.json")) << j.dump(2) << "\n";
}

void cmd_gauge(RunContext& ctx) {
    std::string mfile = ctx.params.at("measure").get<std::string>();
    ctx.inputs.push_back(fs::absolute(mfile).string());
    auto nu = read_measure_json(mfile);
    double q = ctx.params.value("q", 1.0);
    double eps = ctx.params.value("eps", 0.05);
    auto rep = gauge_check(nu, q, eps, ctx.params.value("samples", 40),
                           ctx.params.value("jmin", 3), ctx.params.value("jmax", 8));
    json j;
    j["q"] = q;
    j["eps"] = eps;
    j["lower_family"] = {rep.lower_family_min, rep.lower_family_max};
    j["upper_family"] = {rep.upper_family_min, rep.upper_family_max};
    j["samples_used"] = rep.samples_used;
    j["samples_skipped"] = rep.samples_skipped;
    j["pass"] = rep.pass;
    std::ofstream(ctx.path("gauge.json")) << j.dump(2) << "\n";
}

void cmd_integrability(RunContext& ctx) {
    auto map = load_map_for(ctx);
    std::string mfile = ctx.params.at("measure").get<std::string>();
    ctx.inputs.push_back(fs::absolute(mfile).string());
    auto nu = read_measure_json(mfile);
    double eta = ctx.params.value("eta", 0.5);
    int horizon = ctx.params.value("horizon", 8);
    double bound = ctx.params.value("bound", 10.0);
    // critical orbit of the first bounded critical point
    auto crit = critical_points(map);
    std::vector<cplx> orbit;
    for (const auto& c : crit) {
        if (c.at_infinity || c.in_julia == JuliaMembership::No) continue;
        orbit = c.forward_orbit;
        break;
    }
    if (orbit.empty() && !crit.empty() && !crit[0].at_infinity)
        orbit = crit[0].forward_orbit;
    auto rep = integrability_check(nu, orbit, eta, horizon, bound);
    json j;
    j["eta"] = eta;
    j["sup"] = rep.sup;
    j["bounded_by"] = rep.bounded_by;
    j["bound"] = bound;
    j["excluded_atoms"] = rep.excluded_atoms;
    j["integrals"] = rep.integrals;
    std::ofstream(ctx.path("integrability.json")) << j.dump(2) << "\n";
}

std::vector<cplx> grid_from_params(const json& p) {
    std::vector<cplx> grid;
    double lo = p.value("grid_lo", -1.8), hi = p.value("grid_hi", 1.8);
    int n = p.value("grid_n", 13);
    double y = p.value("grid_im", 0.0);
    for (int i = 0; i < n; ++i)
        grid.emplace_back(lo + (hi - lo) * i / std::max(1, n - 1), y);
    return grid;
}

void cmd_transfer(RunContext& ctx) {
    auto map = load_map_for(ctx);
    double delta = ctx.params.value("delta", 1.0);
    int N = ctx.params.value("iterations", 10);
    auto grid = grid_from_params(ctx.params);
    auto tv = transfer_apply(map, delta, grid, N);
    CsvWriter csv(ctx.path("transfer.csv").string(), {"x", "y", "value"});
    for (size_t i = 0; i < grid.size(); ++i)
        csv.row({grid[i].real(), grid[i].imag(), tv.values[i]});
}

void cmd_density(RunContext& ctx) {
    auto map = load_map_for(ctx);
    double delta = ctx.params.value("delta", 1.0);
    int N = ctx.params.value("iterations", 20);
    auto grid = grid_from_params(ctx.params);
    auto df = invariant_density_estimate(map, delta, grid, N, nullptr, nullptr,
                                         1L << 22);
    CsvWriter csv(ctx.path("density.csv").string(),
                  {"x", "y", "value", "trace_last_delta"});
    for (size_t i = 0; i < grid.size(); ++i)
        csv.row({grid[i].real(), grid[i].imag(), df.values[i],
                 df.trace_last_delta[i]});
    json j;
    j["min_value"] = df.min_value;
    j["iterations"] = N;
    std::ofstream(ctx.path("density.json")) << j.dump(2) << "\n";
}

void cmd_birkhoff(RunContext& ctx) {
    auto map = load_map_for(ctx);
    cplx x0 = param_complex(ctx.params, "x0_re", "x0_im");
    long n = ctx.params.value("n", 1000000L);
    BinSpec bins;
    bins.kind = ctx.params.value("angle", false) ? BinSpec::Angle : BinSpec::RealLine;
    bins.count = ctx.params.value("bins", 256);
    bins.lo = ctx.params.value("lo", -2.0);
    bins.hi = ctx.params.value("hi", 2.0);
    auto h = birkhoff_measure(map, x0, n, bins);
    CsvWriter csv(ctx.path("birkhoff.csv").string(), {"bin", "mass"});
    for (size_t i = 0; i < h.mass.size(); ++i) csv.row({double(i), h.mass[i]});
    auto st = entropy_lyapunov(map, x0, n, std::min(bins.count, 256), bins.lo, bins.hi);
    json j;
    j["escaped"] = h.orbit_escaped;
    j["lyapunov"] = st.lyapunov;
    j["entropy"] = st.entropy;
    j["min_jacobian"] = st.min_jacobian;
    j["bins_excluded"] = st.bins_excluded;
    std::ofstream(ctx.path("birkhoff.json")) << j.dump(2) << "\n";
}

void cmd_dimension(RunContext& ctx) {
    auto map = load_map_for(ctx);
    DimensionConfig cfg;
    cfg.bbox = param_bbox(ctx.params);
    cfg.raster_k = ctx.params.value("level", 11);
    cfg.raster_max_iter = ctx.params.value("max_iter", 256);
    cfg.poincare_base = param_complex(ctx.params, "base_re", "base_im");
    if (cfg.poincare_base == cplx(0.0, 0.0)) cfg.poincare_base = cplx(3.0, 0.0);
    cfg.poincare_depth = ctx.params.value("poincare_depth", 14);
    auto cmp = dimension_comparison(map, cfg);
    json j;
    j["poincare"] = {{"value", cmp.poincare}, {"lo", cmp.poincare_lo}, {"hi", cmp.poincare_hi}};
    j["whitney"] = {{"value", cmp.whitney}, {"lo", cmp.whitney_lo}, {"hi", cmp.whitney_hi}};
    j["box"] = {{"value", cmp.box}, {"lo", cmp.box_lo}, {"hi", cmp.box_hi}};
    j["max_pairwise_gap"] = cmp.max_pairwise_gap;
    j["fact81_ok"] = cmp.fact81_ok;
    j["pass"] = cmp.pass;
    j["note"] = cmp.note;
    std::ofstream(ctx.path("dimension.json")) << j.dump(2) << "\n";

    auto raster = julia_membership_grid(map, cfg.bbox, cfg.raster_k,
                                        cfg.raster_max_iter, 0.0);
    write_pgm(raster, ctx.path("julia.pgm").string());
    auto box = box_counting_dimension(raster);
    CsvWriter csv(ctx.path("scales.csv").string(), {"level", "rho", "N"});
    for (const auto& s : box.scales) csv.row({double(s.level), s.rho, double(s.count)});
}

void cmd_whitney(RunContext& ctx) {
    auto map = load_map_for(ctx);
    BoundingBox bb = param_bbox(ctx.params);
    int k = ctx.params.value("level", 11);
    auto raster = julia_membership_grid(map, bb, k, ctx.params.value("max_iter", 256), 0.0);
    auto rep = whitney_exponent(raster);
    CsvWriter csv(ctx.path("whitney.csv").string(),
                  {"level", "count", "diam", "sum_at_08", "sum_at_10", "sum_at_12"});
    for (const auto& w : rep.per_level)
        csv.row({double(w.level), double(w.count), w.diam,
                 double(w.count) * std::pow(w.diam, 0.8),
                 double(w.count) * std::pow(w.diam, 1.0),
                 double(w.count) * std::pow(w.diam, 1.2)});
    json j;
    j["exponent"] = rep.exponent;
    j["lo"] = rep.lo;
    j["hi"] = rep.hi;
    j["conclusive"] = rep.conclusive;
    j["min_dist_ratio"] = rep.min_dist_ratio;
    j["max_dist_ratio"] = rep.max_dist_ratio;
    std::ofstream(ctx.path("whitney.json")) << j.dump(2) << "\n";
}

void cmd_interval(RunContext& ctx) {
    std::string path = ctx.params.at("map").get<std::string>();
    ctx.inputs.push_back(fs::absolute(path).string());
    auto spec = load_map_spec(path);
    if (spec.kind() != MapKind::RealInterval)
        throw std::invalid_argument("interval command needs a real-interval map");
    std::vector<double> coeffs;
    for (const auto& c : spec.numerator().coeffs()) coeffs.push_back(c.real());
    auto f = IntervalMap::from_real_coeffs(coeffs, spec.domain_a(), spec.domain_b());

    double alpha = ctx.params.value("alpha", 0.3);
    int n_max = ctx.params.value("n", 30);
    int N = ctx.params.value("iterations", 18);
    std::vector<double> grid;
    double lo = ctx.params.value("grid_lo", 0.05), hi = ctx.params.value("grid_hi", 0.95);
    int gn = ctx.params.value("grid_n", 19);
    for (int i = 0; i < gn; ++i) grid.push_back(lo + (hi - lo) * i / (gn - 1));

    bool arcsine = ctx.params.value("oracle_arcsine", false);
    std::function<double(double)> oracle = [](double x) {
        return 1.0 / (M_PI * std::sqrt(x * (1.0 - x)));
    };
    auto rep = interval_theorem6_report(f, alpha, n_max, N, grid,
                                        arcsine ? &oracle : nullptr);
    CsvWriter csv(ctx.path("interval_density.csv").string(),
                  {"x", "density", "oracle", "rel_err"});
    for (size_t i = 0; i < grid.size(); ++i) {
        double orc = arcsine ? oracle(grid[i]) : 0.0;
        double rel = arcsine && orc > 0 ? (rep.density.values[i] - orc) / orc : 0.0;
        csv.row({grid[i], rep.density.values[i], orc, rel});
    }
    json j;
    j["schwarzian_ok"] = rep.schwarzian_ok;
    j["periodic_ok"] = rep.periodic_ok;
    j["threshold_ok"] = rep.threshold_ok;
    j["threshold"] = rep.threshold;
    j["alpha"] = alpha;
    j["mu_max"] = rep.mu_max;
    j["summability"] = verdict_name(rep.summability);
    j["hypotheses_met"] = rep.hypotheses_met;
    j["oracle_max_rel_err"] = rep.oracle_max_rel_err;
    j["note"] = rep.note;
    std::ofstream(ctx.path("interval.json")) << j.dump(2) << "\n";
}

void cmd_ray(RunContext& ctx) {
    int d = ctx.params.value("d", 2);
    double theta = ctx.params.value("theta", 0.5);
    double g0 = ctx.params.value("g0", 4.0);
    double gmin = ctx.params.value("gmin", 1e-6);
    auto sched = default_potential_schedule(g0, gmin);
    auto ray = trace_external_ray(d, theta, sched, ctx.params.value("newton_tol", 1e-12));
    CsvWriter csv(ctx.path("ray.csv").string(),
                  {"theta", "G", "c_re", "c_im", "residual"});
    for (const auto& p : ray.points)
        csv.row({p.theta, p.potential, p.c.real(), p.c.imag(), p.residual});
    json j;
    j["completed"] = ray.completed;
    j["fail_index"] = ray.fail_index;
    j["note"] = ray.note;
    if (!ray.points.empty()) {
        j["landing"] = complex_json(ray.points.back().c);
        j["landing_potential"] = ray.points.back().potential;
    }
    std::ofstream(ctx.path("ray.json")) << j.dump(2) << "\n";
    if (!ray.completed) throw std::runtime_error("ray continuation diverged");
}

void cmd_raydim(RunContext& ctx) {
    int d = ctx.params.value("d", 2);
    double theta = ctx.params.value("theta", 0.5);
    auto sched = default_potential_schedule(ctx.params.value("g0", 4.0),
                                            ctx.params.value("gmin", 1e-6));
    auto ray = trace_external_ray(d, theta, sched);
    if (!ray.completed) throw std::runtime_error("ray continuation diverged");

    int ce_n = ctx.params.value("ce_n", 12);
    int tail = std::min<int>(ctx.params.value("tail", 6), ray.points.size());
    std::vector<RayPoint> tail_pts(ray.points.end() - tail, ray.points.end());
    auto ce = ce_along_ray(d, tail_pts, ce_n);

    DimensionConfig cfg;
    cfg.bbox = param_bbox(ctx.params);
    cfg.raster_k = ctx.params.value("level", 9);
    cfg.poincare_base = cplx(1.0, 1.0);
    cfg.poincare_depth = ctx.params.value("poincare_depth", 12);
    std::vector<int> idx;
    int count = ctx.params.value("dim_points", 3);
    for (int i = 0; i < count; ++i)
        idx.push_back(int(ray.points.size()) - 1 - i * 2);
    auto rd = dimension_along_ray(d, ray.points, idx, cfg);

    CsvWriter csv(ctx.path("raydim.csv").string(),
                  {"theta", "G", "c_re", "c_im", "residual", "lambda_fit",
                   "dim_estimate", "dim_bracket"});
    for (size_t i = 0; i < rd.points.size(); ++i) {
        double lam = i < ce.fits.size() ? ce.fits[i].lambda : 0.0;
        csv.row({theta, rd.points[i].potential, rd.points[i].c.real(),
                 rd.points[i].c.imag(), 0.0, lam, rd.points[i].dims.box,
                 rd.points[i].dims.box_hi - rd.points[i].dims.box_lo});
    }
    json j;
    j["min_lambda"] = ce.min_lambda;
    j["uniform"] = ce.uniform;
    j["extrapolated"] = rd.extrapolated;
    j["landing_estimate"] = rd.landing_estimate;
    j["landing_available"] = rd.landing_available;
    std::ofstream(ctx.path("raydim.json")) << j.dump(2) << "\n";
}

void cmd_family(RunContext& ctx) {
    std::string limit_path = ctx.params.at("map").get<std::string>();
    ctx.inputs.push_back(fs::absolute(limit_path).string());
    auto limit = load_map_spec(limit_path);
    std::vector<MapSpec> members;
    for (const auto& m : ctx.params.at("members")) {
        std::string mp = m.get<std::string>();
        ctx.inputs.push_back(fs::absolute(mp).string());
        members.push_back(load_map_spec(mp));
    }
    FamilyCheckConfig cfg;
    cfg.eps = ctx.params.value("eps", 0.2);
    cfg.M = ctx.params.value("M", 10.0);
    cfg.horizon = ctx.params.value("horizon", 400);
    cfg.raster_k = ctx.params.value("level", 8);
    cfg.bbox = param_bbox(ctx.params);
    double alpha = ctx.params.value("alpha", 1.0 / 3.0);
    auto rep = s_alpha_uniform_check(members, limit, alpha, cfg);
    json j;
    j["pass"] = rep.pass;
    j["correspondence_ok"] = rep.correspondence_ok;
    j["eps"] = rep.eps;
    j["M"] = rep.M;
    j["alpha"] = alpha;
    json checks = json::array();
    for (const auto& ck : rep.checks)
        checks.push_back({{"member", ck.member},
                          {"critical_point", complex_json(ck.critical_point)},
                          {"escape_time", ck.escape_time},
                          {"partial_sum", ck.partial_sum},
                          {"within_bound", ck.within_bound}});
    j["checks"] = checks;
    j["note"] = rep.note;
    std::ofstream(ctx.path("family.json")) << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// dispatch, manifest, replay

int run_command(const std::string& cmd, const json& params, const fs::path& outdir);

void write_manifest(RunContext& ctx, const std::string& cmd, double wall_s) {
    json m;
    m["version"] = kVersion;
    m["command"] = cmd;
    m["params"] = ctx.params;
    m["wall_time_s"] = wall_s;
    json inputs = json::object();
    for (const auto& in : ctx.inputs) inputs[in] = hex(sha256_file(in));
    m["inputs"] = inputs;
    json outputs = json::object();
    for (const auto& out : ctx.outputs)
        outputs[out] = hex(sha256_file((ctx.out / out).string()));
    m["outputs"] = outputs;
    std::ofstream(ctx.out / "manifest.json") << m.dump(2) << "\n";
}

int cmd_replay(const json& params, const fs::path& outdir) {
    std::string mpath = params.at("manifest").get<std::string>();
    std::ifstream f(mpath);
    if (!f) {
        std::cerr << "replay: cannot open manifest " << mpath << "\n";
        return 2;
    }
    json m;
    f >> m;
    // input hashes must match before re-execution
    for (auto& [path, hash] : m.at("inputs").items()) {
        if (!fs::exists(path) || hex(sha256_file(path)) != hash.get<std::string>()) {
            std::cerr << "replay: input hash mismatch for " << path << "\n";
            return 2;
        }
    }
    fs::create_directories(outdir);
    int rc = run_command(m.at("command").get<std::string>(), m.at("params"), outdir);
    if (rc != 0) return rc;
    // byte-identical outputs
    for (auto& [name, hash] : m.at("outputs").items()) {
        auto p = outdir / name;
        if (!fs::exists(p) || hex(sha256_file(p.string())) != hash.get<std::string>()) {
            std::cerr << "replay: output mismatch for " << name << "\n";
            return 3;
        }
    }
    std::cout << "replay: outputs byte-identical\n";
    return 0;
}

int run_command(const std::string& cmd, const json& params, const fs::path& outdir) {
    fs::create_directories(outdir);
    RunContext ctx;
    ctx.out = outdir;
    ctx.params = params;
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cmd == "sigma") cmd_sigma(ctx);
        else if (cmd == "summability") cmd_summability(ctx);
        else if (cmd == "techseq") cmd_techseq(ctx);
        else if (cmd == "preimages") cmd_preimages(ctx);
        else if (cmd == "blocks") cmd_blocks(ctx);
        else if (cmd == "poincare") cmd_poincare(ctx);
        else if (cmd == "exponent") cmd_exponent(ctx);
        else if (cmd == "measure") cmd_measure(ctx);
        else if (cmd == "conformality") cmd_conformality(ctx);
        else if (cmd == "gauge") cmd_gauge(ctx);
        else if (cmd == "integrability") cmd_integrability(ctx);
        else if (cmd == "transfer") cmd_transfer(ctx);
        else if (cmd == "density") cmd_density(ctx);
        else if (cmd == "birkhoff") cmd_birkhoff(ctx);
        else if (cmd == "dimension") cmd_dimension(ctx);
        else if (cmd == "whitney") cmd_whitney(ctx);
        else if (cmd == "interval") cmd_interval(ctx);
        else if (cmd == "ray") cmd_ray(ctx);
        else if (cmd == "raydim") cmd_raydim(ctx);
        else if (cmd == "family") cmd_family(ctx);
        else {
            std::cerr << "unknown command: " << cmd << "\n";
            return 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::ofstream diag(outdir / "diagnostic.txt");
        diag << cmd << " failed: " << e.what() << "\n";
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, cmd, wall);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " -- numerical laboratory for rational-map dynamics"};
    app.require_subcommand(1);

    std::string out_dir = "dynlab_out";
    std::string config_file;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--config", config_file, "single JSON file with all parameters");

    // every subcommand shares the generic parameter set; values are collected
    // into a JSON object so manifests can replay them exactly
    json params = json::object();
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--config", config_file, "single JSON file with all parameters");
        auto opt_d = [&params, sub](const std::string& name) {
            sub->add_option_function<double>(
                "--" + name, [&params, name](double v) { params[name] = v; });
        };
        auto opt_i = [&params, sub](const std::string& name) {
            sub->add_option_function<long>(
                "--" + name, [&params, name](long v) { params[name] = v; });
        };
        auto opt_s = [&params, sub](const std::string& name) {
            sub->add_option_function<std::string>(
                "--" + name,
                [&params, name](const std::string& v) { params[name] = v; });
        };
        auto opt_b = [&params, sub](const std::string& name) {
            sub->add_flag_function("--" + name, [&params, name](int64_t count) {
                if (count > 0) params[name] = true;
            });
        };
        opt_s("map");
        opt_s("measure");
        opt_s("fixture");
        opt_s("manifest");
        for (const char* n :
             {"alpha", "delta", "p", "q", "eps", "tol", "theta", "g0", "gmin",
              "newton_tol", "eta", "bound", "M", "z_re", "z_im", "x0_re", "x0_im",
              "base_re", "base_im", "grid_lo", "grid_hi", "grid_im", "lo", "hi",
              "xmin", "xmax", "ymin", "ymax", "restrict_radius", "p_build", "mu_max"})
            opt_d(n);
        for (const char* n : {"n", "depth", "level", "max_iter", "iterations", "bins",
                              "cells", "samples", "jmin", "jmax", "horizon", "d",
                              "grid_n", "poincare_depth", "ce_n", "tail", "dim_points",
                              "seed"})
            opt_i(n);
        for (const char* n : {"polynomial_weight", "stopping", "schedule", "angle",
                              "oracle_arcsine"})
            opt_b(n);
        sub->add_option_function<std::vector<std::string>>(
            "--members", [&params](const std::vector<std::string>& v) {
                params["members"] = v;
            });
    };

    const char* names[] = {"sigma", "summability", "techseq", "preimages", "blocks",
                           "poincare", "exponent", "measure", "conformality", "gauge",
                           "integrability", "transfer", "density", "birkhoff",
                           "dimension", "whitney", "interval", "ray", "raydim",
                           "family", "replay"};
    for (const char* n : names) add_common(app.add_subcommand(n));

    CLI11_PARSE(app, argc, argv);

    auto subs = app.get_subcommands();
    if (subs.empty()) return 2;
    std::string cmd = subs[0]->get_name();

    if (!config_file.empty()) {
        std::ifstream cf(config_file);
        if (!cf) {
            std::cerr << "cannot open config " << config_file << "\n";
            return 2;
        }
        json file_params;
        cf >> file_params;
        // command-line values win over the config file
        file_params.update(params);
        params = std::move(file_params);
    }

    if (cmd == "replay") return cmd_replay(params, out_dir);
    return run_command(cmd, params, out_dir);
}
