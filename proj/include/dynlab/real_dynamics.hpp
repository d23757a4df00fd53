#ifndef DYNLAB_REAL_DYNAMICS_HPP
#define DYNLAB_REAL_DYNAMICS_HPP

#include "dynlab/orbit_analysis.hpp"
#include "dynlab/polynomial.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dynlab {

// Analytic interval map given by real rational data (denominator trivially 1
// for polynomials); the Moebius case is admitted for Schwarzian tests.
struct IntervalMap {
    Polynomial num, den;          // real coefficients stored as complex
    double a = 0.0, b = 1.0;      // domain [a, b]
    bool invariant = false;       // f([a,b]) within [a,b], set by analyze()

    static IntervalMap from_real_coeffs(std::vector<double> num, double a, double b);
    static IntervalMap from_rational(std::vector<double> num, std::vector<double> den,
                                     double a, double b);

    double eval(double x) const;
    double derivative(double x, int order = 1) const;
    std::vector<double> real_preimages(double x) const;  // within [a, b]
    std::vector<double> critical_points_interior(double tol = 1e-10) const;
    void analyze();               // fills `invariant` by extremum evaluation
};

// S(f)(x) = f'''/f' - (3/2)(f''/f')^2; requires |f'(x)| > tol
double schwarzian(const IntervalMap& f, double x, double deriv_tol = 1e-12);

struct SchwarzianCheck {
    bool negative_everywhere = false;
    double max_value = -std::numeric_limits<double>::infinity();
    double min_margin = 0.0;   // -max_value when negative
    int points_used = 0, points_skipped = 0;
};

SchwarzianCheck negative_schwarzian_check(const IntervalMap& f, int grid_points,
                                          double crit_avoid_tol = 1e-6);

// Cesaro-averaged real transfer operator started from the uniform density
struct RealDensityEstimate {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<bool> skipped;    // grid point was a critical value
    int iterations = 0;
};

RealDensityEstimate real_transfer_apply(const IntervalMap& f,
                                        const std::vector<double>& grid, int N);

// one application of L_rl to an explicit density (fixed-point residual tests)
std::vector<double> real_transfer_once(const IntervalMap& f,
                                       const std::function<double(double)>& rho,
                                       const std::vector<double>& grid);

struct PeriodicPointReport {
    bool all_repelling = true;
    int worst_period = 0;
    double worst_multiplier = 0.0;   // |(f^k)'| closest to 1 from below if any
    int points_found = 0;
};

PeriodicPointReport repelling_periodic_check(const IntervalMap& f, int max_period,
                                             int scan_points = 20000);

struct Theorem6Report {
    bool schwarzian_ok = false;
    bool periodic_ok = false;
    bool threshold_ok = false;      // alpha < 1/(1 + mu_max)
    SummabilityVerdict summability = SummabilityVerdict::Inconclusive;
    bool hypotheses_met = false;
    double alpha = 0.0;
    double threshold = 0.0;
    int mu_max = 2;
    SigmaSeq sigma;
    RealDensityEstimate density;    // produced regardless of the verdict
    double oracle_max_rel_err = -1.0;  // when an oracle density is supplied
    std::string note;
};

Theorem6Report interval_theorem6_report(
    const IntervalMap& f, double alpha, int n_max, int density_N,
    const std::vector<double>& density_grid,
    const std::function<double(double)>* oracle_density = nullptr);

} // namespace dynlab

#endif
